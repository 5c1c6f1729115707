"""Planar geometry for line tessellations.

Lines are kept in Hesse normal form: ``H(theta, t)`` is the set of points
``x`` with ``<x, u(theta)> = t``, where ``u = (cos theta, sin theta)`` and
``t >= 0``.  Everything downstream (cell extraction, inball statistics)
reduces to a handful of primitives implemented here: line/point distances,
the triangle bounded by three pairwise non-parallel lines, its inscribed
disc, and half-plane clipping of convex polygons.

Convex polygons are ``(V, 2)`` float arrays in counter-clockwise order,
rotated so the lexicographically smallest vertex comes first.  Two polygons
are then equal iff their arrays are equal, which keeps comparisons in tests
and deduplication deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateTripleError, DomainError, PointOnLineError

#: Edge marker for cell edges contributed by the bounding window polygon
#: rather than by a sampled line.
BOUNDARY = -1

#: Two lines are treated as parallel when |sin(theta_i - theta_j)| falls
#: below this threshold.
PARALLEL_EPS = 1e-12

#: Triangles with area below this threshold are treated as degenerate.
AREA_EPS = 1e-12

#: Base tolerance for point-on-line tests, tangency residuals and emptiness
#: checks; always used scaled by ``max(1, local length scale)``.
GEOM_EPS = 1e-9

#: Number of sides of the regular polygon used to bound reconstructed cells.
BOUND_GON_SIDES = 64


@dataclass(frozen=True)
class Line:
    """A line ``{x : <x, u(theta)> = t}`` with ``t >= 0``.

    Args:
        theta: Direction of the unit normal, in ``[0, 2*pi)``.
        t: Distance of the line from the origin, ``>= 0``.
    """

    theta: float
    t: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta < 2.0 * math.pi:
            raise DomainError(f"theta must lie in [0, 2*pi), got {self.theta!r}")
        if not self.t >= 0.0:
            raise DomainError(f"t must be >= 0, got {self.t!r}")

    @property
    def normal(self) -> tuple[float, float]:
        """Unit normal ``u(theta)``."""
        return (math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True, eq=False)
class Triangle:
    """Triangle bounded by three pairwise non-parallel lines.

    ``vertices[k]`` is opposite ``lines[k]``, i.e. it is the intersection of
    the other two lines, and the vertices are in counter-clockwise order.
    """

    vertices: np.ndarray  # (3, 2)
    lines: tuple[Line, Line, Line]


@dataclass(frozen=True)
class InballFlags:
    """Classification flags attached to an inball found in a tessellation.

    Attributes:
        incentre_in_window: incentre lies in the observation window.
        triangle_in_guard: the generating triangle lies inside the guard
            window.
        empty: no sampled line other than the generating triple crosses the
            open disc.
        boundary_safe: the closed disc lies inside the sampled region, so
            emptiness cannot be spoiled by unsampled lines.
    """

    incentre_in_window: bool
    triangle_in_guard: bool
    empty: bool
    boundary_safe: bool


@dataclass(frozen=True)
class Inball:
    """An inscribed disc tangent to three lines.

    Attributes:
        center: Incentre ``z``.
        radius: Inradius ``r > 0``.
        triple: Indices of the three tangent lines in the generating sample
            (``BOUNDARY`` for window edges of reconstructed cells), or
            ``None`` when the inball was built from anonymous lines.
        residuals: ``| distance(z, line_k) - r |`` for the three tangent
            lines; bounded by ``GEOM_EPS * max(1, r)`` for healthy input.
        flags: Tessellation flags, or ``None`` outside a tessellation run.
    """

    center: tuple[float, float]
    radius: float
    triple: tuple[int, int, int] | None = None
    residuals: tuple[float, float, float] = (0.0, 0.0, 0.0)
    flags: InballFlags | None = None


@dataclass(frozen=True, eq=False)
class Cell:
    """A convex tessellation cell clipped to a bounding window polygon.

    ``edge_lines[k]`` names the sampled line carrying the edge from
    ``vertices[k]`` to ``vertices[k + 1]`` (cyclically), or ``BOUNDARY`` for
    edges inherited from the bounding polygon.
    """

    vertices: np.ndarray  # (V, 2), counter-clockwise, canonical start
    edge_lines: tuple[int, ...]
    inball: Inball


def as_line_array(lines: Iterable[Line] | np.ndarray) -> np.ndarray:
    """Coerces a line collection to an ``(M, 2)`` float array of (theta, t)."""
    if isinstance(lines, np.ndarray):
        arr = np.asarray(lines, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError(f"line array must have shape (M, 2), got {arr.shape}")
        return arr
    return np.array([(ln.theta, ln.t) for ln in lines], dtype=float).reshape(-1, 2)


def line_distance(line: Line, point: Sequence[float]) -> float:
    """Euclidean distance from ``point`` to ``line`` (always ``>= 0``)."""
    c, s = line.normal
    return abs(c * point[0] + s * point[1] - line.t)


def intersect_lines(a: Line, b: Line) -> tuple[float, float]:
    """Intersection point of two lines.

    Raises:
        DegenerateTripleError: if ``|sin(theta_a - theta_b)| < PARALLEL_EPS``.
    """
    det = math.sin(b.theta - a.theta)
    if abs(det) < PARALLEL_EPS:
        raise DegenerateTripleError(
            f"lines are numerically parallel (|sin dtheta| = {abs(det):.3e})"
        )
    ca, sa = a.normal
    cb, sb = b.normal
    x = (a.t * sb - b.t * sa) / det
    y = (ca * b.t - cb * a.t) / det
    return (x, y)


def triangle_of_triple(a: Line, b: Line, c: Line) -> Triangle:
    """The triangle bounded by three pairwise non-parallel lines.

    Raises:
        DegenerateTripleError: if some pair is numerically parallel or the
            triangle area falls below ``AREA_EPS``.
    """
    va = intersect_lines(b, c)
    vb = intersect_lines(a, c)
    vc = intersect_lines(a, b)
    cross = (vb[0] - va[0]) * (vc[1] - va[1]) - (vc[0] - va[0]) * (vb[1] - va[1])
    if abs(cross) / 2.0 < AREA_EPS:
        raise DegenerateTripleError(f"triangle area {abs(cross) / 2.0:.3e} below {AREA_EPS}")
    if cross < 0.0:  # enforce CCW, keeping vertex k opposite line k
        va, vb = vb, va
        a, b = b, a
    return Triangle(vertices=np.array([va, vb, vc], dtype=float), lines=(a, b, c))


def incircle_of_triangle(tri: Triangle) -> Inball:
    """Inscribed disc of a triangle, tangent to all three generating lines.

    Uses the barycentric incentre formula ``z = (a*A + b*B + c*C)/(a+b+c)``
    with ``a, b, c`` the side lengths opposite ``A, B, C``, and
    ``r = 2*area/perimeter``.

    Raises:
        DegenerateTripleError: if a tangency residual exceeds
            ``GEOM_EPS * max(1, r)``, which signals a numerically hopeless
            triple rather than a valid inball.
    """
    v = tri.vertices
    side = np.array(
        [
            math.hypot(v[1, 0] - v[2, 0], v[1, 1] - v[2, 1]),
            math.hypot(v[0, 0] - v[2, 0], v[0, 1] - v[2, 1]),
            math.hypot(v[0, 0] - v[1, 0], v[0, 1] - v[1, 1]),
        ]
    )
    perim = float(side.sum())
    z = (side[:, None] * v).sum(axis=0) / perim
    cross = (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[2, 0] - v[0, 0]) * (v[1, 1] - v[0, 1])
    r = abs(cross) / perim
    residuals = tuple(abs(line_distance(ln, z) - r) for ln in tri.lines)
    if max(residuals) > GEOM_EPS * max(1.0, r):
        raise DegenerateTripleError(
            f"tangency residual {max(residuals):.3e} exceeds tolerance at r={r:.3e}"
        )
    return Inball(center=(float(z[0]), float(z[1])), radius=float(r), residuals=residuals)


def polygon_area(vertices: np.ndarray) -> float:
    """Unsigned area of a polygon given by its vertex cycle."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return (float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


def canonical_polygon(vertices: np.ndarray) -> np.ndarray:
    """Returns the polygon in CCW order starting at its lexicographically
    smallest vertex (compare x, then y)."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise DomainError(f"polygon must have shape (V >= 3, 2), got {v.shape}")
    if _signed_area(v) < 0.0:
        v = v[::-1]
    start = int(np.lexsort((v[:, 1], v[:, 0]))[0])
    return np.roll(v, -start, axis=0)


def _dedup_ring(points: list[np.ndarray], ids: list[int], tol: float) -> tuple[list, list]:
    """Removes consecutive (cyclically) duplicate points from a vertex ring.

    When points ``m`` and ``m+1`` coincide, the zero-length edge between them
    (carrying ``ids[m]``) is dropped and the outgoing id of ``m+1`` survives.
    """
    out_p: list[np.ndarray] = []
    out_i: list[int] = []
    n = len(points)
    for k in range(n):
        nxt = points[(k + 1) % n]
        if abs(points[k][0] - nxt[0]) <= tol and abs(points[k][1] - nxt[1]) <= tol:
            continue
        out_p.append(points[k])
        out_i.append(ids[k])
    return out_p, out_i


def _clip_ring(
    points: np.ndarray,
    ids: list[int],
    n_vec: np.ndarray,
    offset: float,
    new_id: int,
    eps: float,
) -> tuple[np.ndarray, list[int]] | None:
    """Clips a CCW vertex ring against the half-plane ``<x, n_vec> <= offset``.

    ``ids[k]`` is the id of the edge leaving ``points[k]``; edges created by
    the cut are labelled ``new_id``.  Returns ``None`` when the intersection
    is empty (fewer than three vertices or ~zero area).
    """
    s = points @ n_vec - offset
    inside = s <= eps
    if bool(inside.all()):
        return points, ids
    if not bool(inside.any()):
        return None
    out_p: list[np.ndarray] = []
    out_i: list[int] = []
    n = len(points)
    for k in range(n):
        k2 = (k + 1) % n
        if inside[k]:
            out_p.append(points[k])
            out_i.append(ids[k])
            if not inside[k2]:
                w = s[k] / (s[k] - s[k2])
                out_p.append(points[k] + w * (points[k2] - points[k]))
                out_i.append(new_id)
        elif inside[k2]:
            w = s[k] / (s[k] - s[k2])
            out_p.append(points[k] + w * (points[k2] - points[k]))
            out_i.append(ids[k])
    scale = max(1.0, float(np.abs(points).max()))
    out_p, out_i = _dedup_ring(out_p, out_i, tol=PARALLEL_EPS * scale)
    if len(out_p) < 3:
        return None
    ring = np.array(out_p)
    if polygon_area(ring) < AREA_EPS:
        return None
    return ring, out_i


def clip_halfplane(
    polygon: np.ndarray,
    line: Line,
    keep: Sequence[float],
    eps: float = GEOM_EPS,
) -> np.ndarray | None:
    """Intersects a convex polygon with the closed side of ``line`` that
    contains ``keep``.

    Args:
        polygon: ``(V, 2)`` convex polygon, any orientation.
        line: Cutting line.
        keep: A point strictly on the side to keep (distance ``> eps``).

    Returns:
        The canonicalized clipped polygon, or ``None`` when nothing with
        positive area remains.

    Raises:
        PointOnLineError: if ``keep`` is within ``eps`` of the line.
    """
    c, s = line.normal
    sgn = c * keep[0] + s * keep[1] - line.t
    scale = max(1.0, abs(keep[0]), abs(keep[1]))
    if abs(sgn) <= eps * scale:
        raise PointOnLineError("keep point lies on the clipping line")
    sign = -1.0 if sgn > 0.0 else 1.0
    n_vec = np.array([sign * c, sign * s])
    v = canonical_polygon(polygon)
    clipped = _clip_ring(v, [0] * len(v), n_vec, sign * line.t, 0, eps * scale)
    if clipped is None:
        return None
    return canonical_polygon(clipped[0])


def _bound_polygon(r_sim: float) -> tuple[np.ndarray, list[int]]:
    """Regular bounding polygon inscribed in ``B(0, r_sim)``, CCW."""
    ang = 2.0 * math.pi * np.arange(BOUND_GON_SIDES) / BOUND_GON_SIDES
    ring = r_sim * np.column_stack([np.cos(ang), np.sin(ang)])
    return ring, [BOUNDARY] * BOUND_GON_SIDES


def _polygon_inball(
    vertices: np.ndarray,
    edge_ids: list[int],
    constraints: np.ndarray,
) -> Inball:
    """Largest disc inscribed in a convex polygon.

    ``constraints`` has rows ``(nx, ny, b)`` per edge, the polygon interior
    being ``<x, n> <= b``; the disc solves ``max r`` subject to
    ``<z, n_k> + r <= b_k``.  The optimum is found by enumerating all triples
    of active constraints, solving each 3x3 system in closed form, and taking
    the feasible candidate of maximal radius (first such triple on ties, so
    the result is deterministic).
    """
    n_edges = len(edge_ids)
    if n_edges < 3:
        raise DomainError("polygon inball needs at least three edges")
    trip = np.array(list(itertools.combinations(range(n_edges), 3)), dtype=np.intp)
    a1, b1, c1 = (constraints[trip[:, 0], k] for k in range(3))
    a2, b2, c2 = (constraints[trip[:, 1], k] for k in range(3))
    a3, b3, c3 = (constraints[trip[:, 2], k] for k in range(3))
    det = a1 * (b2 - b3) - b1 * (a2 - a3) + (a2 * b3 - a3 * b2)
    ok = np.abs(det) > PARALLEL_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        zx = (c1 * (b2 - b3) - b1 * (c2 - c3) + (c2 * b3 - c3 * b2)) / det
        zy = (a1 * (c2 - c3) - c1 * (a2 - a3) + (a2 * c3 - a3 * c2)) / det
        rr = (
            a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2) + c1 * (a2 * b3 - a3 * b2)
        ) / det
    ok &= np.isfinite(rr) & (rr > 0.0)
    slack = constraints[:, 2][None, :] - (
        np.outer(zx, constraints[:, 0]) + np.outer(zy, constraints[:, 1])
    )
    with np.errstate(invalid="ignore"):
        feas_tol = GEOM_EPS * np.maximum(1.0, rr)
        ok &= np.nanmin(slack, axis=1) >= rr - feas_tol
    if not bool(ok.any()):
        raise DegenerateTripleError("no feasible inscribed disc found")
    rr = np.where(ok, rr, -np.inf)
    best = int(np.argmax(rr))
    r = float(rr[best])
    z = (float(zx[best]), float(zy[best]))
    chosen = trip[best]
    residuals = tuple(float(abs(slack[best, e] - r)) for e in chosen)
    triple = tuple(sorted(edge_ids[e] for e in chosen))
    return Inball(center=z, radius=r, triple=triple, residuals=residuals)


def cell_of_point(
    point: Sequence[float],
    lines: Iterable[Line] | np.ndarray,
    r_sim: float,
) -> Cell:
    """Reconstructs the tessellation cell containing ``point``.

    The cell is built by clipping a regular ``BOUND_GON_SIDES``-gon inscribed
    in ``B(0, r_sim)`` against every line, keeping the side of ``point``
    each time.  Edges inherited from the bounding polygon are marked
    ``BOUNDARY`` in ``edge_lines``; the attached inball is the largest disc
    inscribed in the clipped polygon.

    Raises:
        PointOnLineError: if ``point`` lies within tolerance of some line.
        DomainError: if ``point`` is not strictly inside the bounding polygon.
    """
    arr = as_line_array(lines)
    p = np.asarray(point, dtype=float)
    scale = max(1.0, float(np.abs(p).max()))
    apothem = r_sim * math.cos(math.pi / BOUND_GON_SIDES)
    if math.hypot(p[0], p[1]) >= apothem - GEOM_EPS * scale:
        raise DomainError("point is not strictly inside the bounding polygon")
    theta, t = arr[:, 0], arr[:, 1]
    cs, sn = np.cos(theta), np.sin(theta)
    margins = cs * p[0] + sn * p[1] - t
    if arr.size and float(np.abs(margins).min()) <= GEOM_EPS * scale:
        raise PointOnLineError("point lies on a sampled line")
    ring, ids = _bound_polygon(r_sim)
    # Constraint rows (nx, ny, b) for every line, oriented so the kept side
    # is <x, n> <= b; boundary edges get their constraint from the ring.
    line_constraints: dict[int, tuple[float, float, float]] = {}
    for k in range(arr.shape[0]):
        sign = -1.0 if margins[k] > 0.0 else 1.0
        n_vec = np.array([sign * cs[k], sign * sn[k]])
        clipped = _clip_ring(ring, ids, n_vec, sign * t[k], k, GEOM_EPS * scale)
        if clipped is None:  # cannot happen: the kept side contains ``point``
            raise DegenerateTripleError("cell collapsed during clipping")
        ring, ids = clipped
        line_constraints[k] = (float(n_vec[0]), float(n_vec[1]), float(sign * t[k]))
    # Canonical orientation (already CCW) and starting vertex, ids in step.
    start = int(np.lexsort((ring[:, 1], ring[:, 0]))[0])
    ring = np.roll(ring, -start, axis=0)
    ids = ids[start:] + ids[:start]
    constraints = np.empty((len(ids), 3))
    for e, edge_id in enumerate(ids):
        if edge_id == BOUNDARY:
            d = ring[(e + 1) % len(ids)] - ring[e]
            norm = math.hypot(d[0], d[1])
            n_vec = (d[1] / norm, -d[0] / norm)
            constraints[e] = (n_vec[0], n_vec[1], n_vec[0] * ring[e, 0] + n_vec[1] * ring[e, 1])
        else:
            constraints[e] = line_constraints[edge_id]
    inball = _polygon_inball(ring, ids, constraints)
    return Cell(vertices=ring, edge_lines=tuple(ids), inball=inball)


def vertex_count(cell: Cell) -> int:
    """Number of vertices of a cell polygon (``>= 3``)."""
    return int(cell.vertices.shape[0])


def touches_boundary(cell: Cell) -> bool:
    """Whether any cell edge comes from the bounding window polygon."""
    return BOUNDARY in cell.edge_lines
