"""Sampling and hitting measures for the isotropic Poisson line process.

The process is normalised so that the measure of lines meeting a convex body
equals its perimeter (Crofton): lines hitting the disc ``B(0, R)`` have
measure ``2*pi*R``, directions are uniform on ``[0, 2*pi)`` and the signed
offset ``t`` is uniform on ``[0, R]``.  A simulation therefore draws a
Poisson(2*pi*R) number of lines inside the disc of interest.

Randomness comes from counter-based Philox streams keyed by
``(seed, stream_id)``: replications map to stream ids, so any replication
can be regenerated in isolation and results do not depend on scheduling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError
from .geometry import Line

TWO_PI = 2.0 * math.pi
_MASK64 = (1 << 64) - 1


class RngStream:
    """A counter-based random stream identified by ``(seed, stream_id)``.

    Two instances with the same key always produce the same draw sequence;
    distinct keys give statistically independent streams.  The underlying
    generator is created lazily and consumed by successive draws, so a fresh
    instance is needed to replay a stream from its start.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise DomainError("seed and stream_id must be non-negative integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            key = (self.seed & _MASK64) | ((self.stream_id & _MASK64) << 64)
            self._generator = np.random.Generator(np.random.Philox(key=key))
        return self._generator

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True, eq=False)
class LineSample:
    """Lines of one simulation hitting ``B(0, r_sim)``.

    Attributes:
        theta: ``(N,)`` normal directions in ``[0, 2*pi)``.
        t: ``(N,)`` offsets in ``[0, r_sim]``.
        r_sim: Radius of the sampled disc.
        seed: Seed of the generating stream.
        stream_id: Stream id of the generating stream.
    """

    theta: np.ndarray
    t: np.ndarray
    r_sim: float
    seed: int
    stream_id: int

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float)
        t = np.asarray(self.t, dtype=float)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "t", t)
        if theta.shape != t.shape or theta.ndim != 1:
            raise DomainError("theta and t must be 1-d arrays of equal length")
        if self.r_sim <= 0.0:
            raise DomainError(f"r_sim must be positive, got {self.r_sim!r}")
        if theta.size and (theta.min() < 0.0 or theta.max() >= TWO_PI):
            raise DomainError("theta values must lie in [0, 2*pi)")
        if t.size and (t.min() < 0.0 or t.max() > self.r_sim):
            raise DomainError("t values must lie in [0, r_sim]")

    @property
    def count(self) -> int:
        return int(self.theta.size)

    @property
    def lines(self) -> tuple[Line, ...]:
        return tuple(Line(float(th), float(tt)) for th, tt in zip(self.theta, self.t))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LineSample):
            return NotImplemented
        return (
            self.r_sim == other.r_sim
            and self.seed == other.seed
            and self.stream_id == other.stream_id
            and np.array_equal(self.theta, other.theta)
            and np.array_equal(self.t, other.t)
        )


def sample_lines(r_sim: float, stream: RngStream) -> LineSample:
    """Draws one line sample hitting ``B(0, r_sim)`` from ``stream``.

    The draw order is fixed (count, then all directions, then all offsets),
    so the output is a pure function of ``(stream key, draw index, r_sim)``.

    Args:
        r_sim: Radius of the disc to cover; the line count is
            Poisson(``2*pi*r_sim``).
        stream: Source stream; consumed, so back-to-back calls on the same
            instance give independent successive samples.
    """
    if r_sim <= 0.0:
        raise DomainError(f"r_sim must be positive, got {r_sim!r}")
    rng = stream.generator
    n = int(rng.poisson(TWO_PI * r_sim))
    theta = rng.uniform(0.0, TWO_PI, size=n)
    t = rng.uniform(0.0, r_sim, size=n)
    return LineSample(theta=theta, t=t, r_sim=float(r_sim), seed=stream.seed, stream_id=stream.stream_id)


def write_sample_csv(sample: LineSample, path: str | Path) -> Path:
    """Writes a sample as CSV (``theta,t`` header, 17 significant digits)
    plus a JSON metadata sidecar next to it.

    Returns the sidecar path.
    """
    path = Path(path)
    rows = "".join(f"{th:.17g},{tt:.17g}\n" for th, tt in zip(sample.theta, sample.t))
    path.write_text("theta,t\n" + rows)
    sidecar = path.with_suffix(".json")
    meta = {
        "seed": sample.seed,
        "stream_id": sample.stream_id,
        "R_sim": float(f"{sample.r_sim:.17g}"),
        "count": sample.count,
    }
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return sidecar


def read_sample_csv(path: str | Path) -> LineSample:
    """Reads a sample written by :func:`write_sample_csv` (CSV + sidecar)."""
    path = Path(path)
    sidecar = path.with_suffix(".json")
    if not sidecar.exists():
        raise DomainError(f"metadata sidecar {sidecar} not found")
    meta = json.loads(sidecar.read_text())
    text = path.read_text().strip().splitlines()
    if not text or text[0] != "theta,t":
        raise DomainError(f"{path} is not a line-sample CSV (missing 'theta,t' header)")
    data = np.array(
        [[float(x) for x in row.split(",")] for row in text[1:]], dtype=float
    ).reshape(-1, 2)
    sample = LineSample(
        theta=data[:, 0],
        t=data[:, 1],
        r_sim=float(meta["R_sim"]),
        seed=int(meta["seed"]),
        stream_id=int(meta["stream_id"]),
    )
    if sample.count != int(meta["count"]):
        raise DomainError(f"{path}: row count {sample.count} != sidecar count {meta['count']}")
    return sample


@dataclass(frozen=True)
class Disc:
    """A closed disc ``B(center, radius)``."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise DomainError(f"disc radius must be positive, got {self.radius!r}")


@dataclass(frozen=True)
class DiscSet:
    """A finite family of discs used as a hitting-measure test body."""

    discs: tuple[Disc, ...]

    def __post_init__(self) -> None:
        if not self.discs:
            raise DomainError("a DiscSet needs at least one disc")
        object.__setattr__(self, "discs", tuple(self.discs))

    def covering_radius(self) -> float:
        """Radius of the smallest origin-centred disc containing the family."""
        return max(math.hypot(*d.center) + d.radius for d in self.discs)


def phi_disc(radius: float) -> float:
    """Measure of lines hitting a disc of the given radius (``2*pi*r``)."""
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius!r}")
    return TWO_PI * radius


def two_disc_overlap(r1: float, r2: float, h: float) -> float:
    """Half the measure of lines meeting both of two disjoint discs.

    For discs of radii ``r1``, ``r2`` with centre distance ``h >= r1 + r2``
    the measure of lines hitting both equals ``2 * two_disc_overlap``; the
    function itself is symmetric in the radii, positive, strictly decreasing
    in ``h`` and vanishes as ``h -> inf``.

    Raises:
        DomainError: for non-positive radii or overlapping discs.
    """
    if r1 <= 0.0 or r2 <= 0.0:
        raise DomainError("disc radii must be positive")
    if h < r1 + r2:
        raise DomainError(f"discs overlap: h={h!r} < r1+r2={r1 + r2!r}")
    ssum = (r1 + r2) / h
    sdif = (r1 - r2) / h
    return (
        (r1 + r2) * math.asin(ssum)
        - (r1 - r2) * math.asin(sdif)
        - h * (math.sqrt(1.0 - sdif * sdif) - math.sqrt(1.0 - ssum * ssum))
    )


def phi_disjoint_pair(r1: float, r2: float, h: float) -> float:
    """Measure of lines hitting the union of two disjoint discs.

    Inclusion-exclusion: ``2*pi*(r1 + r2) - 2 * two_disc_overlap(r1, r2, h)``.
    """
    return TWO_PI * (r1 + r2) - 2.0 * two_disc_overlap(r1, r2, h)


def _union_hit_length(discs: Sequence[Disc], cos_t: float, sin_t: float) -> float:
    """Length of ``{t >= 0 : H(theta, t) hits the union}`` for one direction."""
    intervals = []
    for d in discs:
        mid = cos_t * d.center[0] + sin_t * d.center[1]
        lo = max(mid - d.radius, 0.0)
        hi = mid + d.radius
        if hi > lo:
            intervals.append((lo, hi))
    if not intervals:
        return 0.0
    intervals.sort()
    total = 0.0
    cur_lo, cur_hi = intervals[0]
    for lo, hi in intervals[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    return total + (cur_hi - cur_lo)


def _adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    fa: float,
    b: float,
    fb: float,
    m: float,
    fm: float,
    whole: float,
    tol: float,
    depth: int,
) -> float:
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_simpson(
        f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1
    ) + _adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)


def phi_union_quadrature(
    discs: DiscSet | Sequence[Disc],
    tol: float = 1e-8,
) -> float:
    """Hitting measure of a union of discs by angular quadrature.

    Integrates the per-direction length of ``{t >= 0}`` offsets whose line
    meets the union over ``theta in [0, 2*pi)`` with adaptive Simpson
    panels.  This is the reference route used to validate the closed forms
    (single disc, disjoint pair) and to evaluate unions with no closed form.

    Args:
        discs: The disc family.
        tol: Absolute tolerance passed to the adaptive integrator.
    """
    family = discs.discs if isinstance(discs, DiscSet) else tuple(discs)
    if not family:
        raise DomainError("need at least one disc")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")

    def f(theta: float) -> float:
        return _union_hit_length(family, math.cos(theta), math.sin(theta))

    panels = 64
    edges = np.linspace(0.0, TWO_PI, panels + 1)
    values = [f(x) for x in edges]
    total = 0.0
    for k in range(panels):
        a, b = float(edges[k]), float(edges[k + 1])
        m = 0.5 * (a + b)
        fm = f(m)
        whole = (b - a) / 6.0 * (values[k] + 4.0 * fm + values[k + 1])
        total += _adaptive_simpson(
            f, a, values[k], b, values[k + 1], m, fm, whole, tol / panels, depth=40
        )
    return total


@dataclass(frozen=True)
class SeparationReport:
    """Outcome of the analytic separation bounds on a disc family.

    ``far_*`` covers pairs with centre distance above ``R**3`` (``R`` the
    largest radius), ``close_*`` covers the regime where every radius lies
    in ``[v, (1+eps)*v]``, and ``envelope_*`` is the two-sided sandwich of
    the union's hitting measure.  ``*_excess`` values are the largest amount
    by which a bound was exceeded (``<= 0`` means all bounds hold).
    """

    far_pairs: int
    far_excess: float
    close_applicable: bool
    close_pairs: int
    close_excess: float
    envelope_low_excess: float
    envelope_high_excess: float
    all_ok: bool


def check_separation_bounds(
    discs: DiscSet | Sequence[Disc],
    v: float,
    eps: float,
    tol: float = 1e-8,
) -> SeparationReport:
    """Checks analytic bounds on pairwise hitting-measure overlaps.

    For radii in ``[v, R]`` and pairwise disjoint discs:

    * far pairs (centre distance ``h > R**3``): the overlap measure
      ``2 * two_disc_overlap`` is at most ``8*R*asin(2/R**2)`` (only
      meaningful when ``R**2 >= 2``);
    * if additionally ``R <= (1+eps)*v``, every pair obeys
      ``2 * two_disc_overlap <= 2*pi*min(r1, r2) - (4 - eps*pi)*v``;
    * the union measure always satisfies
      ``max_i 2*pi*r_i <= phi(union) <= sum_i 2*pi*r_i``.

    Raises:
        DomainError: if some radius is below ``v``, some pair of discs
            overlaps, or ``v``/``eps`` are non-positive.
    """
    family = discs.discs if isinstance(discs, DiscSet) else tuple(discs)
    if v <= 0.0 or eps <= 0.0:
        raise DomainError("v and eps must be positive")
    radii = [d.radius for d in family]
    if min(radii) < v:
        raise DomainError(f"all radii must be >= v={v!r}")
    big_r = max(radii)
    far_pairs = 0
    far_excess = -math.inf
    close_applicable = big_r <= (1.0 + eps) * v
    close_pairs = 0
    close_excess = -math.inf
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            di, dj = family[i], family[j]
            h = math.hypot(di.center[0] - dj.center[0], di.center[1] - dj.center[1])
            if h < di.radius + dj.radius:
                raise DomainError(f"discs {i} and {j} overlap (h={h!r})")
            mu = 2.0 * two_disc_overlap(di.radius, dj.radius, h)
            if h > big_r**3 and big_r * big_r >= 2.0:
                far_pairs += 1
                far_excess = max(far_excess, mu - 8.0 * big_r * math.asin(2.0 / big_r**2))
            if close_applicable:
                close_pairs += 1
                bound = TWO_PI * min(di.radius, dj.radius) - (4.0 - eps * math.pi) * v
                close_excess = max(close_excess, mu - bound)
    phi_u = phi_union_quadrature(family, tol=tol)
    slack = 10.0 * tol
    low_excess = max(TWO_PI * r for r in radii) - phi_u - slack
    high_excess = phi_u - sum(TWO_PI * r for r in radii) - slack
    all_ok = (
        (far_pairs == 0 or far_excess <= 0.0)
        and (close_pairs == 0 or close_excess <= 0.0)
        and low_excess <= 0.0
        and high_excess <= 0.0
    )
    return SeparationReport(
        far_pairs=far_pairs,
        far_excess=far_excess if far_pairs else float("nan"),
        close_applicable=close_applicable,
        close_pairs=close_pairs,
        close_excess=close_excess if close_pairs else float("nan"),
        envelope_low_excess=low_excess,
        envelope_high_excess=high_excess,
        all_ok=all_ok,
    )
