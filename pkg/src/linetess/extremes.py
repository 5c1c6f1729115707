"""Limit laws and counting tools for extreme cell inradii.

The smallest inradii in a window of area ``rho``, rescaled by ``2*pi**2*rho``,
follow a Weibull-type law; the largest, centred at ``log(pi*rho)/(2*pi)``,
follow a Gumbel-type law.  Both laws extend to the r-th order statistic
through Poisson counting: the number of cells whose inradius exceeds the
Gumbel threshold converges to a Poisson variable with mean ``exp(-t)``.

This module collects those limits in closed form, the threshold algebra, the
moment identities used to test Poisson convergence, and the cluster profile
of exceedance centres (connected components of inflated balls) that controls
the dependence structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, EmptySampleError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Threshold:
    """An exceedance threshold ``v = (log(pi*rho) + t) / (2*pi)``.

    ``tau = exp(-t)`` is the limiting mean number of cells in a window of
    area ``rho`` whose inradius exceeds ``v``.
    """

    rho: float
    t: float
    v: float

    @property
    def tau(self) -> float:
        return math.exp(-self.t)


def threshold_v(rho: float, t: float) -> Threshold:
    """Builds the Gumbel-scaling threshold for window area ``rho``.

    Raises:
        DomainError: if ``rho <= 0`` or the resulting radius is ``<= 0``.
    """
    if rho <= 0.0:
        raise DomainError(f"rho must be positive, got {rho!r}")
    v = (math.log(math.pi * rho) + t) / TWO_PI
    if v <= 0.0:
        raise DomainError(f"threshold radius is not positive (rho={rho!r}, t={t!r})")
    return Threshold(rho=float(rho), t=float(t), v=v)


def min_law_survival(t: float, rank: int = 1) -> float:
    """Limit of ``P(r-th smallest inradius >= t / (2*pi**2*rho))``.

    Equals ``exp(-t) * sum_{k < rank} t**k / k!``, i.e. the probability that
    a Poisson(``t``) count stays below ``rank``.
    """
    _check_rank(rank)
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    return math.exp(-t) * _poisson_partial_sum(t, rank)


def max_law_cdf(t: float, rank: int = 1) -> float:
    """Limit of ``P(r-th largest inradius <= (log(pi*rho) + t) / (2*pi))``.

    Equals ``exp(-exp(-t)) * sum_{k < rank} exp(-k*t) / k!``, i.e. the
    probability that a Poisson(``exp(-t)``) count stays below ``rank``.
    """
    _check_rank(rank)
    tau = math.exp(-t)
    return math.exp(-tau) * _poisson_partial_sum(tau, rank)


def typical_inradius_cdf(v: float) -> float:
    """Distribution function ``1 - exp(-2*pi*v)`` of the typical cell inradius."""
    if v <= 0.0:
        return 0.0
    return -math.expm1(-TWO_PI * v)


def _poisson_partial_sum(lam: float, rank: int) -> float:
    total = 0.0
    term = 1.0
    for k in range(rank):
        if k > 0:
            term *= lam / k
        total += term
    return total


def _check_rank(rank: int) -> None:
    if not isinstance(rank, (int, np.integer)) or rank < 1:
        raise DomainError(f"rank must be a positive integer, got {rank!r}")


def exceedance_count(radii: Sequence[float] | np.ndarray, v: float) -> int:
    """Number of radii strictly above the threshold ``v``."""
    if v <= 0.0:
        raise DomainError(f"threshold must be positive, got {v!r}")
    arr = np.asarray(radii, dtype=float)
    return int(np.count_nonzero(arr > v))


@dataclass(frozen=True)
class ClusterProfile:
    """Component-size histogram of a finite point cluster.

    ``sizes[k - 1]`` is the number of connected components containing
    exactly ``k`` points, for ``k = 1 .. K``; the weighted total always
    returns the number of points.
    """

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        total = sum((k + 1) * n for k, n in enumerate(self.sizes))
        if total != len(self.sizes):
            raise DomainError("component sizes do not account for every point")

    @property
    def n_points(self) -> int:
        return len(self.sizes)

    @property
    def n_components(self) -> int:
        return sum(self.sizes)


def cluster_profile(centers: Sequence[Sequence[float]] | np.ndarray, big_r: float) -> ClusterProfile:
    """Connected-component profile of centres inflated to balls of radius ``big_r**3``.

    Two centres belong to the same component when their inflated balls
    intersect, i.e. when their distance is at most ``2 * big_r**3``.

    Args:
        centers: ``(K, 2)`` array-like of exceedance centres (``K >= 0``).
        big_r: Inflation scale; the balls have radius ``big_r**3``.
    """
    if big_r <= 0.0:
        raise DomainError(f"big_r must be positive, got {big_r!r}")
    pts = np.asarray(centers, dtype=float).reshape(-1, 2)
    k_points = pts.shape[0]
    if k_points == 0:
        return ClusterProfile(sizes=())
    reach = 2.0 * big_r**3
    parent = list(range(k_points))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    diff = pts[:, None, :] - pts[None, :, :]
    close = np.hypot(diff[..., 0], diff[..., 1]) <= reach
    for i in range(k_points):
        for j in range(i + 1, k_points):
            if close[i, j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    counts: dict[int, int] = {}
    for i in range(k_points):
        root = find(i)
        counts[root] = counts.get(root, 0) + 1
    sizes = [0] * k_points
    for c in counts.values():
        sizes[c - 1] += 1
    return ClusterProfile(sizes=tuple(sizes))


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind ``S(n, k)`` (exact integer).

    Computed by the recurrence ``S(n, k) = k*S(n-1, k) + S(n-1, k-1)``.
    """
    if n < 0 or k < 0:
        raise DomainError("n and k must be non-negative")
    if k > n:
        return 0
    if n == 0:
        return 1  # S(0, 0)
    row = [1] + [0] * k  # row for n = 0 over columns 0..k
    for m in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(m, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def poisson_moment(n: int, tau: float) -> float:
    """Raw moment ``E[X**n]`` of ``X ~ Poisson(tau)``.

    Uses the Stirling expansion ``sum_K S(n, K) * tau**K`` (the Touchard
    polynomial), exact up to float rounding.
    """
    if n < 0:
        raise DomainError(f"moment order must be >= 0, got {n!r}")
    if tau < 0.0:
        raise DomainError(f"tau must be >= 0, got {tau!r}")
    if n == 0:
        return 1.0
    return float(sum(stirling2(n, k) * tau**k for k in range(1, n + 1)))


def ks_distance(samples: Sequence[float] | np.ndarray, cdf: Callable[[float], float]) -> float:
    """Kolmogorov-Smirnov distance between an empirical sample and a CDF.

    Evaluates ``max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)`` over the order
    statistics, the exact sup-distance for a right-continuous ``F``.

    Raises:
        EmptySampleError: on an empty sample.
    """
    arr = np.sort(np.asarray(samples, dtype=float).ravel())
    n = arr.size
    if n == 0:
        raise EmptySampleError("cannot compute a KS distance from zero samples")
    f_vals = np.array([cdf(float(x)) for x in arr])
    upper = np.arange(1, n + 1) / n - f_vals
    lower = f_vals - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))
