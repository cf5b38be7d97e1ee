"""Lattice tail sums ``sum_{|j|_inf >= N} |j|^-(n+eps)`` and their explicit majorant.

:func:`tail_sum` sums shells directly up to a cutoff ``R`` and replaces the
rest by the integral over ``{|x|_inf >= R - 1/2}``; the midpoint-rule error of
that replacement is bounded through the Hessian of ``|x|^-s`` (spectral norm
``s(s+1)|x|^(-s-2)``), which gives a remainder of order ``R^-(eps+2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import BudgetExceeded, InvalidParameter

MAX_DIRECT_POINTS = 2 * 10**8


@dataclass(frozen=True)
class TailEstimate:
    eps: float
    N: int
    bound: float


@dataclass(frozen=True)
class TailSum:
    value: float
    error: float  # certified |true - value| <= error
    cutoff: int

    @property
    def lower(self) -> float:
        return self.value - self.error

    @property
    def upper(self) -> float:
        return self.value + self.error


def _check(n, eps, N):
    if int(n) != n or n < 1:
        raise InvalidParameter(f"dimension must be a positive integer, got {n}")
    if not eps > 0:
        raise InvalidParameter(f"eps must be positive, got {eps}")
    if int(N) != N or N < 1:
        raise InvalidParameter(f"N must be a positive integer, got {N}")


def lemma_tail_bound(n: int, eps: float, N: int) -> TailEstimate:
    """``2^n n^(n+eps) (2 + 2^(eps/n) n/eps)^n N^-eps``."""
    _check(n, eps, N)
    bound = 2.0**n * float(n) ** (n + eps) * (2.0 + 2.0 ** (eps / n) * n / eps) ** n * float(N) ** (-eps)
    return TailEstimate(float(eps), int(N), bound)


@lru_cache(maxsize=256)
def _face_integral(n: int, s: float) -> tuple[float, float]:
    """``int_{[-1,1]^(n-1)} (1 + |u|^2)^(-s/2) du`` and an error estimate.

    The integrand is analytic in a strip of half-width 1 around the real
    cube, so tensor Gauss-Legendre converges geometrically; the error is the
    gap between two rule sizes.
    """
    if n == 1:
        return 1.0, 0.0
    sizes = (32, 64) if n <= 3 else (12, 24)

    def rule(m):
        x, w = np.polynomial.legendre.leggauss(m)
        grids = np.meshgrid(*([x] * (n - 1)), indexing="ij")
        weights = np.meshgrid(*([w] * (n - 1)), indexing="ij")
        r2 = sum(g * g for g in grids)
        wt = np.prod(np.stack(weights), axis=0)
        return float(np.sum(wt * (1.0 + r2) ** (-s / 2)))

    coarse, fine = rule(sizes[0]), rule(sizes[1])
    return fine, abs(fine - coarse) + 4e-16 * abs(fine)


def outer_integral(n: int, eps: float, a: float) -> tuple[float, float]:
    """``int_{|x|_inf >= a} |x|^-(n+eps) dx`` (value, error) via cube-polar coordinates."""
    face, err = _face_integral(n, n + eps)
    c = 2.0 * n / eps * a ** (-eps)
    return c * face, c * err


def midpoint_error(n: int, eps: float, R: int) -> float:
    """Bound on ``|sum_{|j|_inf >= R} f(j) - int_{|x|_inf >= R-1/2} f|`` for f = |x|^-(n+eps)."""
    s = n + eps
    h = math.sqrt(n) / 2
    if R <= h:
        return math.inf
    shell = 2 * n * 3.0 ** (n - 1) * (R ** -(eps + 3) + R ** -(eps + 2) / (eps + 2))
    return n / 24.0 * s * (s + 1) * (1 - h / R) ** -(s + 2) * shell


def direct_shell_sum(n: int, eps: float, N: int, R: int) -> float:
    """``sum_{N <= |j|_inf < R} |j|^-(n+eps)``, summed slab by slab along axis 0."""
    if R <= N:
        return 0.0
    if (2 * R - 1) ** n > MAX_DIRECT_POINTS:
        raise BudgetExceeded(f"direct summation to radius {R} in dimension {n} exceeds the point budget")
    s = n + eps
    if n == 1:
        t = np.arange(N, R, dtype=np.float64)
        return 2.0 * math.fsum((t ** -s).tolist())
    ax = np.arange(-(R - 1), R, dtype=np.int64)
    rest = np.meshgrid(*([ax] * (n - 1)), indexing="ij")
    rest_sq = sum(g * g for g in rest).ravel()
    rest_sup = np.max(np.abs(np.stack([g.ravel() for g in rest])), axis=0)
    parts = []
    for t in range(0, R):
        sq = rest_sq + t * t
        sup = np.maximum(rest_sup, t)
        mask = sup >= N
        if t == 0:
            mask &= sq > 0
        if not mask.any():
            continue
        slab = float(np.sum(sq[mask].astype(np.float64) ** (-s / 2)))
        parts.append(slab if t == 0 else 2.0 * slab)
    return math.fsum(parts)


def tail_sum_at_cutoff(n: int, eps: float, N: int, R: int) -> TailSum:
    """Direct sum below ``R`` plus the integral remainder beyond it, with its error bound."""
    _check(n, eps, N)
    R = max(int(R), int(N))
    direct = direct_shell_sum(n, eps, N, R)
    integral, qerr = outer_integral(n, eps, R - 0.5)
    err = midpoint_error(n, eps, R) + qerr
    return TailSum(direct + integral, err, R)


def _error_at(n, eps, R):
    return midpoint_error(n, eps, R) + outer_integral(n, eps, R - 0.5)[1]


def tail_sum(n: int, eps: float, N: int, precision: float = 1e-6) -> float:
    """``sum_{|j|_inf >= N} |j|^-(n+eps)`` to within ``precision`` (absolute)."""
    return tail_sum_certified(n, eps, N, precision).value


def tail_sum_certified(n: int, eps: float, N: int, precision: float = 1e-6) -> TailSum:
    _check(n, eps, N)
    if not precision > 0:
        raise InvalidParameter(f"precision must be positive, got {precision}")
    R = max(int(N), math.ceil(math.sqrt(n)) + 1)
    while _error_at(n, eps, R) > precision:
        R = int(R * 1.25) + 1
        if (2 * R - 1) ** n > MAX_DIRECT_POINTS:
            raise BudgetExceeded(
                f"precision {precision:g} for n={n}, eps={eps:g}, N={N} needs cutoff beyond the point budget"
            )
    return tail_sum_at_cutoff(n, eps, N, R)


def tail_sum_upper(n: int, eps: float, N: int) -> float:
    """Cheap certified upper bound: no direct terms, integral remainder from N."""
    _check(n, eps, N)
    R = max(int(N), math.ceil(math.sqrt(n)) + 1)
    res = tail_sum_at_cutoff(n, eps, N, R)
    return min(res.upper, lemma_tail_bound(n, eps, N).bound)
