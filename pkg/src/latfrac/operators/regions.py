"""Four-region split of ``T_{0,2} b(j0)`` behind the l^p boundedness argument for alpha = 0.

For ``j0 != 0`` the support of ``b`` (minus ``{A_1 j0, A_2 j0}``) is cut into

* ``I_k``: ``0 < |i - A_k j0| <= (d/2)|j0|`` for k = 1, 2,
* ``I_3``: ``|i| < 2 sqrt(n) D |j0|`` outside ``I_1, I_2``,
* ``I_4``: the rest,

with ``d`` a certified lower bound of ``min_{|x|=1} |(A_1 - A_2) x|`` and
``D`` a certified upper bound of ``max ||A_k||``.  Points equidistant
enough to fall in both ``I_1`` and ``I_2`` are counted in ``I_1`` so the
four pieces partition the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter
from ..lattice import FractionalSpec, LatticeSequence, as_index, lp_norm, matrix_norm_bounds, validate_spec
from .maximal import maximal_at
from .tails import lemma_tail_bound


def i1_constant(a1: float, a2: float) -> float:
    """``2^(a2 + 2 a1) * sum_{k>=0} 2^(-a2 k)`` with the series in closed form."""
    return 2.0 ** (a2 + 2 * a1) / (1.0 - 2.0 ** (-a2))


def i3_constant(n: int, d: float, D: float) -> float:
    """Explicit constant C with ``sum_{I_3} <= C (Mb)(j0)``, valid for |j0| >= 1."""
    return (2.0 / d) ** n * (4 * math.sqrt(n) * D + 3) ** n


def i4_constant(n: int, D: float, p: float) -> float:
    """Explicit C with ``sum_{I_4} <= C ||b||_p |j0|^(-n/p)``.

    Uses ``|i - A_k j0| >= (1 - 1/(2 sqrt n)) |i|`` on ``I_4`` and Hoelder
    with the lattice tail majorant at exponent ``n(p' - 1)``.
    """
    shrink = (2 * math.sqrt(n) / (2 * math.sqrt(n) - 1)) ** n
    if p == 1:
        return shrink * (2 * math.sqrt(n) * D) ** (-n)
    pp = p / (p - 1)
    eps = n * (pp - 1)
    return shrink * lemma_tail_bound(n, eps, 1).bound ** (1 / pp) * (2 * D) ** (-n / p)


@dataclass
class RegionDiagnostic:
    j0: tuple[int, ...]
    d_sep: float
    D_fwd: float
    p: float
    partial: tuple[float, float, float, float]  # signed sums over I_1..I_4
    absolute: tuple[float, float, float, float]  # sums of |b(i)| * kernel
    counts: tuple[int, int, int, int]
    total: float  # (T b)(j0)
    maximal: tuple[float, float, float]  # (Mb)(A_1 j0), (Mb)(A_2 j0), (Mb)(j0)
    bound_i1: float
    bound_i2: float
    bound_i3: float
    bound_i4: float
    fitted_i3: float
    fitted_i4: float

    def holds(self, slack: float = 1e-9) -> dict[str, bool]:
        bounds = (self.bound_i1, self.bound_i2, self.bound_i3, self.bound_i4)
        return {f"I{k + 1}": a <= b * (1 + slack) for k, (a, b) in enumerate(zip(self.absolute, bounds))}


def region_decompose_alpha0(spec: FractionalSpec, b: LatticeSequence, j0, p: float = 2.0) -> RegionDiagnostic:
    j0 = as_index(j0)
    if not validate_spec(spec).valid:
        raise InvalidParameter("spec is not valid")
    if spec.alpha != 0 or spec.m != 2:
        raise InvalidParameter("the region diagnostic needs alpha = 0 and m = 2")
    if all(x == 0 for x in j0):
        raise InvalidParameter("j0 must be nonzero (the auxiliary operator vanishes at the origin)")
    if not p >= 1:
        raise InvalidParameter(f"p must be >= 1, got {p}")
    n = spec.n
    A1, A2 = spec.matrices
    a1, a2 = spec.exponents
    d = matrix_norm_bounds(A1 - A2).lower
    D = spec.d_fwd()
    jv = np.asarray(j0, dtype=np.int64)
    c1, c2 = A1.array @ jv, A2.array @ jv
    norm_j0 = math.sqrt(float(jv @ jv))

    pts, vals = b.support()
    sq1 = np.sum((pts - c1) ** 2, axis=1)
    sq2 = np.sum((pts - c2) ** 2, axis=1)
    keep = (sq1 > 0) & (sq2 > 0)
    r_in = (d / 2.0 * norm_j0) ** 2
    in1 = keep & (sq1 <= r_in)
    in2 = keep & ~in1 & (sq2 <= r_in)
    near = np.sum(pts.astype(np.float64) ** 2, axis=1) < (2 * math.sqrt(n) * D * norm_j0) ** 2
    in3 = keep & ~in1 & ~in2 & near
    in4 = keep & ~in1 & ~in2 & ~near

    kern = np.zeros(len(pts))
    kern[keep] = np.exp(-(0.5 * a1) * np.log(sq1[keep].astype(np.float64)) - (0.5 * a2) * np.log(sq2[keep].astype(np.float64)))
    signed = vals * kern
    mag = np.abs(vals) * kern
    parts = [in1, in2, in3, in4]
    partial = tuple(math.fsum(signed[m].tolist()) for m in parts)
    absolute = tuple(math.fsum(mag[m].tolist()) for m in parts)

    M1, M2, M0 = maximal_at(b, 0.0, np.stack([c1, c2, jv]))
    bnorm = lp_norm(b, p)
    scale4 = bnorm * norm_j0 ** (-n / p)
    return RegionDiagnostic(
        j0=j0,
        d_sep=d,
        D_fwd=D,
        p=p,
        partial=partial,
        absolute=absolute,
        counts=tuple(int(m.sum()) for m in parts),
        total=math.fsum(signed[keep].tolist()),
        maximal=(float(M1), float(M2), float(M0)),
        bound_i1=i1_constant(a1, a2) * M1,
        bound_i2=i1_constant(a2, a1) * M2,
        bound_i3=i3_constant(n, d, D) * M0,
        bound_i4=i4_constant(n, D, p) * scale4,
        fitted_i3=absolute[2] / M0 if M0 > 0 else 0.0,
        fitted_i4=absolute[3] / scale4 if scale4 > 0 else 0.0,
    )
