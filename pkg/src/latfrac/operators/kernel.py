"""Direct evaluation of T_{alpha,m} and the discrete Riesz potential.

Every output value is the exact finite sum over the support of the input,
traversed in row-major order.  Work is chunked over output points only, so
a value never depends on how the outputs were batched.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import InvalidParameter, SpecError
from ..lattice import CubeWindow, FractionalSpec, LatticeSequence, matrix_norm_bounds, validate_spec
from .tails import tail_sum_upper

CHUNK_ELEMENTS = 1 << 21


@dataclass
class OperatorResult:
    values: LatticeSequence
    tail_bound: float | None = None
    q: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def window(self) -> CubeWindow:
        return self.values.window

    def to_json(self) -> dict:
        out = self.values.to_json()
        meta = {"tail_bound": self.tail_bound, "q": self.q, "window": self.window.to_json()}
        meta.update({k: v for k, v in self.metadata.items() if k not in meta})
        out["metadata"] = meta
        return out


def _out_points(out) -> np.ndarray:
    if isinstance(out, CubeWindow):
        return out.points()
    return np.atleast_2d(np.asarray(out, dtype=np.int64))


def default_window(spec: FractionalSpec, b: LatticeSequence) -> CubeWindow:
    """Origin-centered window of radius ``4 ceil(D_inv) (r + |c|_inf) + 16``
    where ``c, r`` are the center and radius of the support's bounding cube."""
    box = b.bounding_window()
    reach = 0 if box is None else box.radius + max(abs(c) for c in box.center)
    return CubeWindow.origin(spec.n, 4 * math.ceil(spec.d_inv()) * reach + 16)


def _kernel_sums(pts, vals, outs, matrices, exponents) -> np.ndarray:
    """sum_i vals[i] / prod_k |pts[i] - A_k out|^a_k, skipping i = A_k out."""
    res = np.zeros(len(outs))
    if len(pts) == 0 or len(outs) == 0:
        return res
    step = max(1, CHUNK_ELEMENTS // max(1, len(pts)))
    mats = [np.asarray(A.array) for A in matrices]
    for start in range(0, len(outs), step):
        chunk = outs[start : start + step]
        logk = np.zeros((len(chunk), len(pts)))
        hit = np.zeros((len(chunk), len(pts)), dtype=bool)
        for A, a in zip(mats, exponents):
            img = chunk @ A.T
            diff = pts[None, :, :] - img[:, None, :]
            sq = np.einsum("wsn,wsn->ws", diff, diff)
            zero = sq == 0
            hit |= zero
            # |d|^a = exp((a/2) log |d|^2) with |d|^2 an exact integer
            logk += (0.5 * a) * np.log(np.where(zero, 1, sq).astype(np.float64))
        kern = np.exp(-logk)
        kern[hit] = 0.0
        res[start : start + len(chunk)] = np.sum(kern * vals[None, :], axis=1)
    return res


def evaluate_T(spec: FractionalSpec, b: LatticeSequence, points) -> np.ndarray:
    """Values of ``T b`` at arbitrary lattice points (no validation)."""
    pts, vals = b.support()
    return _kernel_sums(pts, vals, _out_points(points), spec.matrices, spec.exponents)


def _require_valid(spec):
    report = validate_spec(spec)
    if not report.valid:
        raise SpecError("invalid operator spec: " + "; ".join(report.violations))


def apply_T(spec: FractionalSpec, b: LatticeSequence, out: CubeWindow | None = None, q: float | None = None) -> OperatorResult:
    """Evaluate ``T_{alpha,m} b`` on the cube ``out``.

    With ``q`` given, ``tail_bound`` certifies the l^q mass (q-th power sum)
    of ``T b`` outside ``out``.
    """
    _require_valid(spec)
    if b.n != spec.n:
        raise InvalidParameter(f"sequence dimension {b.n} does not match spec dimension {spec.n}")
    policy = "caller"
    if out is None:
        out = default_window(spec, b)
        policy = "default"
    t0 = time.perf_counter()
    values = evaluate_T(spec, b, out)
    res = OperatorResult(
        LatticeSequence.dense(out, values),
        metadata={"spec": spec.fingerprint(), "window_policy": policy, "seconds": time.perf_counter() - t0},
    )
    if q is not None:
        tail = lq_tail_bound(spec, b, out, q)
        res.tail_bound, res.q = tail.tail, float(q)
        res.metadata["tail_divergent"] = tail.divergent
    return res


def apply_riesz(b: LatticeSequence, alpha: float, out: CubeWindow | None = None, q: float | None = None) -> OperatorResult:
    """Discrete Riesz potential ``sum_{i != j} b(i) |i - j|^(alpha - n)``.

    Evaluated through floating distances and ``**``, independently of the
    log-domain kernel in :func:`apply_T`.
    """
    n = b.n
    if not 0 < alpha < n:
        raise InvalidParameter(f"Riesz potential needs 0 < alpha < n, got alpha={alpha}, n={n}")
    spec = FractionalSpec.riesz(n, alpha)
    if out is None:
        out = default_window(spec, b)
    outs = out.points()
    pts, vals = b.support()
    res = np.zeros(len(outs))
    if len(pts):
        step = max(1, CHUNK_ELEMENTS // len(pts))
        for start in range(0, len(outs), step):
            chunk = outs[start : start + step]
            dist = np.linalg.norm((pts[None, :, :] - chunk[:, None, :]).astype(np.float64), axis=2)
            same = dist == 0
            kern = np.where(same, 0.0, np.where(same, 1.0, dist) ** (alpha - n))
            res[start : start + len(chunk)] = np.sum(kern * vals[None, :], axis=1)
    result = OperatorResult(LatticeSequence.dense(out, res), metadata={"spec": spec.fingerprint(), "riesz_alpha": alpha})
    if q is not None:
        tail = lq_tail_bound(spec, b, out, q)
        result.tail_bound, result.q = tail.tail, float(q)
        result.metadata["tail_divergent"] = tail.divergent
    return result


# ---------------------------------------------------------------------------
# l^q norms over a window plus certified tails


class TailBound(NamedTuple):
    tail: float
    divergent: bool
    decay: float  # pointwise decay exponent used for the majorant
    constant: float  # pointwise majorant is constant * |j - c|^-decay


class TruncatedNorm(NamedTuple):
    norm: float
    tail: float
    divergent: bool

    def upper(self, q: float) -> float:
        """Certified upper bound of the full l^q norm."""
        return (self.norm**q + self.tail) ** (1.0 / q)


def _support_geometry(b: LatticeSequence):
    pts, vals = b.support()
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    corners = np.array(np.meshgrid(*[[l, h] for l, h in zip(lo, hi)], indexing="ij")).reshape(b.n, -1).T
    mid = (lo + hi) / 2.0
    reach = float(np.max(np.linalg.norm(pts - mid, axis=1)))
    return pts, vals, corners, reach


def lq_tail_bound(spec: FractionalSpec, b: LatticeSequence, window: CubeWindow, q: float) -> TailBound:
    """Bound on ``sum_{j outside window} |T b(j)|^q``.

    Outside the window every factor obeys ``|i - A_k j| >= kappa_k |j - c|``
    (``c`` the window center), from the lower singular bound of ``A_k`` and
    the distance of ``A_k^-1 (hull supp b)`` to ``c``.  That gives decay
    ``|j - c|^-(n - alpha)``; when ``sum b = 0`` exactly, one more power is
    gained from the gradient of the kernel across the support hull.
    """
    if not q > 0:
        raise InvalidParameter(f"q must be positive, got {q}")
    n = spec.n
    pts, vals = b.support()
    if len(pts) == 0:
        return TailBound(0.0, False, math.inf, 0.0)
    _, _, corners, reach = _support_geometry(b)
    c = np.asarray(window.center, dtype=np.float64)
    edge = window.radius + 1
    kappas = []
    for A in spec.matrices:
        sigma = matrix_norm_bounds(A).lower
        rho = max(
            math.sqrt(sum((float(x) - ci) ** 2 for x, ci in zip(A.apply_inverse(tuple(int(v) for v in x0)), c)))
            for x0 in corners
        ) * (1 + 1e-12)
        if rho >= edge:
            raise InvalidParameter(
                f"window radius {window.radius} does not clear the preimage of the support (distance {rho:.3g})"
            )
        kappas.append(sigma * (1 - rho / edge) * (1 - 1e-12))
    l1 = math.fsum(np.abs(vals).tolist())
    base = math.prod(k ** (-a) for k, a in zip(kappas, spec.exponents))
    if math.fsum(vals.tolist()) == 0.0:
        decay = n - spec.alpha + 1
        const = l1 * reach * base * sum(a / k for k, a in zip(kappas, spec.exponents))
    else:
        decay = n - spec.alpha
        const = l1 * base
    eps = decay * q - n
    if eps <= 0:
        return TailBound(math.inf, True, decay, const)
    return TailBound(const**q * tail_sum_upper(n, eps, edge), False, decay, const)


def truncated_lq_norm(r: OperatorResult, q: float, b: LatticeSequence, spec: FractionalSpec) -> TruncatedNorm:
    """l^q norm of ``r`` over its window and a certified bound for the rest."""
    if not q > 0:
        raise InvalidParameter(f"q must be positive, got {q}")
    vals = np.abs(r.values.dense_values().ravel())
    top = float(vals.max()) if vals.size else 0.0
    norm = 0.0 if top == 0 else top * math.fsum(((vals / top) ** q).tolist()) ** (1.0 / q)
    tail = lq_tail_bound(spec, b, r.window, q)
    return TruncatedNorm(norm, tail.tail, tail.divergent)
