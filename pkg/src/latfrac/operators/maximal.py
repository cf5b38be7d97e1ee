"""Centered fractional maximal operator on Z^n.

``(M_alpha b)(j) = max_N (2N+1)^-(n - alpha) * sum_{|i-j|_inf <= N} |b(i)|``.

Only radii at which the cube picks up a new support point can be
maximizers (in between, the sum is flat and the normalizer grows), so the
definitional path sorts the sup-distances to the support and scans their
running sums.  The fast path reads every cube sum off an n-dimensional
prefix table in ``2^n`` lookups.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import InvalidParameter
from ..lattice import CubeWindow, LatticeSequence
from .kernel import CHUNK_ELEMENTS, _out_points


def normalizer(radii, n: int, alpha: float) -> np.ndarray:
    """``(#Q)^(1 - alpha/n)`` for cubes of the given radii (shared by both paths)."""
    card = (2.0 * np.asarray(radii, dtype=np.float64) + 1.0) ** n
    return card ** (1.0 - alpha / n)


def _check_alpha(alpha, n):
    if not 0 <= alpha < n:
        raise InvalidParameter(f"alpha must lie in [0, n), got {alpha}")


def maximal_at(b: LatticeSequence, alpha: float, points) -> np.ndarray:
    """``M_alpha b`` at arbitrary lattice points."""
    _check_alpha(alpha, b.n)
    outs = _out_points(points)
    pts, vals = b.support()
    res = np.zeros(len(outs))
    if len(pts) == 0:
        return res
    mags = np.abs(vals)
    step = max(1, CHUNK_ELEMENTS // len(pts))
    for start in range(0, len(outs), step):
        chunk = outs[start : start + step]
        dist = np.max(np.abs(pts[None, :, :] - chunk[:, None, :]), axis=2)
        order = np.argsort(dist, axis=1, kind="stable")
        d_sorted = np.take_along_axis(dist, order, axis=1)
        running = np.cumsum(np.take_along_axis(np.broadcast_to(mags, dist.shape), order, axis=1), axis=1)
        res[start : start + len(chunk)] = np.max(running / normalizer(d_sorted, b.n, alpha), axis=1)
    return res


def fractional_maximal(b: LatticeSequence, alpha: float, out: CubeWindow) -> LatticeSequence:
    return LatticeSequence.dense(out, maximal_at(b, alpha, out))


def _split(mags: np.ndarray):
    """Split nonnegative values into an exact int64 part on a 2^-k grid and a small float remainder."""
    top = float(mags.max())
    # keeps every signed partial sum of 2^n prefix terms below 2^63
    k = 61 - mags.ndim - math.frexp(top * mags.size)[1]
    scale = math.ldexp(1.0, k)
    hi = np.floor(mags * scale)
    lo = mags - hi / scale
    return hi.astype(np.int64), lo, scale


def _prefix(arr: np.ndarray) -> np.ndarray:
    table = np.zeros(tuple(s + 1 for s in arr.shape), dtype=arr.dtype)
    table[tuple(slice(1, None) for _ in arr.shape)] = arr
    for ax in range(arr.ndim):
        np.cumsum(table, axis=ax, out=table)
    return table


def fractional_maximal_fast(b: LatticeSequence, alpha: float, out: CubeWindow) -> LatticeSequence:
    """Same values as :func:`fractional_maximal` for dense ``b``, via prefix sums.

    ``|b|`` is split into an integer part summed exactly in int64 and a
    remainder below ``2^-k``, so inclusion-exclusion does not cancel
    digits of the cube sums.
    """
    _check_alpha(alpha, b.n)
    if not b.is_dense:
        b = b.to_dense()
    n, win = b.n, b.window
    mags = np.abs(b.dense_values())
    outs = out.points()
    best = np.zeros(len(outs))
    if not mags.any():
        return LatticeSequence.dense(out, best)
    hi, lo, scale = _split(mags)
    P_hi, P_lo = _prefix(hi), _prefix(lo)
    nz = np.argwhere(mags > 0)
    nz_lo, nz_hi = nz.min(axis=0) + win.lower, nz.max(axis=0) + win.lower
    reach = np.max(np.maximum(np.abs(outs - nz_lo), np.abs(outs - nz_hi)), axis=1)
    local = outs - win.lower
    side = win.side
    corners = list(itertools.product((0, 1), repeat=n))
    for N in range(int(reach.max()) + 1):
        act = np.flatnonzero(reach >= N)
        loc = local[act]
        bounds = (np.clip(loc - N, 0, side), np.clip(loc + N + 1, 0, side))
        s_hi = np.zeros(len(act), dtype=np.int64)
        s_lo = np.zeros(len(act))
        for corner in corners:
            idx = tuple(bounds[c][:, d] for d, c in enumerate(corner))
            sign = -1 if (n - sum(corner)) % 2 else 1
            s_hi += sign * P_hi[idx]
            s_lo += sign * P_lo[idx]
        total = s_hi.astype(np.float64) / scale + s_lo
        val = total / normalizer(N, n, alpha)
        best[act] = np.maximum(best[act], val)
    return LatticeSequence.dense(out, best)
