"""Discrete Hardy-space maximal function built from Gaussian dilates.

``Phi(x) = exp(-pi |x|^2)`` has unit mass on R^n.  Its lattice dilates
``Phi_t^d(j) = t^-n Phi(j/t)`` are set to zero at ``j = 0``, and the
maximal sequence is ``sup_t |Phi_t^d * b|`` with the sup taken over a
geometric grid of dilations (a one-sided approximation from below).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .lattice import CubeWindow, LatticeSequence, as_index, lp_norm
from .operators.kernel import CHUNK_ELEMENTS, _out_points

PROFILE = "gaussian exp(-pi|x|^2)"
# exp(-pi r^2 / t^2) < 1e-18 beyond r^2 = CUTOFF * t^2
CUTOFF = 18 * math.log(10) / math.pi
# fitted decay exponents this close to the divergence threshold count as divergent
DECAY_MARGIN = 0.05


def dilated_kernel(t: float, j) -> float:
    if not t > 0:
        raise InvalidParameter(f"dilation t must be positive, got {t}")
    j = as_index(j)
    sq = sum(x * x for x in j)
    if sq == 0:
        return 0.0
    return t ** (-len(j)) * math.exp(-math.pi * sq / (t * t))


@dataclass(frozen=True)
class DilationGrid:
    t_min: float = 2.0**-4
    t_max: float = 2.0**10
    per_octave: int = 16

    def __post_init__(self):
        if not (0 < self.t_min <= 1 <= self.t_max):
            raise InvalidParameter(f"need 0 < t_min <= 1 <= t_max, got [{self.t_min}, {self.t_max}]")
        if int(self.per_octave) != self.per_octave or self.per_octave < 1:
            raise InvalidParameter(f"per_octave must be a positive integer, got {self.per_octave}")

    def values(self) -> np.ndarray:
        """``t_min 2^(k/per_octave)`` up to ``t_max``.

        Exponents are computed as ``k / per_octave`` so refining the grid by an
        integer factor reproduces every old point bit for bit.
        """
        steps = int(math.floor(math.log2(self.t_max / self.t_min) * self.per_octave + 1e-9))
        return np.array([self.t_min * 2.0 ** (k / self.per_octave) for k in range(steps + 1)])

    def refined(self, factor: int = 2) -> "DilationGrid":
        return DilationGrid(self.t_min, self.t_max, self.per_octave * factor)

    def covering(self, t_needed: float) -> "DilationGrid":
        """Same spacing, with t_max raised to a whole number of octaves past ``t_needed`` if needed."""
        if t_needed <= self.t_max:
            return self
        octaves = math.ceil(math.log2(t_needed / self.t_min))
        return DilationGrid(self.t_min, self.t_min * 2.0**octaves, self.per_octave)

    def to_json(self) -> dict:
        return {"t_min": self.t_min, "t_max": self.t_max, "per_octave": self.per_octave}


def hardy_maximal_at(b: LatticeSequence, grid: DilationGrid, points) -> np.ndarray:
    outs = _out_points(points)
    pts, vals = b.support()
    best = np.zeros(len(outs))
    if len(pts) == 0:
        return best
    ts = grid.values()
    n = b.n
    step = max(1, CHUNK_ELEMENTS // len(pts))
    for start in range(0, len(outs), step):
        chunk = outs[start : start + step]
        diff = chunk[:, None, :] - pts[None, :, :]
        sq = np.einsum("wsn,wsn->ws", diff, diff).astype(np.float64)
        nonzero = sq > 0
        cur = best[start : start + len(chunk)]
        for t in ts:
            keep = nonzero & (sq <= CUTOFF * t * t)
            if not keep.any():
                continue
            kern = np.where(keep, np.exp(-math.pi * sq / (t * t)), 0.0) * t ** (-n)
            np.maximum(cur, np.abs(kern @ vals), out=cur)
    return best


def hardy_maximal(b: LatticeSequence, grid: DilationGrid | None = None, out: CubeWindow | None = None) -> LatticeSequence:
    """``max_t |sum_i Phi_t^d(j - i) b(i)|`` for ``j`` in ``out``."""
    grid = grid or DilationGrid()
    if out is None:
        out = default_hardy_window(b)
    return LatticeSequence.dense(out, hardy_maximal_at(b, grid, out))


def default_hardy_window(b: LatticeSequence) -> CubeWindow:
    box = b.bounding_window()
    if box is None:
        return CubeWindow.origin(b.n, 0)
    return CubeWindow(box.center, max(128, 32 * (box.radius + 1)))


@dataclass
class HardyEstimate:
    value: float
    divergent: bool
    decay: float
    lp_part: float
    maximal_part: float
    window: CubeWindow
    grid: DilationGrid

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "divergent": self.divergent,
            "decay": self.decay,
            "lp_part": self.lp_part,
            "maximal_part": self.maximal_part,
            "window": self.window.to_json(),
            "grid": self.grid.to_json(),
            "profile": PROFILE,
        }


def _shell_decay(seq: LatticeSequence) -> float:
    """Decay exponent from a log-log fit of the largest value on each sup-norm shell
    over the outer seven eighths of the window."""
    win = seq.window
    vals = seq.dense_values().ravel()
    dist = np.max(np.abs(win.points() - np.asarray(win.center)), axis=1)
    radii = np.unique(np.rint(np.geomspace(max(1, win.radius / 8), win.radius, 24)).astype(int))
    xs, ys = [], []
    for r in radii:
        top = float(np.max(vals[dist == r]))
        if top > 0:
            xs.append(math.log(r))
            ys.append(math.log(top))
    if len(xs) < 2:
        return math.inf
    return -float(np.polyfit(xs, ys, 1)[0])


def hp_quasinorm(b: LatticeSequence, p: float, grid: DilationGrid | None = None, window: CubeWindow | None = None) -> HardyEstimate:
    """``||b||_p`` plus the l^p norm of the maximal sequence over ``window``.

    The grid is extended so ``t_max`` reaches the maximizing dilation
    ``sqrt(2 pi / n) |j|`` at the window boundary.  When the fitted decay
    exponent gamma has ``gamma p <= n`` (up to a 0.05 margin) the tail is
    divergent and the value is only a lower bound.
    """
    if not 0 < p <= 1:
        raise InvalidParameter(f"p must lie in (0, 1], got {p}")
    grid = grid or DilationGrid()
    window = window or default_hardy_window(b)
    pts, _ = b.support()
    if len(pts) == 0:
        return HardyEstimate(0.0, False, math.inf, 0.0, 0.0, window, grid)
    far = float(np.max(np.linalg.norm(np.abs(pts - np.asarray(window.center)) + window.radius, axis=1)))
    grid = grid.covering(math.sqrt(2 * math.pi / b.n) * far)
    maxseq = hardy_maximal(b, grid, window)
    lp_part = lp_norm(b, p)
    mx = lp_norm(maxseq, p)
    decay = _shell_decay(maxseq)
    divergent = decay * p <= b.n + DECAY_MARGIN
    return HardyEstimate(lp_part + mx, bool(divergent), decay, lp_part, mx, window, grid)


__all__ = [
    "CUTOFF",
    "DilationGrid",
    "HardyEstimate",
    "PROFILE",
    "default_hardy_window",
    "dilated_kernel",
    "hardy_maximal",
    "hardy_maximal_at",
    "hp_quasinorm",
]
