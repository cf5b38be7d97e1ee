"""(p, inf, d_p)-atoms, the dilated-cube geometry around their preimages, and
the pointwise domination check on the complement region.

Atoms are kept as an integer coefficient array times one float scale, so
the vanishing-moment conditions can be checked in exact integer
arithmetic no matter how the scale rounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CannotConstruct, InvalidParameter
from .lattice import CubeWindow, FractionalSpec, LatticeSequence, atom_degree, combine, lp_norm
from .operators.kernel import evaluate_T
from .operators.maximal import maximal_at

COEFF_RANGE = 9
FAMILIES = ("uniform", "smooth")


def multi_indices(n: int, degree: int):
    """All multi-indices beta in N_0^n with |beta| <= degree, graded then lexicographic."""
    out = []
    for total in range(degree + 1):
        for beta in itertools.product(range(total + 1), repeat=n):
            if sum(beta) == total:
                out.append(beta)
    return out


@dataclass(frozen=True)
class Atom:
    cube: CubeWindow
    p: float
    degree: int
    coeffs: np.ndarray = field(repr=False)  # int64, shape cube.shape
    scale: float
    seed: int | None = None
    family: str = "custom"

    @property
    def n(self) -> int:
        return self.cube.n

    @property
    def sequence(self) -> LatticeSequence:
        return LatticeSequence.dense(self.cube, self.coeffs.astype(np.float64) * self.scale)

    @property
    def integer_sequence(self) -> LatticeSequence:
        """The unscaled integer coefficients; sums of these are exact in float."""
        return LatticeSequence.dense(self.cube, self.coeffs.astype(np.float64))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.coeffs))) * self.scale

    def translated(self, shift: Sequence[int]) -> "Atom":
        center = tuple(c + int(s) for c, s in zip(self.cube.center, shift))
        return Atom(CubeWindow(center, self.cube.radius), self.p, self.degree, self.coeffs, self.scale, self.seed, self.family)

    def digest(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(repr((self.cube.center, self.cube.radius, self.p, self.degree, self.scale)).encode())
        h.update(np.ascontiguousarray(self.coeffs, dtype=np.int64).tobytes())
        return h.hexdigest()[:16]

    def to_json(self) -> dict:
        out = self.sequence.to_json()
        out.update(
            {
                "p": self.p,
                "cube": self.cube.to_json(),
                "d_p": self.degree,
                "coefficients": self.coeffs.ravel().tolist(),
                "scale": self.scale,
                "seed": self.seed,
                "family": self.family,
            }
        )
        return out

    @classmethod
    def from_json(cls, obj) -> "Atom":
        cube = CubeWindow.from_json(obj["cube"])
        coeffs = np.asarray(obj["coefficients"], dtype=np.int64).reshape(cube.shape)
        return cls(cube, float(obj["p"]), int(obj["d_p"]), coeffs, float(obj["scale"]), obj.get("seed"), obj.get("family", "custom"))


def _exact_scale(target: float, top: int) -> float:
    """Largest-ish float s with top * s <= target exactly."""
    s = target / top
    while Fraction(s) * top > Fraction(target):
        s = math.nextafter(s, 0.0)
    return s


def atom_from_coefficients(Q: CubeWindow, p: float, c, seed=None, family="custom") -> Atom:
    """Atom ``scale * Delta_1^(d_p+1) c`` for integer ``c`` on the leading sub-cube.

    ``c`` has shape ``(2N+1 - (d_p+1), 2N+1, ..., 2N+1)``; coordinate 1 of
    its first entry sits at the lower face of ``Q``.  The backward difference
    ``(Delta c)(i) = c(i) - c(i - e_1)`` applied ``d_p + 1`` times kills every
    moment i^beta with beta_1 <= d_p.
    """
    d = atom_degree(p, Q.n)
    width = Q.side - (d + 1)
    if width < 1:
        raise CannotConstruct(f"cube radius {Q.radius} leaves no room for {d + 1} differences (need 2N+1 >= {d + 2})")
    c = np.asarray(c)
    if not np.issubdtype(c.dtype, np.integer):
        if not np.all(c == np.round(c)):
            raise InvalidParameter("atom coefficients must be integers")
        c = np.round(c)
    c = c.astype(np.int64)
    expected = (width,) + (Q.side,) * (Q.n - 1)
    if c.shape != expected:
        raise InvalidParameter(f"coefficient array has shape {c.shape}, expected {expected}")
    if not c.any():
        raise CannotConstruct("coefficients are identically zero")
    pad = [(d + 1, d + 1)] + [(0, 0)] * (Q.n - 1)
    a = np.diff(np.pad(c, pad), n=d + 1, axis=0)
    target = float(Q.cardinality) ** (-1.0 / p)
    return Atom(Q, float(p), d, a, _exact_scale(target, int(np.max(np.abs(a)))), seed, family)


def _smooth_profile(rng, width: int, d: int) -> np.ndarray:
    """Box of random length convolved with itself d+2 times, randomly placed."""
    longest = (width - 1) // (d + 2) + 1
    ell = int(rng.integers(max(1, longest // 2), longest + 1))
    g = np.ones(ell, dtype=np.int64)
    for _ in range(d + 1):
        g = np.convolve(g, np.ones(ell, dtype=np.int64))
    out = np.zeros(width, dtype=np.int64)
    off = int(rng.integers(0, width - len(g) + 1))
    out[off : off + len(g)] = g
    return out


def make_atom(Q: CubeWindow, p: float, seed: int, family: str = "uniform") -> Atom:
    """Random atom on ``Q``.

    ``uniform``: coefficients i.i.d. uniform integers in [-9, 9].
    ``smooth``: a bump (iterated box convolution) along coordinate 1 times a
    random integer constant, which yields atoms close to extremal for the
    far-field bounds.
    """
    if family not in FAMILIES:
        raise InvalidParameter(f"unknown atom family {family!r}; choose from {FAMILIES}")
    d = atom_degree(p, Q.n)
    width = Q.side - (d + 1)
    if width < 1:
        raise CannotConstruct(f"cube radius {Q.radius} leaves no room for {d + 1} differences (need 2N+1 >= {d + 2})")
    rng = np.random.default_rng(seed)
    shape = (width,) + (Q.side,) * (Q.n - 1)
    while True:
        if family == "uniform":
            c = rng.integers(-COEFF_RANGE, COEFF_RANGE + 1, size=shape)
        else:
            profile = _smooth_profile(rng, width, d)
            mult = rng.integers(1, COEFF_RANGE + 1, size=(Q.side,) * (Q.n - 1)) if Q.n > 1 else np.ones(())
            sign = 1 if rng.random() < 0.5 else -1
            c = sign * np.multiply.outer(profile, mult).astype(np.int64)
        if np.any(c):
            break
    return atom_from_coefficients(Q, p, c, seed=seed, family=family)


# ---------------------------------------------------------------------------
# validation


@dataclass
class AtomReport:
    support_ok: bool
    sup_ok: bool
    moments_ok: bool
    exact: bool
    sup_norm: float
    sup_limit: float
    max_moment: float
    violations: list[str]

    @property
    def valid(self) -> bool:
        return self.support_ok and self.sup_ok and self.moments_ok

    def __bool__(self) -> bool:
        return self.valid


def _int_moments(pts: np.ndarray, ints: Sequence[int], betas) -> list[int]:
    """``sum_i i^beta c_i`` with Python integers (arbitrary precision)."""
    pts_l = pts.tolist()
    out = []
    for beta in betas:
        tot = 0
        for i, c in zip(pts_l, ints):
            if c:
                mono = 1
                for x, e in zip(i, beta):
                    mono *= x**e
                tot += mono * c
        out.append(tot)
    return out


def _int64_moments(pts: np.ndarray, ints: np.ndarray, betas) -> list[int] | None:
    """Vectorized exact moments when no int64 overflow is possible, else None."""
    if not betas:
        return []
    top = int(np.max(np.abs(ints))) if ints.size else 0
    reach = int(np.max(np.abs(pts))) if pts.size else 0
    deg = max(sum(b) for b in betas)
    if top * max(reach, 1) ** deg * max(len(ints), 1) >= 2**62:
        return None
    out = []
    for beta in betas:
        mono = np.ones(len(pts), dtype=np.int64)
        for axis, e in enumerate(beta):
            if e:
                mono *= pts[:, axis] ** e
        out.append(int(np.sum(mono * ints)))
    return out


def exact_moments(pts: np.ndarray, ints, betas) -> list[int]:
    ints_arr = np.asarray(ints)
    if ints_arr.dtype != object:
        res = _int64_moments(pts, ints_arr.astype(np.int64), betas)
        if res is not None:
            return res
    return _int_moments(pts, [int(x) for x in ints_arr.tolist()], betas)


def validate_atom(a, Q: CubeWindow | None = None, p: float | None = None, exact: bool | None = None) -> AtomReport:
    """Check support, sup bound and vanishing moments.

    For an :class:`Atom` the moments are checked exactly on its integer
    coefficients (monomials ``i^beta`` at the lattice origin).  A plain
    sequence is checked exactly when ``exact=True`` (its floats read as
    dyadic rationals); otherwise against centered monomials ``(i - i0)^beta``
    with tolerance ``1e-10 ||a||_inf #Q radius^d_p``.
    """
    if isinstance(a, Atom):
        Q = a.cube if Q is None else Q
        p = a.p if p is None else p
        seq = a.sequence
        exact = True if exact is None else exact
    else:
        seq = a
        exact = bool(exact)
    if Q is None or p is None:
        raise InvalidParameter("validate_atom needs the cube Q and exponent p")
    d = atom_degree(p, Q.n)
    violations = []
    pts, vals = seq.support()
    support_ok = bool(np.all(Q.contains(pts))) if len(pts) else True
    if not support_ok:
        violations.append("(a1) support leaves the cube")
    limit = float(Q.cardinality) ** (-1.0 / p)
    if isinstance(a, Atom):
        sup = a.sup_norm
        sup_ok = Fraction(int(np.max(np.abs(a.coeffs)))) * Fraction(a.scale) <= Fraction(limit) * (1 + Fraction(1, 10**12))
    else:
        sup = float(np.max(np.abs(vals))) if len(vals) else 0.0
        sup_ok = sup <= limit * (1 + 1e-12)
    if not sup_ok:
        violations.append(f"(a2) sup norm {sup!r} exceeds (#Q)^(-1/p) = {limit!r}")
    betas = multi_indices(Q.n, d)
    if isinstance(a, Atom) and exact:
        cube_pts = a.cube.points()
        moments = exact_moments(cube_pts, a.coeffs.ravel(), betas)
        moments_ok = all(m == 0 for m in moments)
        max_moment = float(max(abs(m) for m in moments)) * a.scale if moments else 0.0
    elif exact:
        ratios = [float(v).as_integer_ratio() for v in vals.tolist()]
        den = max((r[1] for r in ratios), default=1)
        ints = np.array([r[0] * (den // r[1]) for r in ratios], dtype=object)
        moments = exact_moments(pts, ints, betas)
        moments_ok = all(m == 0 for m in moments)
        max_moment = float(max((abs(Fraction(m, den)) for m in moments), default=0))
    else:
        rel = (pts - np.asarray(Q.center)).astype(np.float64)
        moments = []
        for beta in betas:
            mono = np.prod(rel ** np.asarray(beta, dtype=np.float64), axis=1) if len(rel) else np.zeros(0)
            moments.append(math.fsum((mono * vals).tolist()))
        tol = 1e-10 * sup * Q.cardinality * max(Q.radius, 1) ** d
        max_moment = max((abs(m) for m in moments), default=0.0)
        moments_ok = max_moment <= tol
    if not moments_ok:
        violations.append(f"(a3) a moment of degree <= {d} does not vanish (max |moment| = {max_moment:.3g})")
    return AtomReport(support_ok, bool(sup_ok), moments_ok, exact, sup, limit, max_moment, violations)


# ---------------------------------------------------------------------------
# geometry around the preimages of the cube


@dataclass
class RegionGeometry:
    """Dilated cubes ``Q*_k`` around ``A_k^-1 i0`` and the nearest-center split of their complement.

    Each ``Q*_k`` is centered at the nearest lattice point to ``A_k^-1 i0``
    (ties toward -inf) with radius ``ceil(4 D_inv N) + 1``: a superset of the
    cube about the rational center, so the computed ``R`` is a subset of the
    exact one.
    """

    cube: CubeWindow
    centers: list[tuple[Fraction, ...]]
    stars: list[CubeWindow]
    d_inv: float
    _den: int = 1
    _nums: np.ndarray = None

    def __post_init__(self):
        den = 1
        for c in self.centers:
            for x in c:
                den = den * x.denominator // math.gcd(den, x.denominator)
        self._den = den
        self._nums = np.array([[int(x * den) for x in c] for c in self.centers], dtype=np.int64)

    @property
    def m(self) -> int:
        return len(self.centers)

    def in_stars(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
        hit = np.zeros(len(pts), dtype=bool)
        for s in self.stars:
            hit |= s.contains(pts)
        return hit

    def nearest(self, points) -> np.ndarray:
        """1-based index of the nearest rational center, ties to the smallest index."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
        diff = self._den * pts[:, None, :] - self._nums[None, :, :]
        return np.argmin(np.sum(diff * diff, axis=2), axis=1) + 1

    def label(self, points) -> np.ndarray:
        """0 inside some ``Q*_k``, otherwise ``l`` with the point in ``R_l``."""
        lab = self.nearest(points)
        lab[self.in_stars(points)] = 0
        return lab


def region_geometry(Q: CubeWindow, spec: FractionalSpec) -> RegionGeometry:
    centers = spec.inverse_images(Q.center)
    d_inv = spec.d_inv()
    radius = math.ceil(4 * d_inv * Q.radius) + 1
    stars = [CubeWindow(tuple(math.ceil(x - Fraction(1, 2)) for x in c), radius) for c in centers]
    return RegionGeometry(Q, centers, stars, d_inv)


def sample_in_R(geom: RegionGeometry, count: int, rng: np.random.Generator, spread: float = 64.0) -> np.ndarray:
    """Points of ``R`` at log-uniform distances from a random preimage center,
    from just outside its dilated cube out to ``spread`` times that size."""
    n = geom.cube.n
    r0 = geom.stars[0].radius + 1
    found = []
    total = 0
    while total < count:
        k = rng.integers(0, geom.m, size=2 * count)
        base = np.array([[float(x) for x in geom.centers[i]] for i in k])
        direction = rng.standard_normal((2 * count, n))
        direction /= np.max(np.abs(direction), axis=1, keepdims=True)
        dist = r0 * np.exp(rng.uniform(0, math.log(spread), size=(2 * count, 1)))
        pts = np.rint(base + direction * dist).astype(np.int64)
        pts = pts[geom.label(pts) > 0]
        found.append(pts)
        total += len(pts)
    return np.concatenate(found)[:count]


# ---------------------------------------------------------------------------
# pointwise domination on R


@dataclass
class DominationRecord:
    points: np.ndarray
    labels: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.lhs / self.rhs

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if len(self.lhs) else 0.0


def indicator(Q: CubeWindow) -> LatticeSequence:
    return LatticeSequence.dense(Q, np.ones(Q.cardinality))


def domination_check(spec: FractionalSpec, atom: Atom, sample, geom: RegionGeometry | None = None) -> DominationRecord:
    """``|T a(j)|`` against ``||a||_inf (M_beta chi_Q (A_l j))^((n+d+1)/n)`` for j in R_l,
    with ``beta = alpha n / (n + d + 1)``."""
    geom = geom or region_geometry(atom.cube, spec)
    pts = np.atleast_2d(np.asarray(sample, dtype=np.int64))
    labels = geom.label(pts)
    if np.any(labels == 0):
        bad = pts[np.flatnonzero(labels == 0)[0]].tolist()
        raise InvalidParameter(f"sample point {bad} is not in R")
    n, d = spec.n, atom.degree
    lhs = np.abs(evaluate_T(spec, atom.sequence, pts))
    beta = spec.alpha * n / (n + d + 1)
    images = np.empty_like(pts)
    for l, A in enumerate(spec.matrices, 1):
        sel = labels == l
        images[sel] = pts[sel] @ A.array.T
    mchi = maximal_at(indicator(atom.cube), beta, images)
    rhs = atom.sup_norm * mchi ** ((n + d + 1) / n)
    return DominationRecord(pts, labels, lhs, rhs)


@dataclass
class AtomNorm:
    """Truncated ``||T a||_q`` of an atom and its split over ``U Q*_k`` and ``R``."""

    norm: float
    tail: float
    divergent: bool
    star_mass: float  # q-th power sum over the window inside U Q*_k
    r_mass: float  # q-th power sum over the window inside R
    window: CubeWindow

    def upper(self, q: float) -> float:
        return (self.norm**q + self.tail) ** (1.0 / q)


def atom_operator_norm(spec: FractionalSpec, atom: Atom, q: float, window: CubeWindow | None = None) -> AtomNorm:
    """``T`` applied to the integer coefficients, then scaled.

    The integer input has an exactly vanishing sum, so the certified tail
    can use the extra decay of mean-zero inputs.
    """
    from .operators.kernel import apply_T, truncated_lq_norm

    ints = atom.integer_sequence
    res = apply_T(spec, ints, window)
    raw = truncated_lq_norm(res, q, ints, spec)
    vals = np.abs(res.values.dense_values().ravel()) * atom.scale
    inside = region_geometry(atom.cube, spec).in_stars(res.window.points())
    powers = vals**q
    star = math.fsum(powers[inside].tolist())
    rest = math.fsum(powers[~inside].tolist())
    return AtomNorm(raw.norm * atom.scale, raw.tail * atom.scale**q, raw.divergent, star, rest, res.window)


# ---------------------------------------------------------------------------
# synthesis


def atomic_synthesis(atoms: Sequence[Atom], lambdas: Sequence[float]) -> tuple[LatticeSequence, float]:
    """``sum_k lambda_k a_k`` and ``sum_k |lambda_k|^p``."""
    if len(atoms) != len(lambdas):
        raise InvalidParameter(f"{len(atoms)} atoms but {len(lambdas)} coefficients")
    if not atoms:
        raise InvalidParameter("need at least one atom")
    n = atoms[0].n
    if any(a.n != n for a in atoms):
        raise InvalidParameter("dimension mismatch between atoms")
    p = atoms[0].p
    if any(a.p != p for a in atoms):
        raise InvalidParameter("atoms have different exponents p")
    seq = combine([a.sequence for a in atoms], list(lambdas))
    return seq, math.fsum(abs(lam) ** p for lam in lambdas)


def synthesis_sup_bound(atoms: Sequence[Atom], lambdas: Sequence[float]) -> float:
    return math.fsum(abs(lam) * a.cube.cardinality ** (-1.0 / a.p) for a, lam in zip(atoms, lambdas))


__all__ = [
    "Atom",
    "AtomReport",
    "DominationRecord",
    "RegionGeometry",
    "AtomNorm",
    "atom_from_coefficients",
    "atom_operator_norm",
    "atomic_synthesis",
    "domination_check",
    "exact_moments",
    "indicator",
    "make_atom",
    "multi_indices",
    "region_geometry",
    "sample_in_R",
    "synthesis_sup_bound",
    "validate_atom",
    "lp_norm",
]
