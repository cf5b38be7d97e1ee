"""Lattice primitives on Z^n.

Cubes, finitely supported sequences, exact integer-matrix algebra, exponent
arithmetic and the validity rules for a fractional operator specification.
Indices are plain tuples of ints; arrays of indices are ``(k, n)`` int64.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameter, OutOfRange, SingularMatrix, SpecError

SPARSE_FILL_RATIO = 0.10
SUM_TOL = 1e-12


def as_index(j: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(x) for x in j)
    if not out:
        raise InvalidParameter("lattice index must have at least one coordinate")
    return out


def norms_of_index(j: Iterable[int]) -> tuple[float, int]:
    """Return ``(|j|, |j|_inf)``; the euclidean norm is taken from the exact
    integer sum of squares."""
    j = as_index(j)
    return math.sqrt(sum(x * x for x in j)), max(abs(x) for x in j)


# ---------------------------------------------------------------------------
# cubes


@dataclass(frozen=True)
class CubeWindow:
    """Discrete cube ``{i : |i - center|_inf <= radius}``."""

    center: tuple[int, ...]
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "center", as_index(self.center))
        if int(self.radius) != self.radius or self.radius < 0:
            raise InvalidParameter(f"cube radius must be a nonnegative integer, got {self.radius!r}")
        object.__setattr__(self, "radius", int(self.radius))

    @classmethod
    def origin(cls, n: int, radius: int) -> "CubeWindow":
        return cls((0,) * n, radius)

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.n

    @property
    def cardinality(self) -> int:
        return self.side ** self.n

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.center, dtype=np.int64) - self.radius

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.center, dtype=np.int64) + self.radius

    def points(self) -> np.ndarray:
        """All lattice points in row-major order, shape ``(#Q, n)``."""
        axes = [np.arange(c - self.radius, c + self.radius + 1, dtype=np.int64) for c in self.center]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.int64))
        return np.all(np.abs(pts - np.asarray(self.center)) <= self.radius, axis=1)

    def flat_index(self, pts) -> np.ndarray:
        """Row-major offsets of points known to lie in the cube."""
        local = np.atleast_2d(np.asarray(pts, dtype=np.int64)) - self.lower
        return np.ravel_multi_index(tuple(local.T), self.shape)

    def to_json(self) -> dict:
        return {"center": list(self.center), "radius": self.radius}

    @classmethod
    def from_json(cls, obj) -> "CubeWindow":
        try:
            return cls(tuple(obj["center"]), obj["radius"])
        except KeyError as exc:
            raise SpecError(f"cube is missing field {exc.args[0]!r}") from None


def bounding_cube(pts: np.ndarray) -> CubeWindow:
    """Smallest cube with integer center covering ``pts``."""
    pts = np.atleast_2d(pts)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    center = (lo + hi) // 2
    radius = int(np.max(np.maximum(hi - center, center - lo)))
    return CubeWindow(tuple(int(c) for c in center), radius)


# ---------------------------------------------------------------------------
# sequences


class LatticeSequence:
    """Finitely supported real sequence on Z^n.

    Stored either densely on a :class:`CubeWindow` (row-major values) or
    sparsely as lexicographically sorted ``(index, value)`` pairs.  Sparse
    order coincides with row-major order of any bounding window, so every
    traversal of the support is deterministic.
    """

    __slots__ = ("n", "window", "_dense", "_idx", "_val")

    def __init__(self, n, window=None, dense=None, idx=None, val=None):
        self.n = int(n)
        self.window = window
        self._dense = dense
        self._idx = idx
        self._val = val

    # construction -----------------------------------------------------

    @classmethod
    def dense(cls, window: CubeWindow, values) -> "LatticeSequence":
        arr = np.asarray(values, dtype=np.float64)
        if arr.size != window.cardinality:
            raise InvalidParameter(
                f"dense sequence needs {window.cardinality} values for window {window}, got {arr.size}"
            )
        arr = arr.reshape(window.shape).copy()
        arr.setflags(write=False)
        return cls(window.n, window=window, dense=arr)

    @classmethod
    def sparse(cls, n: int, items) -> "LatticeSequence":
        items = list(items)
        if not items:
            return cls(n, idx=np.zeros((0, n), dtype=np.int64), val=np.zeros(0))
        idx = np.array([as_index(i) for i, _ in items], dtype=np.int64)
        val = np.array([float(v) for _, v in items], dtype=np.float64)
        return cls._from_arrays(n, idx, val, check_duplicates=True)

    @classmethod
    def _from_arrays(cls, n, idx, val, check_duplicates=False):
        idx = np.asarray(idx, dtype=np.int64).reshape(-1, n)
        val = np.asarray(val, dtype=np.float64).reshape(-1)
        if idx.shape[1] != n:
            raise InvalidParameter(f"indices have dimension {idx.shape[1]}, expected {n}")
        order = np.lexsort(idx.T[::-1]) if len(idx) else np.zeros(0, dtype=np.int64)
        idx, val = idx[order], val[order]
        if check_duplicates and len(idx) > 1 and np.any(np.all(idx[1:] == idx[:-1], axis=1)):
            raise InvalidParameter("sparse sequence has duplicate indices")
        idx.setflags(write=False)
        val.setflags(write=False)
        return cls(n, idx=idx, val=val)

    @classmethod
    def from_points(cls, pts, values, n: int | None = None) -> "LatticeSequence":
        """Build from distinct points, choosing storage by fill ratio."""
        pts = np.asarray(pts, dtype=np.int64)
        if n is None:
            n = pts.shape[1]
        pts = pts.reshape(-1, n)
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        keep = values != 0
        pts, values = pts[keep], values[keep]
        if len(pts) == 0:
            return cls._from_arrays(n, pts, values)
        box = bounding_cube(pts)
        if len(pts) >= SPARSE_FILL_RATIO * box.cardinality:
            arr = np.zeros(box.cardinality)
            arr[box.flat_index(pts)] = values
            return cls.dense(box, arr)
        return cls._from_arrays(n, pts, values, check_duplicates=True)

    @classmethod
    def delta(cls, at: Sequence[int], value: float = 1.0) -> "LatticeSequence":
        at = as_index(at)
        return cls.sparse(len(at), [(at, value)])

    @classmethod
    def zeros(cls, n: int) -> "LatticeSequence":
        return cls.sparse(n, [])

    # access ---------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def dense_values(self) -> np.ndarray:
        if not self.is_dense:
            raise InvalidParameter("sequence is stored sparse")
        return self._dense

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Nonzero entries as ``(points, values)`` in row-major order."""
        if self.is_dense:
            flat = self._dense.ravel()
            nz = np.flatnonzero(flat)
            pts = self.window.points()[nz]
            return pts, flat[nz]
        nz = self._val != 0
        return self._idx[nz], self._val[nz]

    def value_at(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.int64))
        out = np.zeros(len(pts))
        if self.is_dense:
            inside = self.window.contains(pts)
            out[inside] = self._dense.ravel()[self.window.flat_index(pts[inside])]
            return out
        lookup = {tuple(i): v for i, v in zip(self._idx.tolist(), self._val.tolist())}
        for r, p in enumerate(pts.tolist()):
            out[r] = lookup.get(tuple(p), 0.0)
        return out

    def __getitem__(self, j) -> float:
        return float(self.value_at([as_index(j)])[0])

    def bounding_window(self) -> CubeWindow | None:
        pts, _ = self.support()
        if len(pts) == 0:
            return None
        return bounding_cube(pts)

    def to_dense(self, window: CubeWindow | None = None) -> "LatticeSequence":
        window = window or self.bounding_window() or CubeWindow.origin(self.n, 0)
        pts, vals = self.support()
        inside = window.contains(pts) if len(pts) else np.zeros(0, dtype=bool)
        if not np.all(inside):
            raise InvalidParameter("support does not fit in the requested window")
        arr = np.zeros(window.cardinality)
        if len(pts):
            arr[window.flat_index(pts)] = vals
        return LatticeSequence.dense(window, arr)

    def abs(self) -> "LatticeSequence":
        if self.is_dense:
            return LatticeSequence.dense(self.window, np.abs(self._dense))
        return LatticeSequence._from_arrays(self.n, self._idx, np.abs(self._val))

    def scaled(self, c: float) -> "LatticeSequence":
        if self.is_dense:
            return LatticeSequence.dense(self.window, c * self._dense)
        return LatticeSequence._from_arrays(self.n, self._idx, c * self._val)

    def __add__(self, other: "LatticeSequence") -> "LatticeSequence":
        return combine([self, other], [1.0, 1.0])

    def __sub__(self, other: "LatticeSequence") -> "LatticeSequence":
        return combine([self, other], [1.0, -1.0])

    def __len__(self) -> int:
        return len(self.support()[1])

    def __repr__(self) -> str:
        kind = f"dense on {self.window}" if self.is_dense else f"sparse, {len(self._val)} entries"
        return f"LatticeSequence(n={self.n}, {kind})"

    # serialization --------------------------------------------------

    def to_json(self) -> dict:
        if self.is_dense:
            return {"n": self.n, "dense": {**self.window.to_json(), "values": self._dense.ravel().tolist()}}
        return {"n": self.n, "sparse": [[list(i), v] for i, v in zip(self._idx.tolist(), self._val.tolist())]}

    @classmethod
    def from_json(cls, obj) -> "LatticeSequence":
        if "n" not in obj:
            raise SpecError("sequence is missing field 'n'")
        n = int(obj["n"])
        if "dense" in obj:
            d = obj["dense"]
            for key in ("center", "radius", "values"):
                if key not in d:
                    raise SpecError(f"dense sequence is missing field {key!r}")
            window = CubeWindow(tuple(d["center"]), d["radius"])
            if window.n != n:
                raise SpecError(f"dense.center has {window.n} coordinates but n = {n}")
            return cls.dense(window, d["values"])
        if "sparse" in obj:
            items = []
            for k, entry in enumerate(obj["sparse"]):
                if len(entry) != 2 or len(entry[0]) != n:
                    raise SpecError(f"sparse entry {k} must be [[{n} ints], value]")
                items.append((entry[0], entry[1]))
            return cls.sparse(n, items)
        raise SpecError("sequence needs either a 'dense' or a 'sparse' field")


def combine(seqs: Sequence[LatticeSequence], coeffs: Sequence[float]) -> LatticeSequence:
    """Exact-superposition ``sum c_k s_k`` (floating point per entry, fixed order)."""
    if not seqs:
        raise InvalidParameter("nothing to combine")
    n = seqs[0].n
    if any(s.n != n for s in seqs):
        raise InvalidParameter("dimension mismatch between sequences")
    pts_all, vals_all = [], []
    for s, c in zip(seqs, coeffs):
        p, v = s.support()
        pts_all.append(p)
        vals_all.append(c * v)
    pts = np.concatenate(pts_all) if pts_all else np.zeros((0, n), dtype=np.int64)
    vals = np.concatenate(vals_all) if vals_all else np.zeros(0)
    if len(pts) == 0:
        return LatticeSequence.zeros(n)
    uniq, inv = np.unique(pts, axis=0, return_inverse=True)
    acc = np.zeros(len(uniq))
    np.add.at(acc, inv.reshape(-1), vals)
    return LatticeSequence.from_points(uniq, acc, n)


def lp_norm(b: LatticeSequence, p: float) -> float:
    """``(sum |b(i)|^p)^(1/p)``, or ``max |b(i)|`` for ``p = inf``."""
    if not p > 0:
        raise InvalidParameter(f"p must be positive, got {p}")
    _, vals = b.support()
    if len(vals) == 0:
        return 0.0
    mags = np.abs(vals)
    top = float(mags.max())
    if math.isinf(p):
        return top
    # scaled by the max to avoid overflow/underflow in the powers
    return top * math.fsum(((mags / top) ** p).tolist()) ** (1.0 / p)


# ---------------------------------------------------------------------------
# exponents


class ExponentPair(NamedTuple):
    p: float
    q: float


def conjugate_exponent(p: float, alpha: float, n: int) -> float:
    """q with ``1/q = 1/p - alpha/n``."""
    if not p > 0:
        raise InvalidParameter(f"p must be positive, got {p}")
    if alpha < 0 or alpha >= n:
        raise InvalidParameter(f"alpha must lie in [0, n), got {alpha}")
    if alpha == 0:
        return float(p)
    if math.isinf(p) or p >= n / alpha:
        raise OutOfRange(f"need p < n/alpha = {n / alpha:g}, got p = {p}")
    return 1.0 / (1.0 / p - alpha / n)


def exponent_pair(p: float, alpha: float, n: int) -> ExponentPair:
    return ExponentPair(p, conjugate_exponent(p, alpha, n))


def atom_degree(p: float, n: int) -> int:
    """``floor(n (1/p - 1))`` for ``0 < p <= 1``.

    Evaluated in rationals so that e.g. p = 2/3, n = 2 gives exactly 1.
    """
    if not 0 < p <= 1:
        raise InvalidParameter(f"atom degree needs 0 < p <= 1, got {p}")
    pf = Fraction(p).limit_denominator(10**6)
    if abs(float(pf) - p) > 1e-12:
        pf = Fraction(p)
    return math.floor(n * (1 / pf - 1))


# ---------------------------------------------------------------------------
# exact integer matrices


def _bareiss_det(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def _sqrt_up(x: Fraction) -> float:
    """Smallest-ish float r with r*r >= x (exact check)."""
    r = math.sqrt(float(x))
    while Fraction(r) ** 2 < x:
        r = math.nextafter(r, math.inf)
    return r


def _recip_down(u: float) -> float:
    exact = 1 / Fraction(u)
    r = float(exact)
    if Fraction(r) > exact:
        r = math.nextafter(r, 0.0)
    return r


@dataclass(frozen=True)
class IntegerMatrix:
    """Square integer matrix with exact determinant and rational inverse."""

    rows: tuple[tuple[int, ...], ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InvalidParameter("matrix must be square and nonempty")
        for r, orig in zip(rows, self.rows):
            for x, y in zip(r, orig):
                if x != y:
                    raise InvalidParameter(f"matrix entry {y!r} is not an integer")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def scalar(cls, n: int, c: int) -> "IntegerMatrix":
        return cls(tuple(tuple(c * int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    @property
    def det(self) -> int:
        if "det" not in self._cache:
            self._cache["det"] = _bareiss_det([list(r) for r in self.rows])
        return self._cache["det"]

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return IntegerMatrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def adjugate(self) -> tuple[tuple[int, ...], ...]:
        n = self.n
        if n == 1:
            return ((1,),)
        adj = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[self.rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                adj[j][i] = (-1) ** (i + j) * _bareiss_det(minor)
        return tuple(tuple(r) for r in adj)

    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        if "inv" not in self._cache:
            d = self.det
            if d == 0:
                raise SingularMatrix(f"matrix {self.rows} is singular")
            self._cache["inv"] = tuple(tuple(Fraction(x, d) for x in r) for r in self.adjugate())
        return self._cache["inv"]

    def apply_inverse(self, v: Sequence[int]) -> tuple[Fraction, ...]:
        inv = self.inverse()
        return tuple(sum((a * x for a, x in zip(r, v)), Fraction(0)) for r in inv)

    def to_json(self) -> list:
        return [list(r) for r in self.rows]


def matrix_exact_inverse(A: IntegerMatrix) -> tuple[tuple[Fraction, ...], ...]:
    return A.inverse()


def exact_matmul(A, B):
    """Product of two nested-sequence matrices in exact arithmetic."""
    return tuple(
        tuple(sum((Fraction(A[i][k]) * Fraction(B[k][j]) for k in range(len(B))), Fraction(0)) for j in range(len(B[0])))
        for i in range(len(A))
    )


def _spectral_upper(rows) -> float:
    """Certified upper bound for the spectral norm of an exact matrix.

    min of sqrt(||A||_1 ||A||_inf), the Frobenius norm and sqrt(n) ||A||_inf;
    each is a valid bound and all are evaluated exactly before rounding up.
    """
    n = len(rows)
    rows = [[Fraction(x) for x in r] for r in rows]
    row_sum = max(sum(abs(x) for x in r) for r in rows)
    col_sum = max(sum(abs(rows[i][j]) for i in range(n)) for j in range(n))
    frob2 = sum(x * x for r in rows for x in r)
    return min(_sqrt_up(row_sum * col_sum), _sqrt_up(frob2), _sqrt_up(n * row_sum * row_sum))


class NormBounds(NamedTuple):
    upper: float
    lower: float


def matrix_norm_bounds(A: IntegerMatrix) -> NormBounds:
    """Certified ``upper >= ||A||_2`` and ``lower <= sigma_min(A)``.

    ``lower`` is ``1 / upper(||A^-1||)`` rounded down, or 0 for singular A.
    """
    key = "norm_bounds"
    if key not in A._cache:
        upper = _spectral_upper(A.rows)
        lower = 0.0 if A.det == 0 else _recip_down(_spectral_upper(A.inverse()))
        A._cache[key] = NormBounds(upper, lower)
    return A._cache[key]


def inverse_norm_upper(A: IntegerMatrix) -> float:
    return _spectral_upper(A.inverse())


# ---------------------------------------------------------------------------
# operator specification


@dataclass(frozen=True)
class FractionalSpec:
    """Parameters ``(n, alpha, alpha_1..alpha_m, A_1..A_m)`` of T_{alpha,m}."""

    n: int
    alpha: float
    exponents: tuple[float, ...]
    matrices: tuple[IntegerMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(float(a) for a in self.exponents))
        object.__setattr__(
            self,
            "matrices",
            tuple(M if isinstance(M, IntegerMatrix) else IntegerMatrix(tuple(map(tuple, M))) for M in self.matrices),
        )

    @property
    def m(self) -> int:
        return len(self.exponents)

    @classmethod
    def riesz(cls, n: int, alpha: float) -> "FractionalSpec":
        if not 0 < alpha < n:
            raise InvalidParameter(f"Riesz potential needs 0 < alpha < n, got alpha={alpha}, n={n}")
        return cls(n, alpha, (n - alpha,), (IntegerMatrix.identity(n),))

    @classmethod
    def reflection_pair(cls, n: int = 1) -> "FractionalSpec":
        """alpha = 0, m = 2, A_1 = I, A_2 = -I, equal exponents n/2."""
        return cls(n, 0.0, (n / 2, n / 2), (IntegerMatrix.identity(n), IntegerMatrix.scalar(n, -1)))

    def d_inv(self) -> float:
        """Certified upper bound of max_k ||A_k^-1||."""
        return max(inverse_norm_upper(A) for A in self.matrices)

    def d_fwd(self) -> float:
        """Certified upper bound of max_k ||A_k||."""
        return max(matrix_norm_bounds(A).upper for A in self.matrices)

    def inverse_images(self, i0: Sequence[int]) -> list[tuple[Fraction, ...]]:
        return [A.apply_inverse(i0) for A in self.matrices]

    def fingerprint(self) -> str:
        import hashlib

        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "m": self.m,
            "exponents": list(self.exponents),
            "matrices": [A.to_json() for A in self.matrices],
        }

    @classmethod
    def from_json(cls, obj) -> "FractionalSpec":
        for key in ("n", "alpha", "exponents", "matrices"):
            if key not in obj:
                raise SpecError(f"spec is missing field {key!r}")
        n = int(obj["n"])
        exps = obj["exponents"]
        mats = obj["matrices"]
        m = int(obj.get("m", len(exps)))
        if len(exps) != m:
            raise SpecError(f"spec field 'exponents' has {len(exps)} entries but m = {m}")
        if len(mats) != m:
            raise SpecError(f"spec field 'matrices' has {len(mats)} entries but m = {m}")
        parsed = []
        for k, M in enumerate(mats):
            if len(M) != n:
                raise SpecError(f"spec field 'matrices[{k}]' has {len(M)} rows, expected {n}")
            for r, row in enumerate(M):
                if len(row) != n:
                    raise SpecError(f"spec field 'matrices[{k}][{r}]' has {len(row)} entries, expected {n}")
                for c, x in enumerate(row):
                    if isinstance(x, bool) or not isinstance(x, int):
                        raise SpecError(f"spec field 'matrices[{k}][{r}][{c}]' must be an integer, got {x!r}")
            parsed.append(IntegerMatrix(tuple(tuple(row) for row in M)))
        return cls(n, float(obj["alpha"]), tuple(float(a) for a in exps), tuple(parsed))


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def validate_spec(s: FractionalSpec) -> ValidationReport:
    v = []
    if s.n < 1:
        v.append(f"dimension n must be >= 1, got {s.n}")
    if not 0 <= s.alpha < s.n:
        v.append(f"alpha must lie in [0, n), got {s.alpha}")
    if s.m < 1 or not s.m > 1 - s.alpha / max(s.n, 1):
        v.append(f"m = {s.m} must be an integer > 1 - alpha/n = {1 - s.alpha / max(s.n, 1):g}")
    if len(s.matrices) != s.m:
        v.append(f"{len(s.matrices)} matrices given for m = {s.m}")
    for k, a in enumerate(s.exponents, 1):
        if not a > 0:
            v.append(f"exponent alpha_{k} = {a} is not positive")
    if abs(math.fsum(s.exponents) - (s.n - s.alpha)) > SUM_TOL:
        v.append(f"exponents sum to {math.fsum(s.exponents)!r}, expected n - alpha = {s.n - s.alpha!r}")
    for k, A in enumerate(s.matrices, 1):
        if A.n != s.n:
            v.append(f"A_{k} is {A.n}x{A.n}, expected {s.n}x{s.n}")
        elif A.det == 0:
            v.append(f"A_{k} is singular")
    if s.alpha == 0:
        for k, l in itertools.combinations(range(len(s.matrices)), 2):
            Ak, Al = s.matrices[k], s.matrices[l]
            if Ak.n == Al.n == s.n and (Ak - Al).det == 0:
                v.append(f"A_{k + 1} - A_{l + 1} is singular (required invertible when alpha = 0)")
    return ValidationReport(v)


def load_json(path) -> object:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON ({exc})") from None
