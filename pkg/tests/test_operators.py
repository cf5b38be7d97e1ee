import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latfrac.errors import InvalidParameter, SpecError
from latfrac.lattice import CubeWindow, FractionalSpec, LatticeSequence
from latfrac.operators import (
    apply_riesz,
    apply_T,
    default_window,
    fractional_maximal,
    fractional_maximal_fast,
    i1_constant,
    lemma_tail_bound,
    lq_tail_bound,
    maximal_at,
    region_decompose_alpha0,
    tail_sum,
    tail_sum_certified,
    truncated_lq_norm,
)

REFLECT = FractionalSpec.reflection_pair(1)


# ---------------------------------------------------------------------------
# tail sums


class TestTails:
    def test_lemma_examples(self):
        assert lemma_tail_bound(1, 1, 1).bound == 8.0
        assert lemma_tail_bound(1, 1, 2).bound == 4.0
        assert lemma_tail_bound(1, 2, 1).bound == 8.0

    def test_tail_examples(self):
        assert abs(tail_sum(1, 1, 1) - math.pi**2 / 3) < 1e-6
        assert abs(tail_sum(1, 1, 2) - 2 * (math.pi**2 / 6 - 1)) < 1e-6
        assert tail_sum(2, 1, 4) < tail_sum(2, 1, 2)

    @pytest.mark.parametrize("eps", [0.5, 1.0, 2.0, 3.7])
    @pytest.mark.parametrize("N", [1, 3, 16])
    def test_one_dim_against_hurwitz_zeta(self, eps, N):
        exact = float(2 * mpmath.zeta(1 + eps, N))
        ts = tail_sum_certified(1, eps, N, precision=1e-9)
        assert abs(ts.value - exact) <= ts.error + 1e-15
        assert ts.error <= 1e-9

    def test_two_dim_against_epstein_zeta(self):
        # sum over Z^2 \ {0} of |j|^-2s = 4 zeta(s) beta(s)
        s = mpmath.mpf(1.5)
        exact = float(4 * mpmath.zeta(s) * mpmath.dirichlet(s, [0, 1, 0, -1]))
        ts = tail_sum_certified(2, 1.0, 1, precision=1e-8)
        assert abs(ts.value - exact) <= ts.error + 1e-14

    def test_grid_below_lemma(self):
        for n in (1, 2, 3):
            for eps in (0.5, 1.0, 2.0):
                for N in (1, 2, 4, 8, 16):
                    bound = lemma_tail_bound(n, eps, N).bound
                    assert tail_sum_certified(n, eps, N, precision=1e-7 * bound).upper <= bound

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.floats(0.3, 4), st.integers(1, 40))
    def test_random_below_lemma(self, n, eps, N):
        bound = lemma_tail_bound(n, eps, N).bound
        assert tail_sum_certified(n, eps, N, precision=1e-3 * bound).upper <= bound

    def test_bad_arguments(self):
        with pytest.raises(InvalidParameter):
            tail_sum(1, 0, 1)
        with pytest.raises(InvalidParameter):
            lemma_tail_bound(1, 1, 0)


# ---------------------------------------------------------------------------
# kernel evaluation


def _closed_form(spec, i, j):
    """prod_k |i - A_k j|^-a_k in 50-digit arithmetic, 0 if any factor vanishes."""
    mpmath.mp.dps = 50
    val = mpmath.mpf(1)
    for A, a in zip(spec.matrices, spec.exponents):
        d = np.asarray(i) - A.array @ np.asarray(j)
        sq = int(d @ d)
        if sq == 0:
            return 0.0
        val *= mpmath.mpf(sq) ** (-mpmath.mpf(a) / 2)
    return float(val)


class TestKernel:
    def test_examples(self):
        b = LatticeSequence.delta((1,))
        r = apply_T(REFLECT, b, CubeWindow((1,), 1))
        assert r.values[(2,)] == pytest.approx(3**-0.5, rel=1e-15)
        assert r.values[(1,)] == 0.0
        spec = FractionalSpec.riesz(2, 1.0)
        assert apply_T(spec, LatticeSequence.delta((0, 0)), CubeWindow((3, 4), 0)).values[(3, 4)] == pytest.approx(0.2, rel=1e-15)

    def test_riesz_examples(self):
        assert apply_riesz(LatticeSequence.delta((0, 0)), 1.0, CubeWindow((3, 4), 0)).values[(3, 4)] == pytest.approx(0.2, rel=1e-15)
        for n, a in ((1, 0.5), (2, 1.3), (3, 2.0)):
            assert apply_riesz(LatticeSequence.delta((0,) * n), a, CubeWindow.origin(n, 0)).values[(0,) * n] == 0.0
        b = LatticeSequence.sparse(1, [((0,), 1.0), ((1,), 1.0)])
        v = apply_riesz(b, 0.5, CubeWindow((3,), 0)).values[(3,)]
        assert v == pytest.approx(3**-0.5 + 2**-0.5, rel=1e-15)
        assert v == pytest.approx(1.2844570503761732, rel=1e-12)

    def test_invalid_spec_rejected(self):
        bad = FractionalSpec(1, 0.0, (0.5, 0.5), (((1,),), ((1,),)))
        with pytest.raises(SpecError):
            apply_T(bad, LatticeSequence.delta((0,)), CubeWindow.origin(1, 1))

    def test_riesz_rejects_alpha(self):
        with pytest.raises(InvalidParameter):
            apply_riesz(LatticeSequence.delta((0,)), 1.0)

    def test_default_window_recorded(self):
        b = LatticeSequence.delta((2,))
        r = apply_T(REFLECT, b)
        assert r.window == default_window(REFLECT, b) == CubeWindow.origin(1, 4 * 1 * 2 + 16)
        assert r.to_json()["metadata"]["window_policy"] == "default"

    def test_against_high_precision_oracle(self):
        rng = np.random.default_rng(11)
        specs = [REFLECT, FractionalSpec.riesz(1, 0.5), FractionalSpec.riesz(2, 0.7), FractionalSpec.reflection_pair(2)]
        specs.append(FractionalSpec(2, 0.5, (0.9, 0.6), (((2, 1), (1, 1)), ((1, 0), (0, -1)))))
        for _ in range(100):
            spec = specs[int(rng.integers(len(specs)))]
            i = tuple(int(x) for x in rng.integers(-20, 21, size=spec.n))
            j = tuple(int(x) for x in rng.integers(-20, 21, size=spec.n))
            got = apply_T(spec, LatticeSequence.delta(i), CubeWindow(j, 0)).values[j]
            assert got == pytest.approx(_closed_form(spec, i, j), rel=1e-12, abs=0)

    def test_riesz_reduction_sparse(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(1, 4))
            a = float(rng.uniform(0.1, n - 0.1))
            pts = rng.integers(-10, 11, size=(int(rng.integers(1, 12)), n))
            pts = np.unique(pts, axis=0)
            b = LatticeSequence.from_points(pts, rng.uniform(-1, 1, size=len(pts)), n=n)
            out = CubeWindow(tuple(int(x) for x in rng.integers(-5, 6, size=n)), 2)
            t = apply_T(FractionalSpec.riesz(n, a), b, out).values.dense_values()
            r = apply_riesz(b, a, out).values.dense_values()
            np.testing.assert_allclose(t, r, rtol=1e-12, atol=1e-15 * np.abs(b.support()[1]).sum())

    def test_composition_domination(self):
        rng = np.random.default_rng(2)
        spec = FractionalSpec(2, 0.8, (0.7, 0.5), (((2, 1), (1, 1)), ((1, 0), (0, -1))))
        for _ in range(10):
            b = LatticeSequence.dense(CubeWindow((0, 0), 3), rng.uniform(-1, 1, size=(7, 7)))
            out = CubeWindow((1, -1), 4)
            lhs = np.abs(apply_T(spec, b, out).values.dense_values().ravel())
            rhs = np.zeros_like(lhs)
            for A in spec.matrices:
                imgs = out.points() @ A.array.T
                for k, j in enumerate(imgs):
                    rhs[k] += apply_riesz(b.abs(), spec.alpha, CubeWindow(tuple(int(x) for x in j), 0)).values.dense_values().item()
            assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-15)

    def test_batching_does_not_change_values(self):
        rng = np.random.default_rng(0)
        b = LatticeSequence.dense(CubeWindow.origin(1, 20), rng.uniform(-1, 1, 41))
        full = apply_T(REFLECT, b, CubeWindow.origin(1, 60)).values
        pts = CubeWindow.origin(1, 60).points()
        for j in pts[::7]:
            assert apply_T(REFLECT, b, CubeWindow(tuple(j), 0)).values.dense_values().item() == full[tuple(j)]


class TestTruncatedNorm:
    def test_riesz_delta_total(self):
        spec = FractionalSpec.riesz(1, 0.5)
        b = LatticeSequence.delta((0,))
        r = apply_T(spec, b, CubeWindow.origin(1, 10_000))
        tn = truncated_lq_norm(r, 4, b, spec)
        assert not tn.divergent
        total = tn.norm**4 + tn.tail
        assert abs(total - math.pi**2 / 3) / (math.pi**2 / 3) < 0.01
        assert tn.norm**4 <= math.pi**2 / 3 <= total

    def test_window_self_consistency(self):
        spec = FractionalSpec.riesz(1, 0.5)
        b = LatticeSequence.sparse(1, [((0,), 1.0), ((1,), -1.0)])
        small = truncated_lq_norm(apply_T(spec, b, CubeWindow.origin(1, 400)), 4, b, spec)
        big = truncated_lq_norm(apply_T(spec, b, CubeWindow.origin(1, 4000)), 4, b, spec)
        assert small.tail < 1e-9
        assert abs(small.norm - big.norm) < 1e-9
        assert (small.norm**4 + small.tail) * (1 + 1e-12) >= big.norm**4

    def test_divergence_flag(self):
        spec = FractionalSpec.riesz(1, 0.5)
        b = LatticeSequence.delta((0,))
        tn = truncated_lq_norm(apply_T(spec, b, CubeWindow.origin(1, 50)), 2, b, spec)
        assert tn.divergent and math.isinf(tn.tail)

    def test_tail_majorant_holds_pointwise(self):
        rng = np.random.default_rng(1)
        spec = FractionalSpec(2, 0.5, (0.9, 0.6), (((2, 1), (1, 1)), ((1, 0), (0, -1))))
        b = LatticeSequence.dense(CubeWindow((1, 2), 2), rng.uniform(-1, 1, (5, 5)))
        win = default_window(spec, b)
        tb = lq_tail_bound(spec, b, win, 3.0)
        outside = np.array([[win.radius + 1 + k, s] for k in range(0, 200, 13) for s in (-50, 0, 50)])
        vals = np.abs(apply_T(spec, b, CubeWindow((0, 0), win.radius + 210)).values.value_at(outside))
        dist = np.linalg.norm(outside - np.asarray(win.center), axis=1)
        assert np.all(vals <= tb.constant * dist ** (-tb.decay))


# ---------------------------------------------------------------------------
# maximal function


def _naive_maximal(b, alpha, j):
    pts, vals = b.support()
    reach = int(np.max(np.abs(pts - np.asarray(j)))) if len(pts) else 0
    best = 0.0
    n = b.n
    for N in range(reach + 1):
        inside = np.max(np.abs(pts - np.asarray(j)), axis=1) <= N
        best = max(best, math.fsum(np.abs(vals[inside]).tolist()) / (2 * N + 1) ** (n - alpha))
    return best


class TestMaximal:
    def test_examples(self):
        d = LatticeSequence.delta((0, 0))
        assert maximal_at(d, 0.0, [(2, 1)])[0] == pytest.approx(0.04, rel=1e-15)
        assert maximal_at(d, 1.0, [(2, 1)])[0] == pytest.approx(0.2, rel=1e-15)
        for a in (0.0, 0.5, 1.7):
            assert maximal_at(d, a, [(0, 0)])[0] == 1.0

    def test_fast_examples(self):
        d = LatticeSequence.dense(CubeWindow.origin(2, 0), [[1.0]])
        out = CubeWindow.origin(2, 3)
        np.testing.assert_allclose(fractional_maximal_fast(d, 0.5, out).dense_values(), fractional_maximal(d, 0.5, out).dense_values(), rtol=1e-12)
        z = LatticeSequence.dense(CubeWindow.origin(1, 4), np.zeros(9))
        assert not fractional_maximal_fast(z, 0.0, out=CubeWindow.origin(1, 6)).dense_values().any()

    def test_against_naive_loop(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(1, 3))
            b = LatticeSequence.dense(CubeWindow.origin(n, 3), rng.uniform(-1, 1, (7,) * n))
            a = float(rng.uniform(0, n - 0.01))
            js = rng.integers(-6, 7, size=(5, n))
            got = maximal_at(b, a, js)
            want = [_naive_maximal(b, a, j) for j in js]
            np.testing.assert_allclose(got, want, rtol=1e-13)

    def test_fast_matches_brute_radius8(self):
        rng = np.random.default_rng(4)
        b = LatticeSequence.dense(CubeWindow.origin(1, 8), rng.uniform(-1, 1, 17))
        out = CubeWindow.origin(1, 8)
        np.testing.assert_allclose(fractional_maximal_fast(b, 0.0, out).dense_values(), fractional_maximal(b, 0.0, out).dense_values(), rtol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.integers(1, 2), st.floats(0, 0.99))
    def test_sublinear(self, seed, n, frac):
        rng = np.random.default_rng(seed)
        a = frac * n
        w = CubeWindow.origin(n, 3)
        b1 = LatticeSequence.dense(w, rng.uniform(-1, 1, w.shape))
        b2 = LatticeSequence.dense(w, rng.uniform(-1, 1, w.shape))
        out = CubeWindow.origin(n, 5)
        m12 = fractional_maximal(b1 + b2, a, out).dense_values()
        m1 = fractional_maximal(b1, a, out).dense_values()
        m2 = fractional_maximal(b2, a, out).dense_values()
        assert np.all(m12 <= (m1 + m2) * (1 + 1e-12))

    def test_rejects_alpha(self):
        with pytest.raises(InvalidParameter):
            maximal_at(LatticeSequence.delta((0,)), 1.0, [(0,)])


# ---------------------------------------------------------------------------
# region split


class TestRegions:
    def test_i1_constant(self):
        series = math.fsum(2.0 ** (-0.5 * k) for k in range(60))
        assert i1_constant(0.5, 0.5) == pytest.approx(2.0**1.5 * series, rel=1e-8)
        assert i1_constant(0.5, 0.5) == pytest.approx(9.65685424949238, rel=1e-12)

    def test_n1_geometry(self):
        j0 = (5,)
        b = LatticeSequence.dense(CubeWindow.origin(1, 14), np.ones(29))
        diag = region_decompose_alpha0(REFLECT, b, j0)
        assert diag.d_sep == 2.0
        # I_1 = {0 < |i - 5| <= 5}, I_2 = {0 < |i + 5| <= 5} minus I_1
        assert diag.counts[0] == 10 and diag.counts[1] == 9
        assert sum(diag.counts) == 29 - 2

    def test_partition_and_bounds_random(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            j0 = (int(rng.choice([-1, 1]) * rng.integers(1, 40)),)
            w = CubeWindow((int(rng.integers(-60, 61)),), int(rng.integers(1, 20)))
            b = LatticeSequence.dense(w, rng.uniform(-1, 1, w.shape))
            diag = region_decompose_alpha0(REFLECT, b, j0)
            assert math.fsum(diag.partial) == pytest.approx(diag.total, abs=1e-12 * max(1.0, sum(diag.absolute)))
            assert all(diag.holds().values())

    def test_delta_in_i4_only(self):
        diag = region_decompose_alpha0(REFLECT, LatticeSequence.delta((100,)), (3,))
        assert diag.absolute[:3] == (0.0, 0.0, 0.0) and diag.absolute[3] > 0

    def test_rejects(self):
        with pytest.raises(InvalidParameter):
            region_decompose_alpha0(REFLECT, LatticeSequence.delta((1,)), (0,))
        with pytest.raises(InvalidParameter):
            region_decompose_alpha0(FractionalSpec.riesz(1, 0.5), LatticeSequence.delta((1,)), (2,))
