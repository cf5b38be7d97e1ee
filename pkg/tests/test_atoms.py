import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latfrac.atoms import (
    Atom,
    atom_from_coefficients,
    atom_operator_norm,
    atomic_synthesis,
    domination_check,
    exact_moments,
    make_atom,
    multi_indices,
    region_geometry,
    sample_in_R,
    synthesis_sup_bound,
    validate_atom,
)
from latfrac.errors import CannotConstruct, InvalidParameter
from latfrac.lattice import CubeWindow, FractionalSpec, LatticeSequence, atom_degree, lp_norm

REFLECT = FractionalSpec.reflection_pair(1)
RIESZ = FractionalSpec.riesz(1, 0.5)


def _seq(center, values):
    return LatticeSequence.dense(CubeWindow((center,), len(values) // 2), np.asarray(values, dtype=float))


class TestConstruction:
    def test_first_difference_of_delta(self):
        Q = CubeWindow((0,), 1)
        a = atom_from_coefficients(Q, 1.0, [0, 1])
        assert a.sequence[(0,)] == 1 / 3 and a.sequence[(1,)] == -1 / 3 and a.sequence[(-1,)] == 0
        assert a.sup_norm <= 1 / 3
        assert validate_atom(a).valid

    def test_sum_vanishes_exactly(self):
        for seed in range(50):
            a = make_atom(CubeWindow((seed - 25,), 1 + seed % 7), 1.0, seed)
            assert int(a.coeffs.sum()) == 0

    def test_second_order_moments(self):
        Q = CubeWindow((3,), 5)
        for seed in range(20):
            a = make_atom(Q, 0.5, seed)
            assert a.degree == 1
            vals = [Fraction(int(c)) for c in a.coeffs]
            pts = [int(x) for x in Q.points()[:, 0]]
            assert sum(vals) == 0
            assert sum(i * v for i, v in zip(pts, vals)) == 0

    def test_sup_norm_attained_without_overshoot(self):
        for p in (1.0, 2 / 3, 0.5):
            a = make_atom(CubeWindow((0, 0), 4), p, 3)
            limit = 81 ** (-1 / p)
            assert Fraction(int(np.max(np.abs(a.coeffs)))) * Fraction(a.scale) <= Fraction(limit)
            assert a.sup_norm == pytest.approx(limit, rel=1e-14)

    def test_degenerate_cube(self):
        with pytest.raises(CannotConstruct):
            make_atom(CubeWindow((0,), 0), 1.0, 0)
        with pytest.raises(CannotConstruct):
            make_atom(CubeWindow((0,), 0), 0.5, 0)
        make_atom(CubeWindow((0,), 1), 0.5, 0)  # 3 points, room for 2 differences

    def test_families_and_seeds(self):
        Q = CubeWindow((2, -1), 6)
        for fam in ("uniform", "smooth"):
            a1, a2 = make_atom(Q, 1.0, 9, fam), make_atom(Q, 1.0, 9, fam)
            assert a1.digest() == a2.digest() and validate_atom(a1).valid
        assert make_atom(Q, 1.0, 9).digest() != make_atom(Q, 1.0, 10).digest()
        with pytest.raises(InvalidParameter):
            make_atom(Q, 1.0, 0, "gaussian")

    def test_bad_coefficients(self):
        Q = CubeWindow((0,), 2)
        with pytest.raises(InvalidParameter):
            atom_from_coefficients(Q, 1.0, [0.5, 0, 0, 0])
        with pytest.raises(InvalidParameter):
            atom_from_coefficients(Q, 1.0, [1, 0, 0])
        with pytest.raises(CannotConstruct):
            atom_from_coefficients(Q, 1.0, [0, 0, 0, 0])

    def test_json_roundtrip(self):
        a = make_atom(CubeWindow((1, 2), 3), 2 / 3, 5, "smooth")
        obj = json.loads(json.dumps(a.to_json()))
        assert {"p", "cube", "d_p"} <= set(obj)
        back = Atom.from_json(obj)
        assert back.digest() == a.digest()
        np.testing.assert_array_equal(back.sequence.dense_values(), a.sequence.dense_values())


class TestValidation:
    def test_examples(self):
        Q = CubeWindow((0,), 1)
        assert validate_atom(_seq(0, [1 / 3, 0, -1 / 3]), Q, 1.0).valid
        r = validate_atom(_seq(0, [0.5, 0, -0.5]), Q, 1.0)
        assert not r.sup_ok and r.moments_ok and "(a2)" in r.violations[0]
        r = validate_atom(_seq(0, [1 / 3, 1 / 3, -1 / 3]), Q, 1.0)
        assert r.sup_ok and not r.moments_ok
        r = validate_atom(_seq(0, [1 / 3, 1 / 3, -1 / 3]), Q, 1.0, exact=True)
        assert not r.moments_ok and r.max_moment == pytest.approx(1 / 3)

    def test_support_violation(self):
        r = validate_atom(_seq(1, [0.1, 0, -0.1]), CubeWindow((0,), 1), 1.0)
        assert not r.support_ok and not r.valid

    def test_exact_dyadic_values(self):
        Q = CubeWindow((0,), 2)
        good = _seq(0, [1 / 64, -1 / 32, 1 / 64, 0, 0])
        assert validate_atom(good, Q, 0.5, exact=True).valid
        bad = _seq(0, [1 / 64, -1 / 32, 0.0, 1 / 64, 0])
        assert not validate_atom(bad, Q, 0.5, exact=True).moments_ok

    def test_thousand_atoms(self):
        rng = np.random.default_rng(0)
        for k in range(1000):
            n = 1 + k % 2
            p = (0.5, 2 / 3, 1.0)[k % 3]
            N = max(int(rng.integers(1, 33 if n == 1 else 9)), -(-(atom_degree(p, n) + 1) // 2))
            center = tuple(int(x) for x in rng.integers(-1000, 1001, size=n))
            rep = validate_atom(make_atom(CubeWindow(center, N), p, k, ("uniform", "smooth")[k % 2]))
            assert rep.valid and rep.exact, rep.violations

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([0.5, 2 / 3, 1.0]), st.integers(1, 2),
           st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=2))
    def test_translation_covariance(self, seed, p, n, shift):
        shift = shift[:n]
        a = make_atom(CubeWindow((0,) * n, 3), p, seed)
        b = a.translated(shift)
        assert validate_atom(b).valid
        # the shifted values against the shifted monomials give the same moments
        betas = multi_indices(n, a.degree)
        base = exact_moments(a.cube.points(), a.coeffs.ravel(), betas)
        moved = exact_moments(b.cube.points() - np.asarray(shift), b.coeffs.ravel(), betas)
        assert base == moved == [0] * len(betas)
        # and the tolerance check with centered monomials agrees
        assert validate_atom(b.sequence, b.cube, p).valid

    def test_multi_indices(self):
        assert sorted(multi_indices(2, 1)) == [(0, 0), (0, 1), (1, 0)]
        assert len(multi_indices(3, 2)) == 10


class TestGeometry:
    def test_symmetric_centers(self):
        g = region_geometry(CubeWindow((0,), 1), REFLECT)
        assert g.stars[0] == g.stars[1]
        assert g.stars[0].radius >= 4
        js = np.arange(-200, 201)[:, None]
        lab = g.label(js)
        assert np.all(lab[np.abs(js[:, 0]) <= 4] == 0)
        assert set(lab[lab > 0].tolist()) == {1}

    def test_midpoint_split(self):
        g = region_geometry(CubeWindow((8,), 1), REFLECT)
        js = np.arange(-100, 101)[:, None]
        lab = g.label(js)
        in_r = lab > 0
        assert np.all(lab[in_r & (js[:, 0] >= 0)] == 1)
        assert np.all(lab[in_r & (js[:, 0] < 0)] == 2)
        assert lab[100] == 1  # j = 0 is a tie

    def test_single_matrix(self):
        g = region_geometry(CubeWindow((3, 3), 2), FractionalSpec.riesz(2, 1.0))
        w = CubeWindow((3, 3), 30)
        lab = g.label(w.points())
        assert set(np.unique(lab).tolist()) == {0, 1}

    def test_rational_centers(self):
        spec = FractionalSpec(1, 0.0, (0.5, 0.5), (((2,),), ((-3,),)))
        g = region_geometry(CubeWindow((7,), 1), spec)
        assert g.centers == [(Fraction(7, 2),), (Fraction(-7, 3),)]
        assert g.stars[0].center == (3,) and g.stars[1].center == (-2,)
        # the enlarged cube covers the exact one around the rational center
        exact = [j for j in range(-40, 41) if abs(j - Fraction(7, 2)) <= 4 * g.d_inv * 1]
        assert np.all(g.stars[0].contains(np.array(exact)[:, None]))

    @pytest.mark.parametrize("spec", [REFLECT, FractionalSpec(2, 0.5, (0.9, 0.6), (((2, 1), (1, 1)), ((1, 0), (0, -1))))])
    def test_exhaustive_partition(self, spec):
        rng = np.random.default_rng(1)
        n = spec.n
        for _ in range(3):
            Q = CubeWindow(tuple(int(x) for x in rng.integers(-20, 21, size=n)), int(rng.integers(1, 4)))
            g = region_geometry(Q, spec)
            pts = CubeWindow((0,) * n, 64).points()
            lab = g.label(pts)
            # every point gets exactly one label: 0 for the stars, one l for R
            assert np.all((lab == 0) == g.in_stars(pts))
            # nearest-center property against exact rational distances
            sample = pts[rng.choice(len(pts), size=min(300, len(pts)), replace=False)]
            for j, l in zip(sample.tolist(), g.label(sample).tolist()):
                if l == 0:
                    continue
                dist = [sum((Fraction(x) - c) ** 2 for x, c in zip(j, ctr)) for ctr in g.centers]
                assert dist[l - 1] == min(dist) and dist.index(min(dist)) == l - 1

    def test_samples_in_R(self):
        g = region_geometry(CubeWindow((5,), 3), REFLECT)
        pts = sample_in_R(g, 500, np.random.default_rng(0))
        assert len(pts) == 500 and np.all(g.label(pts) > 0)


class TestDomination:
    def test_rejects_points_outside_R(self):
        a = make_atom(CubeWindow((0,), 2), 1.0, 0)
        with pytest.raises(InvalidParameter):
            domination_check(RIESZ, a, [[0]])

    @pytest.mark.parametrize("spec", [RIESZ, REFLECT])
    def test_ratios_finite_and_bounded(self, spec):
        rng = np.random.default_rng(2)
        for N in (1, 4, 16):
            a = make_atom(CubeWindow((int(rng.integers(-50, 51)),), N), 1.0, N)
            g = region_geometry(a.cube, spec)
            rec = domination_check(spec, a, sample_in_R(g, 200, rng), g)
            assert np.all(np.isfinite(rec.ratios)) and np.all(rec.rhs > 0)
            assert rec.max_ratio < 50

    def test_decay_slopes_agree(self):
        a = make_atom(CubeWindow((0,), 2), 1.0, 4, "smooth")
        g = region_geometry(a.cube, RIESZ)
        js = np.array([[int(x)] for x in np.geomspace(100, 10_000, 12)])
        rec = domination_check(RIESZ, a, js, g)
        s_lhs = np.polyfit(np.log(js[:, 0]), np.log(rec.lhs), 1)[0]
        s_rhs = np.polyfit(np.log(js[:, 0]), np.log(rec.rhs), 1)[0]
        assert abs(s_lhs - s_rhs) <= 0.3

    def test_constant_stable_when_cube_doubles(self):
        rng = np.random.default_rng(3)
        maxima = []
        for N in (4, 8):
            best = 0.0
            for s in range(10):
                a = make_atom(CubeWindow((0,), N), 1.0, 100 * N + s, "smooth")
                g = region_geometry(a.cube, RIESZ)
                best = max(best, domination_check(RIESZ, a, sample_in_R(g, 50, rng), g).max_ratio)
            maxima.append(best)
        assert 0.5 <= maxima[1] / maxima[0] <= 2


class TestOperatorNorm:
    def test_split_adds_up(self):
        a = make_atom(CubeWindow((10,), 4), 1.0, 1)
        res = atom_operator_norm(REFLECT, a, 1.0)
        assert not res.divergent
        assert res.star_mass + res.r_mass == pytest.approx(res.norm, rel=1e-12)

    def test_scale_commutes(self):
        a = make_atom(CubeWindow((0,), 3), 1.0, 2)
        from latfrac.operators import apply_T

        direct = lp_norm(apply_T(RIESZ, a.sequence, CubeWindow.origin(1, 300)).values, 2.0)
        res = atom_operator_norm(RIESZ, a, 2.0, CubeWindow.origin(1, 300))
        assert res.norm == pytest.approx(direct, rel=1e-12)


class TestSynthesis:
    def test_examples(self):
        a = make_atom(CubeWindow((0,), 2), 1.0, 0)
        seq, mass = atomic_synthesis([a], [1.0])
        np.testing.assert_array_equal(seq.support()[1], a.sequence.support()[1])
        assert mass == 1.0
        zero, mass = atomic_synthesis([a, a], [1.0, -1.0])
        assert not np.any(zero.support()[1]) and mass == 2.0

    def test_sup_bound(self):
        rng = np.random.default_rng(4)
        atoms = [make_atom(CubeWindow((int(rng.integers(-5, 6)),), int(rng.integers(1, 5))), 0.5, s) for s in range(8)]
        lam = rng.uniform(-2, 2, size=8)
        seq, mass = atomic_synthesis(atoms, lam)
        assert lp_norm(seq, np.inf) <= synthesis_sup_bound(atoms, lam) * (1 + 1e-12)
        assert mass == pytest.approx(np.sum(np.abs(lam) ** 0.5))

    def test_errors(self):
        a1 = make_atom(CubeWindow((0,), 2), 1.0, 0)
        a2 = make_atom(CubeWindow((0, 0), 2), 1.0, 0)
        with pytest.raises(InvalidParameter):
            atomic_synthesis([a1, a2], [1, 1])
        with pytest.raises(InvalidParameter):
            atomic_synthesis([a1], [1, 1])
        with pytest.raises(InvalidParameter):
            atomic_synthesis([], [])
