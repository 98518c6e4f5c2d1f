import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmeadapt.branches import Affine, Custom
from mmeadapt.constructions import (
    make_doubling,
    make_eqnonadapt,
    make_fig1_counterexample,
    make_fig2b,
    make_fig_c,
    make_golden_affine,
    make_nonpolynonadapt,
)
from mmeadapt.errors import (
    Inadmissible,
    MultipleSingularities,
    NotExpanding,
    NotMarkov,
    NotMonotone,
    OrbitHitsBoundary,
    UntrackedPoint,
)
from mmeadapt.intervalmap import (
    MarkovIntervalMap,
    SignedPoint,
    b_range_from_bracket,
    b_range_on_cylinder,
    cylinder_bracket,
    detect_singularities,
    itinerary,
    logdist_bracket,
    prepare,
    tilde_orbit,
    tilde_step,
    transition_matrix,
    transitive_component,
    validate,
)

MAPS = {
    "doubling": make_doubling,
    "golden": make_golden_affine,
    "eqnonadapt": make_eqnonadapt,
    "nonpoly": make_nonpolynonadapt,
    "fig_c": make_fig_c,
    "fig1": make_fig1_counterexample,
    "fig2b": make_fig2b,
}


class TestValidate:
    def test_doubling(self):
        rep = validate(make_doubling())
        assert rep.lambda_exp == pytest.approx(2.0)
        assert rep.markov_mismatch <= 1e-12

    def test_perturbed_partition_not_markov(self):
        fmap = MarkovIntervalMap((0.0, 0.501, 1.0), (Affine(2, 0), Affine(2, -1)))
        with pytest.raises(NotMarkov):
            validate(fmap)

    def test_identity_not_expanding(self):
        with pytest.raises(NotExpanding):
            validate(MarkovIntervalMap((0.0, 1.0), (Affine(1, 0),)))

    def test_fold_not_monotone(self):
        tent = Custom(lambda x: 1 - abs(2 * x - 1), lambda x: -2.0 if x > 0.5 else 2.0, "tent")
        with pytest.raises(NotMonotone):
            validate(MarkovIntervalMap((0.0, 1.0), (tent,)))

    @pytest.mark.parametrize("name", sorted(MAPS))
    def test_gallery_valid(self, name):
        assert validate(MAPS[name]()).lambda_exp > 1

    def test_golden_matrix(self):
        np.testing.assert_array_equal(transition_matrix(make_golden_affine()), [[1, 1], [1, 0]])


class TestSignedDynamics:
    def test_fig1_fold(self):
        fmap = make_fig1_counterexample()
        assert tilde_step(fmap, SignedPoint(0.5, 1)) == SignedPoint(0.5, -1)
        assert tilde_step(fmap, SignedPoint(0.5, -1)) == SignedPoint(0.5, -1)

    def test_endpoint_fixed(self):
        assert tilde_step(make_eqnonadapt(), SignedPoint(0.0)) == SignedPoint(0.0)

    def test_fig2b_two_cycle(self):
        fmap = make_fig2b()
        points, cls = tilde_orbit(fmap, SignedPoint(0.3, 1))
        assert cls.periodic and cls.period == 2
        assert points[1] == SignedPoint(0.0)

    def test_interior_partition_point_needs_side(self):
        with pytest.raises(UntrackedPoint):
            tilde_step(make_fig2b(), SignedPoint(0.3))

    @pytest.mark.parametrize("name", sorted(MAPS))
    def test_side_matches_nearby_orbit(self, name):
        # the predicted side of f~(x+/-) agrees with f(x +/- h) for small h
        fmap = MAPS[name]()
        h = 1e-7
        for x in fmap.partition[1:-1]:
            for side in (1, -1):
                y = tilde_step(fmap, SignedPoint(x, side))
                near = fmap(x + side * h)
                if y.side != 0:
                    assert (near - y.x) * y.side > 0
                else:
                    assert abs(near - y.x) < 0.05


class TestSingularities:
    def test_eqnonadapt(self):
        (info,) = detect_singularities(make_eqnonadapt())
        assert info.p == 0.0 and info.periodic and info.orbit_class.period == 1
        assert info.holder.exponent == pytest.approx(0.5)

    def test_nonpoly_not_holder(self):
        (info,) = detect_singularities(make_nonpolynonadapt())
        assert info.p == 0.5 and not info.periodic and info.holder is None

    def test_affine_maps_regular(self):
        assert detect_singularities(make_doubling()) == []
        assert detect_singularities(make_golden_affine()) == []

    def test_two_singularities_rejected(self):
        left = make_eqnonadapt().branches[0]
        right = make_fig_c().branches[1]
        fmap = MarkovIntervalMap((0.0, 0.5, 1.0), (left, right))
        with pytest.raises(MultipleSingularities):
            prepare(fmap)


class TestCoding:
    def test_itinerary_third(self):
        assert itinerary(make_doubling(), 1 / 3, 4) == (0, 1, 0, 1)

    def test_itinerary_tenth(self):
        # 0.1 -> 0.2 -> 0.4 -> 0.8: the point itself is the first symbol
        assert itinerary(make_doubling(), 0.1, 4) == (0, 0, 0, 1)

    def test_boundary_hit(self):
        with pytest.raises(OrbitHitsBoundary) as err:
            itinerary(make_doubling(), 0.25, 5)
        assert err.value.step == 1

    def test_bracket_examples(self):
        fmap = make_doubling()
        assert cylinder_bracket(fmap, "01") == pytest.approx((0.25, 0.5), abs=1e-15)
        for n in range(1, 12):
            assert cylinder_bracket(fmap, (0,) * n) == pytest.approx((0.0, 2.0**-n), abs=1e-15)

    def test_inadmissible(self):
        with pytest.raises(Inadmissible):
            cylinder_bracket(make_golden_affine(), "11")

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 1.0, exclude_min=True, exclude_max=True))
    def test_semiconjugacy(self, x):
        fmap = make_golden_affine()
        try:
            w = itinerary(fmap, x, 12)
        except OrbitHitsBoundary:
            return
        l, r = cylinder_bracket(fmap, w)
        assert l - 1e-12 <= x <= r + 1e-12

    def test_nesting_and_contraction(self):
        fmap = make_fig_c()
        x = 0.7123
        prev = (0.0, 1.0)
        for n in range(1, 25):
            l, r = cylinder_bracket(fmap, itinerary(fmap, x, n))
            assert prev[0] - 1e-15 <= l <= r <= prev[1] + 1e-15
            prev = (l, r)
        assert prev[1] - prev[0] < 2.0**-20


class TestLogBrackets:
    def test_nonpoly_double_exponential(self):
        # [1 0^n 1] sits within 2^(-2^n) of p = 1/2
        fmap, sing = prepare(make_nonpolynonadapt())
        for n in range(1, 60):
            t_near, t_far = logdist_bracket(fmap, sing, (1,) + (0,) * n + (1,))
            assert t_far >= 2.0**n * math.log(2) * (1 - 1e-12)
            assert t_near > t_far

    def test_matches_float_bracket(self):
        fmap, sing = prepare(make_eqnonadapt())
        for n in range(1, 6):
            w = (0,) * n + (1,)
            l, r = cylinder_bracket(fmap, w)
            t_near, t_far = logdist_bracket(fmap, sing, w)
            assert t_near == pytest.approx(-math.log(l), rel=1e-9)
            assert t_far == pytest.approx(-math.log(r), rel=1e-9)

    def test_prefix_of_code_touches_p(self):
        fmap, sing = prepare(make_eqnonadapt())
        assert logdist_bracket(fmap, sing, (0, 0, 0))[0] == math.inf

    def test_b_range_from_bracket(self):
        assert b_range_from_bracket(math.exp(-5), math.exp(-3), 0.0) == pytest.approx((3, 5))
        assert b_range_from_bracket(1.2, 0.2 + math.e, 0.2) == pytest.approx((0.0, 1.0))

    def test_power_law_growth(self):
        # points with f^n(x) < 1/16 satisfy b(x) > log(16) 2^n; [0^(n+3) 1] lies there
        fmap, sing = prepare(make_eqnonadapt())
        for n in range(1, 40):
            lower, _ = b_range_on_cylinder(fmap, sing, (0,) * (n + 3) + (1,))
            assert lower >= math.log(16) * 2.0**n


class TestComponent:
    def test_golden(self):
        comp = transitive_component(make_golden_affine(), 0)
        np.testing.assert_array_equal(comp.matrix, [[1, 1], [1, 0]])
        assert comp.entropy == pytest.approx(math.log((1 + math.sqrt(5)) / 2), abs=1e-12)

    def test_mass_uses_original_labels(self):
        comp = transitive_component(make_doubling(), 1)
        assert comp.mass((1, 0)) == pytest.approx(0.25)
