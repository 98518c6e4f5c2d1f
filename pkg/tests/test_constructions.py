import math

import numpy as np
import pytest

from mmeadapt.constructions import (
    GALLERY,
    LorenzParams,
    lorenz_family,
    lorenz_sample_map,
    make_eqadapt,
    make_power_map,
    nonsing_measure,
)
from mmeadapt.errors import BadEigenvalues, BadRho, ExponentTooSmall
from mmeadapt.intervalmap import detect_singularities, prepare, transition_matrix, validate


@pytest.mark.parametrize("name", sorted(GALLERY))
def test_gallery_validates(name):
    assert validate(GALLERY[name]()).lambda_exp > 1


@pytest.mark.parametrize("alpha", [1.05, 1.2, 1.5, 2.0, 3.0, 4.0])
def test_power_map_shape(alpha):
    fmap = make_power_map(alpha)
    np.testing.assert_array_equal(transition_matrix(fmap), [[1, 1], [1, 1]])
    (info,) = detect_singularities(fmap)
    assert info.p == 0.0 and info.periodic
    assert fmap.branches[0].closed_beta() == pytest.approx(1 - 1 / alpha)


class TestEqAdapt:
    def test_rho_bound(self):
        with pytest.raises(BadRho):
            make_eqadapt(math.exp(-math.exp(math.e)))
        with pytest.raises(BadRho):
            make_eqadapt(0.0)

    def test_terms_match_direct_formula(self):
        series = make_eqadapt(1e-8)[1]
        m = np.arange(1, 40)
        eta = 2 - 1 / np.log((m + 1) * math.log(2) + math.log(abs(math.log(1e-8))))
        np.testing.assert_allclose(series.terms(39), 2.0**-m * eta ** (m + 1), rtol=1e-12)

    def test_eta_below_two(self):
        series = make_eqadapt(1e-8)[1]
        assert np.all(series.eta(np.arange(1, 1000)) < 2)

    def test_partial_sums_stabilize(self):
        ps = make_eqadapt()[1].partial_sums(10**4)
        assert np.all(np.diff(ps) >= 0)
        assert abs(ps[-1] - ps[999]) <= 1e-10

    def test_singularity_periodic_at_zero(self):
        fmap, sing = prepare(make_eqadapt()[0])
        assert sing.p == 0.0 and sing.periodic


class TestNonsing:
    def test_requires_finite_mean(self):
        with pytest.raises(ExponentTooSmall):
            nonsing_measure(2.0)

    def test_weights_normalized(self):
        m = nonsing_measure(3.0, 10**5)
        # oracle: c = 1/zeta(3)
        assert m.normalizer == pytest.approx(1 / 1.2020569031595942, rel=1e-12)
        assert m.entropy > 0

    def test_cylinder_lower_bound(self):
        m = nonsing_measure(3.0, 10**5)
        for n in range(0, 101):
            assert m.cylinder_0n1(n) >= m.normalizer / (2 * (n + 1) ** 2)

    def test_tail_matches_zeta(self):
        m = nonsing_measure(3.0, 10**5)
        assert m.cylinder_0n1(0) == pytest.approx(1.0, abs=1e-12)


class TestLorenz:
    def test_rejects_bad_eigenvalues(self):
        with pytest.raises(BadEigenvalues):
            LorenzParams(1.0, -2.0, -0.45)

    def test_alpha(self):
        p = LorenzParams(1.0, -2.0, -0.51)
        assert p.alpha == pytest.approx(1 / 0.51)
        assert p.B == pytest.approx(0.51)

    @pytest.mark.parametrize("l3", [-0.6, -0.51])
    def test_periodic_adapted(self, l3):
        res = lorenz_family(LorenzParams(1.0, -2.0, l3), "periodic", 1, math.log(2))
        assert math.log(-1 / l3) < math.log(2)
        assert res.status == "ADAPTED"

    def test_periodic_nonadapted_when_entropy_small(self):
        res = lorenz_family(LorenzParams(1.0, -2.0, -0.6), "periodic", 1, 0.3)
        assert res.status == "NONADAPTED"

    def test_nonperiodic(self):
        res = lorenz_family(LorenzParams(1.0, -2.0, -0.6), "nonperiodic")
        assert res.status == "ALL_MEASURES_ADAPTED"
        assert res.sample_status == "ALL_MEASURES_ADAPTED"

    def test_periodic_sample_coding(self):
        fmap = lorenz_sample_map(LorenzParams(1.0, -2.0, -0.6), True)
        np.testing.assert_array_equal(transition_matrix(fmap), [[1, 1], [1, 0]])
        _, sing = prepare(fmap)
        assert sing.periodic and sing.orbit_class.period == 3
