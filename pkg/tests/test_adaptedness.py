import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmeadapt.adaptedness import (
    beta_interval,
    classify_mme,
    dk_shadowing_check,
    integral_bounds,
    ledrappier_dimension,
    LyapunovBracket,
    lyapunov_mme,
    period_reduce,
    threshold,
)
from mmeadapt.constructions import (
    make_doubling,
    make_eqadapt,
    make_eqnonadapt,
    make_fig1_counterexample,
    make_fig2b,
    make_fig_c,
    make_golden_affine,
    make_nonpolynonadapt,
    make_power_map,
)
from mmeadapt.errors import HypothesesNotMet, NoSingularity, NotPeriodic, ZeroEntropy
from mmeadapt.intervalmap import prepare

LOG2 = math.log(2)
STATUS_ORDER = {"ADAPTED": 0, "INDETERMINATE": 1, "NONADAPTED": 2}


class TestBeta:
    def test_closed_forms(self):
        assert beta_interval(make_eqnonadapt()).lower == 0.5
        b = beta_interval(make_nonpolynonadapt())
        assert (b.lower, b.upper) == (1.0, 1.0)
        assert beta_interval(make_eqadapt()[0]).upper == 0.5

    def test_sampled_power_law(self):
        b = beta_interval(make_eqnonadapt(), sampled=True)
        assert 0.48 <= b.lower <= b.upper <= 0.52

    def test_raw_ratio_biased_for_power_law(self):
        # L(p + 10^-k) = 1/2 - log 2 / (k log 10) for f = sqrt(x)
        b = beta_interval(make_eqnonadapt(), sampled=True)
        for k, raw, _ in b.samples:
            assert raw == pytest.approx(0.5 - LOG2 / (k * math.log(10)), abs=1e-12)

    def test_log_reciprocal_slope_increases(self):
        slopes = [s for _, _, s in beta_interval(make_nonpolynonadapt(), sampled=True).samples]
        assert all(a < b < 1 for a, b in zip(slopes, slopes[1:]))

    def test_no_singularity(self):
        with pytest.raises(NoSingularity):
            beta_interval(make_doubling())

    def test_threshold(self):
        assert threshold(0.5, 1) == pytest.approx(LOG2)
        assert threshold(0.5, 2) == pytest.approx(LOG2 / 2)
        assert threshold(1.0, 1) == math.inf


class TestClassifier:
    def test_eqnonadapt_power_law_rule(self):
        v = classify_mme(make_eqnonadapt())
        assert (v.status, v.rule) == ("NONADAPTED", "vi")

    def test_power_12_adapted(self):
        v = classify_mme(make_power_map(1.2))
        assert (v.status, v.rule) == ("ADAPTED", "iv")

    def test_nonpoly_indeterminate_with_series(self):
        v = classify_mme(make_nonpolynonadapt(), depth=60)
        assert (v.status, v.rule) == ("INDETERMINATE", "ii")
        assert v.series.verdict == "diverges"

    def test_holder_nonperiodic(self):
        for fmap in (make_fig_c(), make_fig1_counterexample()):
            assert classify_mme(fmap).status == "ALL_MEASURES_ADAPTED"

    def test_eqadapt_band(self):
        v = classify_mme(make_eqadapt()[0], depth=40)
        assert (v.status, v.rule) == ("INDETERMINATE", "vii")
        assert v.band == pytest.approx((LOG2, LOG2))

    def test_fig2b_adapted(self):
        v = classify_mme(make_fig2b())
        assert v.status == "ADAPTED" and v.period == 2

    def test_monotone_in_alpha(self):
        # larger alpha means a stronger singularity at fixed entropy
        alphas = np.linspace(1.05, 4.0, 25)
        ranks = [STATUS_ORDER[classify_mme(make_power_map(a), with_series=False).status] for a in alphas]
        assert ranks == sorted(ranks)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(1.05, 4.0))
    def test_series_agrees_with_classifier(self, alpha):
        fmap = make_power_map(alpha)
        v = classify_mme(fmap, with_series=False)
        rep = integral_bounds(fmap, depth=120)
        if abs(alpha - 2) < 0.15:
            # terms scale like (alpha / 2)^k: too slow to decide at this depth
            assert rep.verdict != {"ADAPTED": "diverges", "NONADAPTED": "converges"}[v.status]
        elif v.status == "ADAPTED":
            assert rep.verdict == "converges"
        else:
            assert v.status == "NONADAPTED" and rep.verdict == "diverges"


class TestSeries:
    def test_nonpoly_exact(self):
        rep = integral_bounds(make_nonpolynonadapt(), depth=150)
        n = rep.depth
        np.testing.assert_allclose(rep.lower_partials, n * LOG2 / 4, atol=1e-9)
        np.testing.assert_allclose(rep.upper_partials, n * LOG2 / 2, atol=1e-9)

    def test_partials_ordered(self):
        rep = integral_bounds(make_fig2b(), depth=80)
        assert np.all(rep.lower_terms <= rep.upper_terms)
        assert np.all(np.diff(rep.lower_partials) >= 0)

    def test_eqnonadapt_linear_growth(self):
        rep = integral_bounds(make_eqnonadapt(), depth=200)
        assert rep.verdict == "diverges"
        ks = rep.depth
        a = np.polyfit(ks[49:125], rep.lower_partials[49:125], 1)[0]
        b = np.polyfit(ks[125:], rep.lower_partials[125:], 1)[0]
        assert a > 0 and abs(a - b) <= 0.05 * a

    def test_power_ratio(self):
        rep = integral_bounds(make_power_map(1.2), depth=200)
        assert rep.verdict == "converges"
        # terms scale like (alpha / 2)^k
        assert rep.ratio == pytest.approx(0.6, abs=1e-6)
        assert rep.value >= rep.upper_partials[-1]

    def test_csv(self):
        text = integral_bounds(make_nonpolynonadapt(), depth=3).to_csv().splitlines()
        assert text[0] == "n,lower_term,upper_term,lower_partial,upper_partial"
        assert len(text) == 4
        assert float(text[1].split(",")[1]) == pytest.approx(LOG2 / 4, rel=1e-15)


class TestReduction:
    def test_fig2b(self):
        red = period_reduce(make_fig2b())
        assert red.period == 2
        assert all(red.facts.values())
        assert math.exp(red.entropy) == pytest.approx(math.exp(2 * red.base_entropy), rel=1e-9)

    def test_classification_invariant(self):
        fmap = make_fig2b()
        red = period_reduce(fmap)
        assert classify_mme(red.g, sing=red.singularity).status == classify_mme(fmap).status

    def test_strength_invariant(self):
        red = period_reduce(make_fig2b())
        assert beta_interval(red.g, red.singularity).lower == pytest.approx(0.5)

    def test_requires_periodic(self):
        with pytest.raises(NotPeriodic):
            period_reduce(make_fig_c())

    def test_fixed_point_is_translation(self):
        fmap = make_eqnonadapt()
        red = period_reduce(fmap)
        for x in (0.01, 0.2, 0.7):
            assert red.g(x) == pytest.approx(fmap(x), abs=1e-12)


class TestShadowing:
    def test_fig_c(self):
        rep = dk_shadowing_check(make_fig_c(), k_max=20, samples=10)
        assert rep.all_passed and len(rep.passed) == 20

    def test_fig1(self):
        assert dk_shadowing_check(make_fig1_counterexample(), k_max=10).all_passed

    def test_rejects_periodic(self):
        with pytest.raises(HypothesesNotMet):
            dk_shadowing_check(make_eqnonadapt())

    def test_rejects_non_holder(self):
        with pytest.raises(HypothesesNotMet):
            dk_shadowing_check(make_nonpolynonadapt())


class TestLyapunov:
    def test_doubling(self):
        lb = lyapunov_mme(make_doubling(), depth=4)
        assert lb.lower == pytest.approx(LOG2) and lb.upper == pytest.approx(LOG2)

    def test_golden_affine(self):
        # oracle: mu(I_0) log(1/0.6) + mu(I_1) log 1.5 with Parry weights (phi^2, 1)/(phi^2 + 1)
        phi2 = ((1 + math.sqrt(5)) / 2) ** 2
        exact = (phi2 * math.log(1 / 0.6) + math.log(1.5)) / (phi2 + 1)
        lb = lyapunov_mme(make_golden_affine(), depth=4)
        assert lb.lower == pytest.approx(exact, abs=1e-12) and lb.upper == pytest.approx(exact, abs=1e-12)

    def test_nonadapted_diverges(self):
        lb = lyapunov_mme(make_eqnonadapt(), depth=5, series_depth=100)
        assert lb.lower == math.inf and lb.upper == math.inf
        d = ledrappier_dimension(LOG2, lb)
        assert (d.lower, d.upper) == (0.0, 0.0)

    def test_bracket_shrinks(self):
        fmap = make_power_map(1.2)
        coarse = lyapunov_mme(fmap, depth=4, series_depth=80)
        fine = lyapunov_mme(fmap, depth=8, series_depth=80)
        assert coarse.lower <= fine.lower + 1e-12 and fine.upper <= coarse.upper + 1e-12
        assert 0 < fine.lower <= fine.upper < math.inf

    def test_dimension(self):
        d = ledrappier_dimension(LOG2, LyapunovBracket(LOG2, LOG2, 1))
        assert (d.lower, d.upper) == (pytest.approx(1.0), pytest.approx(1.0))
        with pytest.raises(ZeroEntropy):
            ledrappier_dimension(0.0, LyapunovBracket(1.0, 1.0, 1))


def test_prepare_idempotent():
    fmap, sing = prepare(make_fig_c())
    again, sing2 = prepare(fmap)
    assert sing2.p == sing.p
