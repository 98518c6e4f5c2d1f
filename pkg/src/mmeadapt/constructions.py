"""Builders for the example systems, each with its analytic expectations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .branches import (
    Affine,
    Custom,
    DerivativeBlend,
    Glued,
    IterLogPower,
    LogReciprocal,
    PowerOffset,
)
from .errors import BadEigenvalues, BadRho, ExponentTooSmall
from .intervalmap import MarkovIntervalMap

E_E_E = math.exp(-math.exp(math.e))


def make_doubling() -> MarkovIntervalMap:
    return MarkovIntervalMap((0.0, 0.5, 1.0), (Affine(2.0, 0.0), Affine(2.0, -1.0)), name="doubling")


def make_golden_affine() -> MarkovIntervalMap:
    """Affine map coded by the golden-mean shift: [0, .6] onto [0, 1] and
    [.6, 1] reversed onto [0, .6]."""
    return MarkovIntervalMap(
        (0.0, 0.6, 1.0), (Affine(1 / 0.6, 0.0), Affine(-1.5, 1.5)), name="golden_affine"
    )


def _blend_to(x0: float, x1: float, y0: float, d0: float, y1: float) -> DerivativeBlend:
    """Affine-derivative completion from (x0, y0) with slope d0 reaching y1 at x1."""
    d1 = 2.0 * (y1 - y0) / (x1 - x0) - d0
    return DerivativeBlend(x0, x1, d0, d1, y0)


def make_eqnonadapt() -> MarkovIntervalMap:
    """sqrt(x) on [0, 1/16] glued C^1 to a doubling-type left branch."""
    left = Glued((
        (0.0, 1 / 16, PowerOffset(0.0, 1.0, 2.0, 0.0)),
        (1 / 16, 0.5, DerivativeBlend(1 / 16, 0.5, 2.0, 10 / 7, 0.25)),
    ))
    return MarkovIntervalMap((0.0, 0.5, 1.0), (left, Affine(2.0, -1.0)), name="eqnonadapt")


def make_power_map(alpha: float) -> MarkovIntervalMap:
    """Fixed power-law singularity x -> c x^(1/alpha) at 0 on a full 2-shift.

    Uses c = 1 with the first junction 2^-k (k >= 4) that keeps both sides of
    the glue expanding; otherwise scales c so the slope at the junction is 1.5.
    """
    for k in range(4, 21):
        x0 = 2.0**-k
        y0 = x0 ** (1 / alpha)
        d0 = y0 / (alpha * x0)
        blend = _blend_to(x0, 0.5, y0, d0, 1.0)
        if d0 > 1.05 and blend.d1 > 1.05:
            c = 1.0
            break
    else:
        x0, d0 = 1 / 64, 1.5
        y0 = alpha * x0 * d0
        c = y0 / x0 ** (1 / alpha)
        blend = _blend_to(x0, 0.5, y0, d0, 1.0)
    left = Glued(((0.0, x0, PowerOffset(0.0, c, alpha, 0.0)), (x0, 0.5, blend)))
    return MarkovIntervalMap(
        (0.0, 0.5, 1.0), (left, Affine(2.0, -1.0)), name=f"power_alpha_{alpha:g}"
    )


@dataclass(frozen=True)
class EqAdaptSeries:
    rho: float

    def eta(self, m: np.ndarray) -> np.ndarray:
        return 2.0 - 1.0 / np.log((m + 1) * math.log(2.0) + math.log(abs(math.log(self.rho))))

    def terms(self, m_max: int) -> np.ndarray:
        """2^-m eta_m^(m+1) for m = 1..m_max, computed in logs."""
        m = np.arange(1, m_max + 1, dtype=float)
        return np.exp(-m * math.log(2.0) + (m + 1) * np.log(self.eta(m)))

    def partial_sums(self, m_max: int) -> np.ndarray:
        return np.cumsum(self.terms(m_max))


def make_eqadapt(rho: float = 1e-8) -> tuple[MarkovIntervalMap, EqAdaptSeries]:
    """Iterated-log power singularity at 0 whose MME is adapted although
    log(alpha) = h."""
    if not 0 < rho < E_E_E:
        raise BadRho(f"rho must lie in (0, {E_E_E:.4g})")
    core = IterLogPower(rho)
    y0, d0 = core.value(rho), core.deriv(rho)
    left = Glued(((0.0, rho, core), (rho, 0.5, _blend_to(rho, 0.5, y0, d0, 1.0))))
    fmap = MarkovIntervalMap(
        (0.0, 0.5, 1.0), (left, Affine(2.0, -1.0)), name="eqadapt",
        notes=("adaptedness certified by the analytic series; orbit scales underflow",),
    )
    return fmap, EqAdaptSeries(rho)


def make_nonpolynonadapt() -> MarkovIntervalMap:
    return MarkovIntervalMap(
        (0.0, 0.5, 1.0), (Affine(2.0, 0.0), LogReciprocal(0.5, math.log(2.0))),
        name="nonpolynonadapt",
    )


def make_fig_c() -> MarkovIntervalMap:
    """Nonperiodic sqrt-type singularity at 1/2 mapping onto the fixed point 0."""
    right = Glued((
        (0.5, 9 / 16, PowerOffset(0.5, 1.0, 2.0, 0.0)),
        (9 / 16, 1.0, DerivativeBlend(9 / 16, 1.0, 2.0, 10 / 7, 0.25)),
    ))
    return MarkovIntervalMap((0.0, 0.5, 1.0), (Affine(2.0, 0.0), right), name="fig_c")


def make_fig2b() -> MarkovIntervalMap:
    """Period-2 singularity at 0.3: 0.3+ -> 0 -> 0.3+."""
    p = 0.3
    x0 = float(Fraction(3, 10) + Fraction(1, 25))
    right = Glued((
        (p, x0, PowerOffset(p, 0.5, 2.0, 0.0)),
        (x0, 1.0, _blend_to(x0, 1.0, 0.1, 1.25, 1.0)),
    ))
    return MarkovIntervalMap((0.0, p, 1.0), (Affine(7 / 3, p), right), name="fig2b")


def make_fig1_counterexample(holder: bool = True) -> MarkovIntervalMap:
    """Fixed coordinate 1/2 whose right side is flipped onto the left side by a
    decreasing singular branch, so 1/2+ is not periodic."""
    if holder:
        sing = PowerOffset(0.5, -0.5 / math.sqrt(0.1), 2.0, 0.5)
    else:
        k = 0.5 * math.log(10.0)
        sing = Custom(
            lambda x: 0.5 + k / math.log(x - 0.5) if x > 0.5 else 0.5,
            lambda x: -k / ((x - 0.5) * math.log(x - 0.5) ** 2) if x > 0.5 else -math.inf,
            label="log-flip",
        )
    return MarkovIntervalMap(
        (0.0, 0.25, 0.5, 0.6, 1.0),
        (Affine(-4.0, 1.0), Affine(2.0, -0.5), sing, Affine(2.5, -1.5)),
        name="fig1" if holder else "fig1_nonholder",
    )


# countable-state example ------------------------------------------------------


@dataclass(frozen=True)
class NonsingMeasure:
    exponent: float
    weights: np.ndarray  # p_1..p_N
    normalizer: float
    tails: np.ndarray  # mass of [0^n 1] for n = 0..N-1, i.e. sum_{i>n} p_i
    return_time_mean: float
    entropy: float

    def cylinder_0n1(self, n: int) -> float:
        return float(self.tails[n])

    def witness_sum(self, N: int) -> float:
        n = np.arange(1, N + 1)
        return float(n @ self.tails[1:N + 1])

    def witness_lower_bound(self, N: int) -> float:
        n = np.arange(1, N + 1, dtype=float)
        return float(self.normalizer / 2 * np.sum(n / (n + 1) ** 2))


def _zeta_tail(s: float, N: int) -> float:
    """sum_{i > N} i^-s by Euler-Maclaurin (error O(N^{-s-3}))."""
    return N ** (1 - s) / (s - 1) - 0.5 * N**-s + s * N ** (-s - 1) / 12


def nonsing_measure(s: float = 3.0, n_tail: int = 10**6) -> NonsingMeasure:
    """Invariant measure for the doubling map built from the Bernoulli weights
    p_n = c n^-s on return times to [1].

    Cylinder masses [0^n 1] are those of the unnormalized tower measure (the
    tower has total mass equal to the mean return time)."""
    if not s > 2:
        raise ExponentTooSmall("need s > 2 for a finite mean return time")
    n = np.arange(1, n_tail + 1, dtype=float)
    raw = n**-s
    tail_mass = _zeta_tail(s, n_tail)
    c = 1.0 / (raw.sum() + tail_mass)
    p = c * raw
    # tails[n] = sum_{i > n} p_i, accumulated from the far end for accuracy
    rev = np.cumsum(p[::-1])[::-1]
    tails = np.concatenate((rev + c * tail_mass, [c * tail_mass]))
    mean = float(n @ p + c * _zeta_tail(s - 1, n_tail))
    ent = float(-(p @ np.log(p)))
    # entropy tail: sum_{i>N} c i^-s (s log i - log c), bounded by the integral
    ent += float(c * (s * math.log(n_tail) - math.log(c)) * tail_mass + c * s * tail_mass / (s - 1))
    return NonsingMeasure(s, p, c, tails, mean, ent / mean)


# geometric Lorenz family -----------------------------------------------------


@dataclass(frozen=True)
class LorenzParams:
    lambda1: float
    lambda2: float
    lambda3: float

    def __post_init__(self):
        l1, l2, l3 = self.lambda1, self.lambda2, self.lambda3
        if not (0 < l1 / 2 <= -l3 < l1 < -l2):
            raise BadEigenvalues(
                f"need 0 < l1/2 <= -l3 < l1 < -l2, got ({l1}, {l2}, {l3})"
            )

    @property
    def B(self) -> float:
        return -self.lambda3 / self.lambda1

    @property
    def alpha(self) -> float:
        return -self.lambda1 / self.lambda3


@dataclass(frozen=True)
class LorenzResult:
    params: LorenzParams
    scenario: str
    status: str
    threshold: float | None
    sample: MarkovIntervalMap | None
    sample_status: str | None = None
    sample_rule: str | None = None


LORENZ_MARGIN = 1e-6


def lorenz_sample_map(params: LorenzParams, periodic: bool) -> MarkovIntervalMap | None:
    """Illustrative Markov map with the Lorenz derivative law |f'| = C x^(B-1).

    periodic: golden-mean coding, critical orbit 0 -> 1 -> b -> 0 (period 3).
    otherwise: full 2-shift, 0 -> 1 with 1 fixed.
    """
    a = params.alpha
    if periodic:
        b = 0.5 * (0.5 + 1.0 / a)
        if not (b > 0.5 and a * b < 1):
            return None
        second = Affine(b / (1 - b), -b * b / (1 - b))
    else:
        b = 0.9 / a
        second = Affine(1 / (1 - b), -b / (1 - b))
    first = PowerOffset(0.0, -(b ** (-1 / a)), a, 1.0)
    return MarkovIntervalMap((0.0, b, 1.0), (first, second), name="lorenz_sample")


def lorenz_family(params: LorenzParams, scenario: str, period: int = 1,
                  entropy: float | None = None) -> LorenzResult:
    from .adaptedness import classify_mme

    if scenario == "periodic":
        if entropy is None:
            raise ValueError("periodic scenario needs the component entropy")
        thr = period * entropy
        la = math.log(params.alpha)
        if la < thr - LORENZ_MARGIN:
            status = "ADAPTED"
        elif la > thr + LORENZ_MARGIN:
            status = "NONADAPTED"
        else:
            status = "INDETERMINATE"
        sample = lorenz_sample_map(params, True)
    elif scenario == "nonperiodic":
        status, thr = "ALL_MEASURES_ADAPTED", None
        sample = lorenz_sample_map(params, False)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    res = LorenzResult(params, scenario, status, thr, sample)
    if sample is not None:
        v = classify_mme(sample, with_series=False)
        res = LorenzResult(params, scenario, status, thr, sample, v.status, v.rule)
    return res


GALLERY = {
    "eqnonadapt": make_eqnonadapt,
    "eqadapt": lambda: make_eqadapt()[0],
    "nonpolynonadapt": make_nonpolynonadapt,
    "fig_c": make_fig_c,
    "fig1": make_fig1_counterexample,
    "fig2b": make_fig2b,
    "doubling": make_doubling,
    "golden": make_golden_affine,
    "power_1.2": lambda: make_power_map(1.2),
}
