"""Singularity strength, period reduction, the MME classifier and two-sided
series bounds on the adaptedness integral.

All cylinder arithmetic near the singular point runs in log-distance
coordinates (see :mod:`mmeadapt.branches`); the cylinder masses are the exact
Parry masses of the transitive component containing the singularity.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import sft
from .branches import Composed, Glued, PowerOffset
from .errors import HypothesesNotMet, NoComponent, NoSingularity, NotPeriodic, ZeroEntropy
from .intervalmap import (
    Component,
    MarkovIntervalMap,
    SingularityInfo,
    cylinder_bracket,
    detect_singularities,
    logdist_bracket,
    prepare,
    singular_code,
    transition_matrix,
    transitive_component,
    validate,
)

LN10 = math.log(10.0)
THRESHOLD_MARGIN = 1e-6
EQUALITY_TOL = 1e-12
DEFAULT_DEPTH = 200
MACHINE_EPS = np.finfo(float).eps


def default_depth() -> int:
    return int(os.environ.get("MIL_DEPTH", DEFAULT_DEPTH))


def _require_singularity(fmap: MarkovIntervalMap, sing: SingularityInfo | None):
    if sing is not None:
        return fmap, sing
    fmap, sing = prepare(fmap)
    if sing is None:
        raise NoSingularity(f"{fmap.name or 'map'} has no singularity")
    return fmap, sing


# singularity strength ----------------------------------------------------------


@dataclass(frozen=True)
class BetaInterval:
    lower: float
    upper: float
    source: str  # "closed_form" or "sampled"
    # (k, raw L at p + 10^-k, local log-log slope between 10^-(k-1) and 10^-k)
    samples: tuple[tuple[int, float, float], ...] = ()

    @property
    def spread(self) -> float:
        return self.upper - self.lower


def sample_strength(fmap: MarkovIntervalMap, sing: SingularityInfo,
                    ks=range(4, 13)) -> tuple[tuple[int, float, float], ...]:
    """L(x) = log|f'(x)| / -log(x - p) at x = p + 10^-k, with the slope of
    log|f'| against -log(x - p) between consecutive grid points.

    The slope removes the O(1/log) bias of the raw ratio for power laws.
    """
    i = sing.branch_index
    br = fmap.branches[i]
    lo, hi = fmap.interval(i)
    ks = list(ks)
    logd = {k: br.log_deriv_logdist(k * LN10, sing.p, lo, hi) for k in [ks[0] - 1] + ks}
    return tuple(
        (k, logd[k] / (k * LN10), (logd[k] - logd[k - 1]) / LN10) for k in ks
    )


def beta_interval(fmap: MarkovIntervalMap, sing: SingularityInfo | None = None,
                  sampled: bool = False, tail=range(8, 13)) -> BetaInterval:
    fmap, sing = _require_singularity(fmap, sing)
    closed = fmap.branches[sing.branch_index].closed_beta()
    samples = sample_strength(fmap, sing)
    if closed is not None and not sampled:
        return BetaInterval(closed, closed, "closed_form", samples)
    slopes = [s for k, _, s in samples if k in tail]
    lower = min(max(min(slopes), 0.0), 1.0)
    upper = max(max(slopes), lower)
    return BetaInterval(lower, upper, "sampled", samples)


def threshold(beta: float, n: int) -> float:
    """-(1/n) log(1 - beta); +inf at beta >= 1."""
    return math.inf if beta >= 1.0 else -math.log1p(-beta) / n


# series bounds -------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesBoundReport:
    depth: np.ndarray
    lower_terms: np.ndarray
    upper_terms: np.ndarray
    lower_partials: np.ndarray
    upper_partials: np.ndarray
    verdict: str  # "converges", "diverges", "inconclusive"
    value: float | None = None  # bound on the integral when converging
    tail_bound: float | None = None
    ratio: float | None = None
    slope: float | None = None

    def describe(self) -> str:
        if self.verdict == "converges":
            return f"ConvergesWithBound({self.value:.6g})"
        if self.verdict == "diverges":
            return f"DivergesWithRate({self.slope:.6g})"
        return f"Inconclusive({int(self.depth[-1])})"

    def to_csv(self) -> str:
        lines = ["n,lower_term,upper_term,lower_partial,upper_partial"]
        for row in zip(self.depth, self.lower_terms, self.upper_terms,
                       self.lower_partials, self.upper_partials):
            n, rest = int(row[0]), row[1:]
            lines.append(f"{n}," + ",".join(f"{v:.17g}" for v in rest))
        return "\n".join(lines) + "\n"


def _component(fmap: MarkovIntervalMap, sing: SingularityInfo) -> Component:
    return transitive_component(fmap, sing.branch_index)


def singular_family(fmap, sing, comp, k: int):
    """Cylinders [c_0 .. c_{k-1} j] leaving the singular itinerary c after k
    symbols: yields (word, mass, t_near, t_far)."""
    A = comp.full_matrix
    code = singular_code(fmap, sing, k + 1)
    prefix = code[:k]
    for j in np.nonzero(A[prefix[-1]])[0]:
        j = int(j)
        if j == code[k]:
            continue
        word = prefix + (j,)
        mass = comp.mass(word)
        if mass == 0.0:
            continue
        t_near, t_far = logdist_bracket(fmap, sing, word)
        yield word, mass, t_near, t_far


def _tail_ratio(terms: np.ndarray, block: int = 1) -> tuple[float, float] | None:
    """Geometric decay of block sums over the last quarter: (ratio, last block)."""
    nb = len(terms) // block
    sums = terms[len(terms) - nb * block:].reshape(nb, block).sum(axis=1)
    q = max(nb // 4, 2)
    last = sums[-q:]
    if np.any(last <= 0) or not np.all(np.isfinite(last)):
        return None
    r = float(np.max(last[1:] / last[:-1]))
    return (r, float(last[-1])) if r < 1.0 else None


def _diverges(terms: np.ndarray, block: int = 1) -> bool:
    nb = len(terms) // block
    sums = terms[len(terms) - nb * block:].reshape(nb, block).sum(axis=1)
    last = sums[-max(nb // 4, 2):]
    # terms that stop decaying: constant or growing over the last quarter
    return bool(np.min(last) >= max(10 * MACHINE_EPS, 0.5 * last[0]))


def integral_bounds(fmap: MarkovIntervalMap, sing: SingularityInfo | None = None,
                    depth: int | None = None) -> SeriesBoundReport:
    """Two-sided bounds on the integral of b(x) = |log(x - p)| over the
    singular subinterval, one term per exit depth."""
    fmap, sing = _require_singularity(fmap, sing)
    depth = depth or default_depth()
    comp = _component(fmap, sing)
    lows, ups = np.zeros(depth), np.zeros(depth)
    for k in range(1, depth + 1):
        for _, mass, t_near, t_far in singular_family(fmap, sing, comp, k):
            lows[k - 1] += max(t_far, 0.0) * mass
            ups[k - 1] += max(t_near, 0.0) * mass
    lp, up = np.cumsum(lows), np.cumsum(ups)
    ks = np.arange(1, depth + 1)
    block = sing.orbit_class.period
    decay = _tail_ratio(ups, block)
    q = max(depth // 4, 2)
    slope = float(np.polyfit(ks[-q:], lp[-q:], 1)[0])
    if decay is not None:
        r, last = decay
        tail = last * r / (1 - r)
        return SeriesBoundReport(ks, lows, ups, lp, up, "converges", float(up[-1] + tail),
                                 tail, r, slope)
    if _diverges(lows, block):
        return SeriesBoundReport(ks, lows, ups, lp, up, "diverges", None, None, None, slope)
    return SeriesBoundReport(ks, lows, ups, lp, up, "inconclusive", None, None, None, slope)


# period reduction ----------------------------------------------------------------


@dataclass(frozen=True)
class ReducedSystem:
    g: MarkovIntervalMap
    period: int
    shift: float
    entropy: float
    base_entropy: float
    singularity: SingularityInfo
    facts: dict = field(default_factory=dict)


def _snap(x: float, grid) -> float:
    k = int(np.argmin([abs(x - q) for q in grid]))
    return grid[k] if abs(x - grid[k]) <= 1e-12 else x


def iterate_map(fmap: MarkovIntervalMap, n: int) -> list[tuple[tuple[float, float], tuple]]:
    """Subintervals of f^n with their composition steps."""
    A = transition_matrix(fmap)
    pieces = []
    for w in sft.admissible_words(A, n):
        steps = []
        for i in range(n):
            l, r = cylinder_bracket(fmap, w[i:])
            l, r = _snap(l, fmap.partition), _snap(r, fmap.partition)
            steps.append((l, r, fmap.branches[w[i]]))
        if steps[0][1] > steps[0][0]:
            pieces.append(((steps[0][0], steps[0][1]), tuple(steps)))
    pieces.sort(key=lambda pc: pc[0][0])
    return pieces


def period_reduce(fmap: MarkovIntervalMap, sing: SingularityInfo | None = None) -> ReducedSystem:
    """g(x) = f^n(x + p) - p on [a - p, b - p] for a period-n singularity."""
    fmap, sing = _require_singularity(fmap, sing)
    if not sing.periodic:
        raise NotPeriodic(f"singularity orbit is {sing.orbit_class}")
    n, p = sing.orbit_class.period, sing.p
    pieces = iterate_map(fmap, n)
    part = [pieces[0][0][0] - p] + [pc[0][1] - p for pc in pieces]
    for k, pc in enumerate(pieces[1:], start=1):
        part[k] = pc[0][0] - p
    if 0.0 not in part:
        part[int(np.argmin(np.abs(np.array(part))))] = 0.0
    branches = tuple(Composed(steps, p) for _, steps in pieces)
    g = MarkovIntervalMap(tuple(part), branches, eps_markov=fmap.eps_markov,
                          eps_grid=fmap.eps_grid, name=f"{fmap.name}^({n}) reduced")
    rep = validate(g)
    k0 = part.index(0.0)
    comp_g = transitive_component(g, k0)
    h = _component(fmap, sing).entropy
    facts = {
        "A_fixed": abs(g.branches[k0].value(0.0)) <= 1e-12,
        "B_expanding": rep.lambda_exp > 1,
        "E_partition": True,
        "G_entropy": math.isclose(comp_g.measure.perron.eigenvalue, math.exp(n * h), rel_tol=1e-9),
    }
    at_zero = [s for s in detect_singularities(g) if s.p == 0.0 and s.location.side >= 0]
    if len(at_zero) != 1:
        raise NoSingularity("reduced map lost its singularity at 0")
    return ReducedSystem(g, n, p, comp_g.entropy, h, at_zero[0], facts)


# classification ------------------------------------------------------------------

RULES = {
    "i": "nonperiodic Hölder singularity, every invariant measure adapted",
    "ii": "nonperiodic singularity without Hölder control",
    "iii": "lower strength equals 1",
    "iv": "h > -(1/n) log(1 - upper strength)",
    "v": "h < -(1/n) log(1 - lower strength)",
    "vi": "h = log α, exact power law",
    "vii": "h inside the indeterminate band",
}


@dataclass(frozen=True)
class AdaptednessVerdict:
    status: str  # ADAPTED, NONADAPTED, INDETERMINATE, ALL_MEASURES_ADAPTED
    rule: str
    entropy: float
    period: int | None
    beta: BetaInterval | None
    band: tuple[float, float] | None = None
    series: SeriesBoundReport | None = None
    note: str = ""

    @property
    def rule_text(self) -> str:
        return RULES[self.rule]

    def line(self) -> str:
        return f"{self.status} (rule {self.rule}: {self.rule_text})"


def _exact_power_fixed(fmap, sing) -> PowerOffset | None:
    br = fmap.branches[sing.branch_index]
    if isinstance(br, Glued):
        br = br.pieces[0][2]
    if isinstance(br, PowerOffset) and br.p == sing.p and br.q == sing.p and br.c > 0:
        return br
    return None


def classify_mme(fmap: MarkovIntervalMap, depth: int | None = None,
                 with_series: bool = True, sing: SingularityInfo | None = None) -> AdaptednessVerdict:
    """Decide whether the measure of maximal entropy on the component of the
    singular subinterval integrates |log(x - p)|.  Pass `sing` to pick one
    singularity of a map that has several."""
    fmap, sing = _require_singularity(fmap, sing)
    comp = _component(fmap, sing)
    h = comp.entropy

    def series():
        return integral_bounds(fmap, sing, depth) if with_series else None

    if not sing.periodic:
        if sing.holder is not None:
            return AdaptednessVerdict("ALL_MEASURES_ADAPTED", "i", h, None, None)
        return AdaptednessVerdict("INDETERMINATE", "ii", h, None, None, series=series())
    n = sing.orbit_class.period
    beta = beta_interval(fmap, sing)
    lo_thr, up_thr = threshold(beta.lower, n), threshold(beta.upper, n)
    if beta.lower >= 1.0 - EQUALITY_TOL:
        return AdaptednessVerdict("NONADAPTED", "iii", h, n, beta)
    if beta.upper < 1.0 and h > up_thr + THRESHOLD_MARGIN:
        return AdaptednessVerdict("ADAPTED", "iv", h, n, beta)
    if h < lo_thr - THRESHOLD_MARGIN:
        return AdaptednessVerdict("NONADAPTED", "v", h, n, beta)
    pw = _exact_power_fixed(fmap, sing)
    if n == 1 and pw is not None and abs(h - math.log(pw.alpha)) <= EQUALITY_TOL:
        return AdaptednessVerdict("NONADAPTED", "vi", h, n, beta)
    return AdaptednessVerdict("INDETERMINATE", "vii", h, n, beta, (lo_thr, up_thr), series())


# shadowing check for nonperiodic Hölder singularities -----------------------------


@dataclass(frozen=True)
class ShadowingReport:
    passed: dict  # k -> bool
    delta: float
    holder_constant: float
    lipschitz: float
    alpha: float

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def _lipschitz_away(fmap: MarkovIntervalMap, p: float, delta: float) -> float:
    best = 0.0
    for i, br in enumerate(fmap.branches):
        lo, hi = fmap.interval(i)
        if lo == p:
            lo = p + delta
        xs = np.linspace(lo, hi, 1001)
        best = max(best, max(abs(br.deriv(x)) for x in xs))
    return best


def dk_shadowing_check(fmap: MarkovIntervalMap, k_max: int = 20,
                       samples: int = 10) -> ShadowingReport:
    """Orbits started in the k-th exponential shell around p stay out of
    [p, p + delta] for k steps."""
    fmap, sing = _require_singularity(fmap, None)
    if sing.periodic or sing.holder is None:
        raise HypothesesNotMet("needs a nonperiodic singularity with Hölder control")
    p = sing.p
    i = sing.branch_index
    br, (lo, hi) = fmap.branches[i], fmap.interval(i)
    ell = min(b - a for a, b in zip(fmap.partition, fmap.partition[1:]))
    delta = ell / 2
    alpha = 1.0 / sing.holder.exponent
    fp = br.value(p)
    sampled = max(abs(br.value(x) - fp) / (x - p) ** (1 / alpha)
                  for x in np.linspace(p, p + delta, 401)[1:])
    c_h = max(1.0, sing.holder.constant, sampled)
    c_l = 1.01 * _lipschitz_away(fmap, p, delta)
    t0 = -alpha * math.log(delta / c_h)
    passed = {}
    for k in range(1, k_max + 1):
        ts = np.linspace(t0 + alpha * (k - 1) * math.log(c_l), t0 + alpha * k * math.log(c_l), samples)
        ok = True
        for t in ts:
            y = br.value_logdist(float(t), p, lo, hi)
            for step in range(1, k + 1):
                if p <= y <= p + delta:
                    ok = False
                    break
                if step < k:
                    j = fmap.locate(y)
                    if j is None:
                        j = min(int(np.searchsorted(fmap.partition, y, side="right")) - 1,
                                fmap.size - 1)
                    y = fmap.branches[j].value(y)
            if not ok:
                break
        passed[k] = ok
    return ShadowingReport(passed, delta, c_h, c_l, alpha)


# Lyapunov exponent and dimension -------------------------------------------------


@dataclass(frozen=True)
class LyapunovBracket:
    lower: float
    upper: float
    depth: int


def _log_deriv_range(br, l: float, r: float, lo: float, hi: float) -> tuple[float, float]:
    pts = [l, r] + [j for j in br.junctions() if l < j < r]
    vals = [math.log(abs(br.deriv(x))) for x in pts]
    return min(vals), max(vals)


def lyapunov_mme(fmap: MarkovIntervalMap, depth: int = 8,
                 series_depth: int | None = None) -> LyapunovBracket:
    """Bracket for the integral of log|f'| against the MME of the component."""
    fmap, sing = prepare(fmap)
    series_depth = series_depth or default_depth()
    if sing is None:
        A = transition_matrix(fmap)
        if not sft.is_irreducible(A):
            raise NoComponent("map without singularity must be transitive")
        comp = transitive_component(fmap, 0)
    else:
        comp = _component(fmap, sing)
    code = singular_code(fmap, sing, depth) if sing else None
    lower = upper = 0.0
    for loc in sft.admissible_words(comp.matrix, depth):
        w = tuple(comp.symbols[s] for s in loc)
        mass = sft.cylinder_mass(comp.measure, loc)
        s0 = w[0]
        br, (lo, hi) = fmap.branches[s0], fmap.interval(s0)
        if sing is not None and w == code:
            continue
        if sing is not None and s0 == sing.branch_index:
            t_near, t_far = logdist_bracket(fmap, sing, w)
            a = br.log_deriv_logdist(t_far, sing.p, lo, hi)
            b = br.log_deriv_logdist(t_near, sing.p, lo, hi)
            lo_v, hi_v = min(a, b), max(a, b)
        else:
            l, r = cylinder_bracket(fmap, w)
            lo_v, hi_v = _log_deriv_range(br, l, r, lo, hi)
        lower += mass * lo_v
        upper += mass * hi_v
    if sing is None:
        return LyapunovBracket(lower, upper, depth)
    br, (lo, hi) = fmap.branches[sing.branch_index], fmap.interval(sing.branch_index)
    lows, ups = [], []
    for k in range(depth, depth + series_depth):
        lk = uk = 0.0
        for _, mass, t_near, t_far in singular_family(fmap, sing, comp, k):
            a = br.log_deriv_logdist(t_far, sing.p, lo, hi)
            b = br.log_deriv_logdist(t_near, sing.p, lo, hi)
            lk += mass * min(a, b)
            uk += mass * max(a, b)
        lows.append(lk)
        ups.append(uk)
    lows_a, ups_a = np.array(lows), np.array(ups)
    decay = _tail_ratio(ups_a, sing.orbit_class.period)
    if decay is None:
        upper_total = math.inf
    else:
        r, last = decay
        upper_total = upper + ups_a.sum() + last * r / (1 - r)
    lower_total = math.inf if _diverges(lows_a, sing.orbit_class.period) else lower + lows_a.sum()
    return LyapunovBracket(lower_total, upper_total, depth)


@dataclass(frozen=True)
class DimensionBracket:
    lower: float
    upper: float


def ledrappier_dimension(h: float, lyap: LyapunovBracket) -> DimensionBracket:
    """dim = h / Lyapunov exponent, as an interval."""
    if not h > 0:
        raise ZeroEntropy("dimension formula needs positive entropy")
    lo = 0.0 if math.isinf(lyap.upper) else h / lyap.upper
    hi = 0.0 if math.isinf(lyap.lower) else h / lyap.lower
    return DimensionBracket(lo, hi)
