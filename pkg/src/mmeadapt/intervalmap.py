"""Piecewise expanding Markov interval maps, their signed (one-sided) dynamics
and the symbolic coding of the transitive component carrying a singularity."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import sft
from .branches import Branch, Reflected
from .errors import (
    BracketTouchesSingularity,
    EmptyComponent,
    Inadmissible,
    MultipleSingularities,
    NotExpanding,
    NotMarkov,
    NotMonotone,
    OrbitHitsBoundary,
    UntrackedPoint,
)

EPS_MARKOV = 1e-9
EPS_GRID = 1e-12
GRID_POINTS = 1000

MINUS, NONE, PLUS = -1, 0, 1


@dataclass(frozen=True)
class MarkovIntervalMap:
    partition: tuple[float, ...]
    branches: tuple[Branch, ...]
    # one-sided value chosen at each partition point; never used by the
    # measure computations, which see only branch limits
    endpoint_values: tuple[float, ...] | None = None
    eps_markov: float = EPS_MARKOV
    eps_grid: float = EPS_GRID
    name: str = ""
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "partition", tuple(float(x) for x in self.partition))
        object.__setattr__(self, "branches", tuple(self.branches))
        if len(self.branches) != len(self.partition) - 1:
            raise ValueError("need exactly one branch per subinterval")
        if any(b <= a for a, b in zip(self.partition, self.partition[1:])):
            raise ValueError("partition points must be strictly increasing")

    @property
    def domain(self) -> tuple[float, float]:
        return self.partition[0], self.partition[-1]

    @property
    def size(self) -> int:
        return len(self.branches)

    def interval(self, i: int) -> tuple[float, float]:
        return self.partition[i], self.partition[i + 1]

    def branch_limit(self, i: int, end: str) -> float:
        lo, hi = self.interval(i)
        return self.branches[i].value(lo if end == "lo" else hi)

    def orientation(self, i: int) -> int:
        return self.branches[i].orientation(*self.interval(i))

    def locate(self, x: float) -> int | None:
        """Index of the subinterval whose interior holds x, None on the grid."""
        a, b = self.domain
        if not a <= x <= b:
            raise ValueError(f"{x} outside the domain")
        for i in range(self.size):
            lo, hi = self.interval(i)
            if lo + self.eps_grid < x < hi - self.eps_grid:
                return i
        return None

    def snap(self, x: float) -> float:
        k = int(np.argmin([abs(x - q) for q in self.partition]))
        return self.partition[k] if abs(x - self.partition[k]) <= self.eps_markov else x

    def __call__(self, x: float) -> float:
        i = self.locate(x)
        if i is None:
            raise OrbitHitsBoundary(0)
        return self.branches[i].value(x)


@dataclass(frozen=True)
class ValidationReport:
    lambda_exp: float
    images: tuple[tuple[int, int], ...]
    markov_mismatch: float

    @property
    def ok(self) -> bool:
        return True


def _grid(lo: float, hi: float, n: int = GRID_POINTS) -> np.ndarray:
    return lo + (hi - lo) * (np.arange(n) + 0.5) / n


def validate(fmap: MarkovIntervalMap) -> ValidationReport:
    """Check monotonicity, uniform expansion and the Markov property."""
    images = []
    worst = 0.0
    lam = math.inf
    for i, br in enumerate(fmap.branches):
        lo, hi = fmap.interval(i)
        xs = np.concatenate(([lo], _grid(lo, hi), [hi]))
        ys = np.array([br.value(x) for x in xs])
        steps = np.diff(ys)
        orient = br.orientation(lo, hi)
        if not np.all(steps * orient > 0):
            raise NotMonotone(i)
        sing = br.singular_end(lo, hi)
        pts = list(_grid(lo, hi)) + [j for j in br.junctions() if lo < j < hi]
        if sing != "lo":
            pts.append(lo)
        if sing != "hi":
            pts.append(hi)
        for x in pts:
            d = abs(br.deriv(x))
            if d < lam:
                lam = d
            if not d > 1.0:
                raise NotExpanding(i, float(x))
        ends = []
        for y in (ys[0], ys[-1]):
            k = int(np.argmin([abs(y - q) for q in fmap.partition]))
            mis = abs(y - fmap.partition[k])
            worst = max(worst, mis)
            if mis > fmap.eps_markov:
                raise NotMarkov(i, mis)
            ends.append(k)
        images.append((min(ends), max(ends)))
    return ValidationReport(lam, tuple(images), worst)


def transition_matrix(fmap: MarkovIntervalMap) -> np.ndarray:
    """A[i, k] = 1 iff f(int I_i) meets int I_k."""
    rep = validate(fmap)
    A = np.zeros((fmap.size, fmap.size), dtype=np.int64)
    for i, (k0, k1) in enumerate(rep.images):
        A[i, k0:k1] = 1
    return A


# signed dynamics -------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SignedPoint:
    x: float
    side: int = NONE

    def __str__(self):
        return f"{self.x:g}{ {PLUS: '+', MINUS: '-', NONE: ''}[self.side] }".replace(" ", "")


def _normalize(fmap: MarkovIntervalMap, x: float, side: int) -> SignedPoint:
    x = fmap.snap(x)
    a, b = fmap.domain
    if x in (a, b):
        return SignedPoint(x, NONE)
    return SignedPoint(x, side)


def tilde_step(fmap: MarkovIntervalMap, sp: SignedPoint) -> SignedPoint:
    """One step of the one-sided dynamics, tracking orientation."""
    a, b = fmap.domain
    x, side = sp.x, sp.side
    if side == NONE:
        if x == a:
            side = PLUS
        elif x == b:
            side = MINUS
        elif x in fmap.partition:
            raise UntrackedPoint(f"interior partition point {x} needs a side")
        else:
            i = fmap.locate(x)
            if i is None:
                raise UntrackedPoint(f"{x} is within grid tolerance of the partition")
            return SignedPoint(fmap.branches[i].value(x), NONE)
    if x in fmap.partition:
        k = fmap.partition.index(x)
        i = k if side == PLUS else k - 1
        end = "lo" if side == PLUS else "hi"
        y = fmap.branch_limit(i, end)
        return _normalize(fmap, y, side * fmap.orientation(i))
    i = fmap.locate(x)
    if i is None:
        raise UntrackedPoint(f"{x} is within grid tolerance of the partition")
    return _normalize(fmap, fmap.branches[i].value(x), side * fmap.orientation(i))


def symbol_of(fmap: MarkovIntervalMap, sp: SignedPoint) -> int:
    """Subinterval that a one-sided neighbourhood of sp lies in."""
    a, b = fmap.domain
    if sp.x in fmap.partition:
        k = fmap.partition.index(sp.x)
        if sp.x == a:
            return 0
        if sp.x == b:
            return fmap.size - 1
        if sp.side == NONE:
            raise UntrackedPoint(sp)
        return k if sp.side == PLUS else k - 1
    i = fmap.locate(sp.x)
    if i is None:
        raise UntrackedPoint(sp)
    return i


def anchor_end(fmap: MarkovIntervalMap, sp: SignedPoint) -> tuple[int, float]:
    """(symbol, endpoint of that subinterval equal to sp.x)."""
    i = symbol_of(fmap, sp)
    lo, hi = fmap.interval(i)
    return i, (lo if sp.x == lo else hi)


@dataclass(frozen=True)
class OrbitClass:
    preperiod: int
    period: int

    @property
    def periodic(self) -> bool:
        return self.preperiod == 0

    def __str__(self):
        if self.periodic:
            return f"Periodic({self.period})"
        return f"Preperiodic({self.preperiod}, {self.period})"


def tilde_orbit(fmap: MarkovIntervalMap, start: SignedPoint, limit: int | None = None):
    """Orbit of a tracked point until it repeats: (points, OrbitClass)."""
    limit = limit or 4 * len(fmap.partition) + 4
    seen: dict[SignedPoint, int] = {}
    pts = []
    sp = start
    while sp not in seen:
        if len(pts) > limit:
            raise UntrackedPoint(f"orbit of {start} did not close in {limit} steps")
        seen[sp] = len(pts)
        pts.append(sp)
        sp = tilde_step(fmap, sp)
    first = seen[sp]
    return tuple(pts), OrbitClass(first, len(pts) - first)


@dataclass(frozen=True)
class Holder:
    exponent: float
    constant: float


@dataclass(frozen=True)
class SingularityInfo:
    location: SignedPoint
    branch_index: int
    orbit_class: OrbitClass
    holder: Holder | None  # None means not Hölder
    orbit: tuple[SignedPoint, ...] = ()

    @property
    def p(self) -> float:
        return self.location.x

    @property
    def periodic(self) -> bool:
        return self.orbit_class.periodic


def _sampled_holder(br: Branch, p: float, hi: float) -> Holder | None:
    # local exponent log|f(x) - f(p)| / log(x - p) along x = p + 10^-k
    fp = br.value(p)
    thetas, quots = [], []
    for k in range(8, 13):
        t = 10.0**-k
        if p + t >= hi or p + t == p:
            continue
        diff = abs(br.value(p + t) - fp)
        if diff == 0:
            continue
        thetas.append(math.log(diff) / math.log(t))
    if not thetas or min(thetas) < 0.25:
        return None
    theta = min(thetas)
    for x in _grid(p, hi, 200):
        quots.append(abs(br.value(x) - fp) / (x - p) ** theta)
    return Holder(theta, max(quots))


def _holder_at(fmap: MarkovIntervalMap, i: int) -> Holder | None:
    br = fmap.branches[i]
    lo, hi = fmap.interval(i)
    h = br.holder()
    if h is False:
        return None
    if h is None:
        return _sampled_holder(br, lo, hi)
    return Holder(*h)


def _raw_singularities(fmap: MarkovIntervalMap) -> list[tuple[int, str]]:
    found = []
    for i, br in enumerate(fmap.branches):
        end = br.singular_end(*fmap.interval(i))
        if end:
            found.append((i, end))
    return found


def reflect(fmap: MarkovIntervalMap) -> MarkovIntervalMap:
    """Conjugate by x -> a + b - x, turning right endpoints into left ones."""
    a, b = fmap.domain
    part = tuple(a + b - x for x in reversed(fmap.partition))
    brs = tuple(Reflected(br, a, b) for br in reversed(fmap.branches))
    return replace(fmap, partition=part, branches=brs, endpoint_values=None,
                   notes=fmap.notes + ("reflected by x -> a + b - x",))


def detect_singularities(fmap: MarkovIntervalMap) -> list[SingularityInfo]:
    """All one-sided singular endpoints.

    A minus-side singularity is reported after reflecting the map; callers
    that need the reflected map use :func:`prepare`.
    """
    out = []
    raw = _raw_singularities(fmap)
    if len(raw) == 1 and raw[0][1] == "hi":
        return detect_singularities(reflect(fmap))
    a, b = fmap.domain
    for i, end in raw:
        lo, hi = fmap.interval(i)
        if end == "lo":
            loc = SignedPoint(lo, NONE if lo == a else PLUS)
        else:
            loc = SignedPoint(hi, NONE if hi == b else MINUS)
        orbit, oc = tilde_orbit(fmap, loc)
        out.append(SingularityInfo(loc, i, oc, _holder_at(fmap, i), orbit))
    return out


def prepare(fmap: MarkovIntervalMap) -> tuple[MarkovIntervalMap, SingularityInfo | None]:
    """Validated map with its single plus-side singularity (or None)."""
    validate(fmap)
    raw = _raw_singularities(fmap)
    if len(raw) > 1:
        raise MultipleSingularities(detect_singularities(fmap))
    if raw and raw[0][1] == "hi":
        fmap = reflect(fmap)
    sings = detect_singularities(fmap)
    return fmap, (sings[0] if sings else None)


# coding ----------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    symbols: tuple[int, ...]
    matrix: np.ndarray
    full_matrix: np.ndarray
    measure: sft.ParryMeasure = field(repr=False)

    @property
    def entropy(self) -> float:
        return self.measure.entropy

    def local(self, word: Sequence[int]) -> tuple[int, ...] | None:
        """Relabel a word of partition indices; None if it leaves the component."""
        try:
            return tuple(self.symbols.index(s) for s in word)
        except ValueError:
            return None

    def mass(self, word: Sequence[int]) -> float:
        loc = self.local(word)
        return 0.0 if loc is None else sft.cylinder_mass(self.measure, loc)


def transitive_component(fmap: MarkovIntervalMap, seed: int) -> Component:
    A = transition_matrix(fmap)
    info = sft.scc_order(A)
    k = info.component_of(seed)
    if not info.recurrent[k]:
        raise EmptyComponent(f"symbol {seed} lies on no cycle")
    syms = tuple(sorted(info.components[k]))
    sub = A[np.ix_(syms, syms)]
    return Component(syms, sub, A, sft.parry_measure(sub, labels=syms))


def itinerary(fmap: MarkovIntervalMap, x: float, depth: int) -> tuple[int, ...]:
    word = []
    for step in range(depth):
        i = fmap.locate(x)
        if i is None:
            raise OrbitHitsBoundary(step)
        word.append(i)
        x = fmap.branches[i].value(x)
    return tuple(word)


def cylinder_bracket(fmap: MarkovIntervalMap, w) -> tuple[float, float]:
    """Closed interval containing the projection of the cylinder [w]."""
    w = sft.as_word(w)
    if not w:
        raise ValueError("empty word")
    A = transition_matrix(fmap)
    if not sft.is_admissible(A, w):
        raise Inadmissible(w)
    return _pull_back(fmap, w, *fmap.interval(w[-1]))


def _pull_back(fmap, w, l, r):
    for s in reversed(w[:-1]):
        lo, hi = fmap.interval(s)
        br = fmap.branches[s]
        a, b = sorted((br.inverse(l, lo, hi), br.inverse(r, lo, hi)))
        l, r = max(a, lo), min(b, hi)
    return l, r


def singular_code(fmap: MarkovIntervalMap, sing: SingularityInfo, length: int) -> tuple[int, ...]:
    """First symbols of the coding of the singular point p+."""
    orbit = sing.orbit
    pre, per = sing.orbit_class.preperiod, sing.orbit_class.period
    out = []
    for k in range(length):
        idx = k if k < pre else pre + (k - pre) % per
        out.append(symbol_of(fmap, orbit[idx]))
    return tuple(out)


def _orbit_point(sing: SingularityInfo, k: int) -> SignedPoint:
    pre, per = sing.orbit_class.preperiod, sing.orbit_class.period
    return sing.orbit[k if k < pre else pre + (k - pre) % per]


def logdist_bracket(fmap: MarkovIntervalMap, sing: SingularityInfo, w) -> tuple[float, float]:
    """Bracket of [w] as log-distances (t_near, t_far) from p, for words that
    begin with the singular symbol.  t_near >= t_far; t = -log(x - p)."""
    w = sft.as_word(w)
    code = singular_code(fmap, sing, len(w))
    m = 0
    while m < len(w) and w[m] == code[m]:
        m += 1
    if m == 0:
        raise BracketTouchesSingularity("word does not start at the singular interval")
    if m == len(w):
        # [w] contains p itself
        l, r = _pull_back(fmap, w, *fmap.interval(w[-1]))
        return math.inf, -math.log(r - sing.p)
    # suffix starting at the last shared symbol, bracketed in real coordinates
    l, r = _pull_back(fmap, w[m - 1:], *fmap.interval(w[-1]))
    _, e = anchor_end(fmap, _orbit_point(sing, m - 1))
    d = sorted((abs(l - e), abs(r - e)))
    ts = [-math.log(x) if x > 0 else math.inf for x in d]
    for k in range(m - 2, -1, -1):
        sym, end = anchor_end(fmap, _orbit_point(sing, k))
        lo, hi = fmap.interval(sym)
        br = fmap.branches[sym]
        ts = [br.inverse_logdist(s, end, lo, hi) if math.isfinite(s) else math.inf for s in ts]
    return ts[0], ts[1]


def b_range_from_bracket(l: float, r: float, p: float) -> tuple[float, float]:
    """Range of |log(x - p)| for x in [l, r] with l >= p."""
    if l < p:
        raise BracketTouchesSingularity(f"bracket [{l}, {r}] extends left of {p}")
    vals = [abs(math.log(r - p))]
    vals.append(math.inf if l == p else abs(math.log(l - p)))
    lo = 0.0 if l - p <= 1.0 <= r - p else min(vals)
    return lo, max(vals)


def b_range_on_cylinder(fmap: MarkovIntervalMap, sing: SingularityInfo, w) -> tuple[float, float]:
    w = sft.as_word(w)
    if w and w[0] == sing.branch_index:
        t_far, t_near = sorted(logdist_bracket(fmap, sing, w))
        if t_far >= 0:
            return t_far, t_near
    l, r = cylinder_bracket(fmap, w)
    return b_range_from_bracket(l, r, sing.p)
