"""Monotone C^1 branch kinds for Markov interval maps.

Every branch is evaluated on a closed subinterval ``[lo, hi]`` supplied by the
caller. Near an endpoint the package works in *log-distance* coordinates: a
point ``x`` close to ``end`` is stored as ``t = -log|x - end|``.  The method
:meth:`Branch.inverse_logdist` pulls such a coordinate back through the
branch, which is how cylinders of depth several hundred around a singular
fixed point are handled without underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

BISECT_ITERS = 200
# below this distance the smooth inverse is replaced by its linearization
LINEAR_CUTOFF = 1e-9


def bisect_inverse(fn: Callable[[float], float], y: float, lo: float, hi: float) -> float:
    flo, fhi = fn(lo), fn(hi)
    increasing = fhi > flo
    a, b = lo, hi
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if (fn(mid) < y) == increasing:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _sign(v: float) -> int:
    return 1 if v > 0 else -1


class Branch:
    """Base class; subclasses implement ``value`` and ``deriv``."""

    def value(self, x: float) -> float:
        raise NotImplementedError

    def deriv(self, x: float) -> float:
        raise NotImplementedError

    def orientation(self, lo: float, hi: float) -> int:
        return _sign(self.value(hi) - self.value(lo))

    def inverse(self, y: float, lo: float, hi: float) -> float:
        return bisect_inverse(self.value, y, lo, hi)

    def singular_end(self, lo: float, hi: float) -> str | None:
        """'lo' or 'hi' if |f'| is unbounded at that end of [lo, hi]."""
        return None

    def closed_beta(self) -> float | None:
        """Closed-form singularity strength at the singular end, if known."""
        return None

    def holder(self) -> tuple[float, float] | None | bool:
        """(exponent, constant) if Hölder at the singular end, False if known
        not Hölder, None when unknown and it must be sampled."""
        return None

    def junctions(self) -> tuple[float, ...]:
        return ()

    # log-distance arithmetic -------------------------------------------------
    def _image_side(self, end: float, lo: float, hi: float) -> int:
        other = hi if end == lo else lo
        return _sign(self.value(other) - self.value(end))

    def inverse_logdist(self, s: float, end: float, lo: float, hi: float) -> float:
        """Given y with -log|y - f(end)| = s (y inside the image), return
        -log|x - end| for the preimage x in [lo, hi]."""
        d = math.exp(-s)
        if d < LINEAR_CUTOFF * (hi - lo):
            fp = abs(self.deriv(end))
            if math.isfinite(fp) and fp > 0:
                return s + math.log(fp)
        y = self.value(end) + self._image_side(end, lo, hi) * d
        x = self.inverse(y, lo, hi)
        dist = abs(x - end)
        return -math.log(dist) if dist > 0 else math.inf

    def log_deriv_logdist(self, t: float, end: float, lo: float, hi: float) -> float:
        """log|f'(x)| at the point x of [lo, hi] with -log|x - end| = t."""
        step = math.exp(-t)
        x = end + step if end == lo else end - step
        if x == end:
            return math.log(abs(self.deriv(end)))
        return math.log(abs(self.deriv(x)))

    def value_logdist(self, t: float, end: float, lo: float, hi: float) -> float:
        step = math.exp(-t)
        return self.value(end + step if end == lo else end - step)


@dataclass(frozen=True)
class Affine(Branch):
    """x -> a x + b."""

    a: float
    b: float

    def value(self, x):
        return self.a * x + self.b

    def deriv(self, x):
        return self.a

    def inverse(self, y, lo, hi):
        return (y - self.b) / self.a

    def inverse_logdist(self, s, end, lo, hi):
        return s + math.log(abs(self.a))

    def log_deriv_logdist(self, t, end, lo, hi):
        return math.log(abs(self.a))


@dataclass(frozen=True)
class PowerOffset(Branch):
    """x -> q + c (x - p)^(1/alpha), singular at x = p."""

    p: float
    c: float
    alpha: float
    q: float

    def __post_init__(self):
        if not self.alpha > 1 or self.c == 0:
            raise ValueError("PowerOffset needs alpha > 1 and c != 0")

    def value(self, x):
        return self.q + self.c * max(x - self.p, 0.0) ** (1.0 / self.alpha)

    def deriv(self, x):
        t = x - self.p
        if t <= 0:
            return math.copysign(math.inf, self.c)
        return self.c / self.alpha * t ** (1.0 / self.alpha - 1.0)

    def inverse(self, y, lo, hi):
        r = max((y - self.q) / self.c, 0.0)
        return self.p + r**self.alpha

    def singular_end(self, lo, hi):
        return "lo" if self.p == lo else None

    def closed_beta(self):
        return 1.0 - 1.0 / self.alpha

    def holder(self):
        return (1.0 / self.alpha, abs(self.c))

    def inverse_logdist(self, s, end, lo, hi):
        if end == self.p:
            return self.alpha * (s + math.log(abs(self.c)))
        return super().inverse_logdist(s, end, lo, hi)

    def log_deriv_logdist(self, t, end, lo, hi):
        if end == self.p:
            return math.log(abs(self.c) / self.alpha) + (1.0 - 1.0 / self.alpha) * t
        return super().log_deriv_logdist(t, end, lo, hi)

    def value_logdist(self, t, end, lo, hi):
        if end == self.p:
            return self.q + self.c * math.exp(-t / self.alpha)
        return super().value_logdist(t, end, lo, hi)


@dataclass(frozen=True)
class LogReciprocal(Branch):
    """x -> -c / log(x - p), value 0 at x = p; not Hölder at p."""

    p: float
    c: float

    def value(self, x):
        t = x - self.p
        if t <= 0:
            return 0.0
        return -self.c / math.log(t)

    def deriv(self, x):
        t = x - self.p
        if t <= 0:
            return math.copysign(math.inf, self.c)
        return self.c / (t * math.log(t) ** 2)

    def inverse(self, y, lo, hi):
        if y == 0:
            return self.p
        return self.p + math.exp(-self.c / y)

    def singular_end(self, lo, hi):
        return "lo" if self.p == lo else None

    def closed_beta(self):
        return 1.0

    def holder(self):
        return False

    def inverse_logdist(self, s, end, lo, hi):
        if end == self.p:
            return abs(self.c) * math.exp(s) if s < 700 else math.inf
        return super().inverse_logdist(s, end, lo, hi)

    def log_deriv_logdist(self, t, end, lo, hi):
        if end == self.p:
            return math.log(abs(self.c)) + t - 2.0 * math.log(t)
        return super().log_deriv_logdist(t, end, lo, hi)

    def value_logdist(self, t, end, lo, hi):
        if end == self.p:
            return self.c / t
        return super().value_logdist(t, end, lo, hi)


def _iterlog_g_of_t(t: float) -> float:
    # g(x) = 1 / log(log |log x|) written in t = -log x
    return 1.0 / math.log(math.log(t))


@dataclass(frozen=True)
class IterLogPower(Branch):
    """x -> x^(1/(2 - g(x))) with g(x) = 1/log(log|log x|) on (0, rho)."""

    rho: float

    def value(self, x):
        if x <= 0:
            return 0.0
        t = -math.log(x)
        return math.exp(-t / (2.0 - _iterlog_g_of_t(t)))

    def deriv(self, x):
        if x <= 0:
            return math.inf
        return math.exp(self.log_deriv_logdist(-math.log(x), 0.0, 0.0, self.rho))

    def inverse(self, y, lo, hi):
        if y <= 0:
            return 0.0
        return math.exp(-self.inverse_logdist(-math.log(y), 0.0, lo, hi))

    def singular_end(self, lo, hi):
        return "lo" if lo == 0.0 else None

    def closed_beta(self):
        # log f'/(-log x) = 1 - 1/(2 - g) + o(1) and g -> 0
        return 0.5

    def holder(self):
        # x^(1/(2-g)) <= x^(1/2) near 0
        return (0.5, 1.0)

    def inverse_logdist(self, s, end, lo, hi):
        if end != 0.0:
            return super().inverse_logdist(s, end, lo, hi)
        # solve t / (2 - g(t)) = s; g decreases in t, so t lies in [s, 2 s]
        a, b = s, 2.0 * s
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (a + b)
            if mid / (2.0 - _iterlog_g_of_t(mid)) < s:
                a = mid
            else:
                b = mid
            if b - a <= 1e-15 * b:
                break
        return 0.5 * (a + b)

    def log_deriv_logdist(self, t, end, lo, hi):
        if end != 0.0:
            return super().log_deriv_logdist(t, end, lo, hi)
        g = _iterlog_g_of_t(t)
        two_g = 2.0 - g
        log_f = -t / two_g
        return log_f + t + math.log(two_g - g * g / math.log(t)) - 2.0 * math.log(two_g)

    def value_logdist(self, t, end, lo, hi):
        if end == 0.0:
            return math.exp(-t / (2.0 - _iterlog_g_of_t(t)))
        return super().value_logdist(t, end, lo, hi)


@dataclass(frozen=True)
class DerivativeBlend(Branch):
    """Monotone branch with derivative affine from d0 at x0 to d1 at x1."""

    x0: float
    x1: float
    d0: float
    d1: float
    y0: float

    @property
    def _k(self):
        return (self.d1 - self.d0) / (self.x1 - self.x0)

    def value(self, x):
        u = x - self.x0
        return self.y0 + self.d0 * u + 0.5 * self._k * u * u

    def deriv(self, x):
        return self.d0 + self._k * (x - self.x0)

    def _offset_at(self, end: float, dy: float) -> float:
        # solve f'(end) u + k/2 u^2 = dy stably
        dbase = self.deriv(end)
        disc = dbase * dbase + 2.0 * self._k * dy
        root = math.sqrt(max(disc, 0.0))
        return 2.0 * dy / (dbase + math.copysign(root, dbase))

    def inverse(self, y, lo, hi):
        return self.x0 + self._offset_at(self.x0, y - self.y0)

    def inverse_logdist(self, s, end, lo, hi):
        dy = self._image_side(end, lo, hi) * math.exp(-s)
        u = self._offset_at(end, dy)
        return -math.log(abs(u)) if u != 0 else s + math.log(abs(self.deriv(end)))


@dataclass(frozen=True)
class Custom(Branch):
    """User-supplied pure value/derivative evaluators."""

    value_fn: Callable[[float], float] = field(compare=False)
    deriv_fn: Callable[[float], float] = field(compare=False)
    label: str = "custom"

    def value(self, x):
        return self.value_fn(x)

    def deriv(self, x):
        return self.deriv_fn(x)

    def singular_end(self, lo, hi):
        for end, sgn in (("lo", 1), ("hi", -1)):
            e = lo if end == "lo" else hi
            samples = []
            for k in range(3, 13):
                x = e + sgn * 10.0**-k
                if x == e or not lo < x < hi:
                    break
                samples.append(abs(self.deriv(x)))
            if len(samples) >= 4 and all(b > a for a, b in zip(samples, samples[1:])):
                if samples[-1] >= 1e3 * samples[0]:
                    return end
        return None

    def holder(self):
        return None


@dataclass(frozen=True)
class Glued(Branch):
    """Several branches glued C^1 across a subinterval; pieces are
    (lo, hi, branch) in increasing order and cover the subinterval."""

    pieces: tuple[tuple[float, float, Branch], ...]

    def _piece(self, x):
        for lo, hi, br in self.pieces:
            if x <= hi:
                return lo, hi, br
        return self.pieces[-1]

    def value(self, x):
        return self._piece(x)[2].value(x)

    def deriv(self, x):
        return self._piece(x)[2].deriv(x)

    def inverse(self, y, lo, hi):
        for plo, phi, br in self.pieces:
            a, b = sorted((br.value(plo), br.value(phi)))
            if a <= y <= b:
                return br.inverse(y, plo, phi)
        return bisect_inverse(self.value, y, lo, hi)

    def junctions(self):
        return tuple(lo for lo, _, _ in self.pieces[1:])

    def _end_piece(self, end, lo):
        return self.pieces[0] if end == lo else self.pieces[-1]

    def singular_end(self, lo, hi):
        first, last = self.pieces[0], self.pieces[-1]
        if first[2].singular_end(first[0], first[1]) == "lo":
            return "lo"
        if last[2].singular_end(last[0], last[1]) == "hi":
            return "hi"
        return None

    def _singular_piece(self):
        for plo, phi, br in (self.pieces[0], self.pieces[-1]):
            if br.singular_end(plo, phi):
                return br
        return None

    def closed_beta(self):
        br = self._singular_piece()
        return br.closed_beta() if br else None

    def holder(self):
        br = self._singular_piece()
        return br.holder() if br else None

    def inverse_logdist(self, s, end, lo, hi):
        plo, phi, br = self._end_piece(end, lo)
        reach = abs(br.value(phi) - br.value(plo))
        if math.exp(-s) <= reach:
            return br.inverse_logdist(s, end, plo, phi)
        return Branch.inverse_logdist(self, s, end, lo, hi)

    def log_deriv_logdist(self, t, end, lo, hi):
        plo, phi, br = self._end_piece(end, lo)
        if math.exp(-t) <= phi - plo:
            return br.log_deriv_logdist(t, end, plo, phi)
        return Branch.log_deriv_logdist(self, t, end, lo, hi)

    def value_logdist(self, t, end, lo, hi):
        plo, phi, br = self._end_piece(end, lo)
        if math.exp(-t) <= phi - plo:
            return br.value_logdist(t, end, plo, phi)
        return Branch.value_logdist(self, t, end, lo, hi)


@dataclass(frozen=True)
class Composed(Branch):
    """x -> F(x + shift) - shift where F applies ``steps`` in order; each step
    is (lo, hi, branch) with [lo, hi] the image of the composite interval so
    far (in the original coordinates)."""

    steps: tuple[tuple[float, float, Branch], ...]
    shift: float = 0.0

    def value(self, x):
        y = x + self.shift
        for _, _, br in self.steps:
            y = br.value(y)
        return y - self.shift

    def deriv(self, x):
        y = x + self.shift
        d = 1.0
        for _, _, br in self.steps:
            d *= br.deriv(y)
            y = br.value(y)
        return d

    def inverse(self, y, lo, hi):
        z = y + self.shift
        for slo, shi, br in reversed(self.steps):
            z = br.inverse(z, slo, shi)
        return z - self.shift

    def _chain_ends(self, end):
        ends = []
        z = end + self.shift
        for slo, shi, br in self.steps:
            ends.append(z)
            w = br.value(z)
            z = w
        return ends

    def singular_end(self, lo, hi):
        slo, shi, br = self.steps[0]
        e = br.singular_end(slo, shi)
        if e == "lo" and slo == lo + self.shift:
            return "lo"
        if e == "hi" and shi == hi + self.shift:
            return "hi"
        return None

    def closed_beta(self):
        # chain rule: the remaining factors are bounded and bounded away from 0
        return self.steps[0][2].closed_beta()

    def holder(self):
        return self.steps[0][2].holder()

    def inverse_logdist(self, s, end, lo, hi):
        ends = self._chain_ends(end)
        for (slo, shi, br), e in zip(reversed(self.steps), reversed(ends)):
            e_snap = slo if abs(e - slo) <= abs(e - shi) else shi
            s = br.inverse_logdist(s, e_snap, slo, shi)
        return s

    def log_deriv_logdist(self, t, end, lo, hi):
        ends = self._chain_ends(end)
        total = 0.0
        for (slo, shi, br), e in zip(self.steps, ends):
            e_snap = slo if abs(e - slo) <= abs(e - shi) else shi
            ld = br.log_deriv_logdist(t, e_snap, slo, shi)
            total += ld
            if br.singular_end(slo, shi) is not None:
                dist = abs(br.value_logdist(t, e_snap, slo, shi) - br.value(e_snap))
                t = -math.log(dist) if dist > 0 else math.inf
            else:
                t -= ld
        return total


@dataclass(frozen=True)
class Reflected(Branch):
    """Conjugate of ``inner`` by the reflection x -> a + b - x."""

    inner: Branch
    a: float
    b: float

    def _r(self, x):
        return self.a + self.b - x

    def value(self, x):
        return self._r(self.inner.value(self._r(x)))

    def deriv(self, x):
        return self.inner.deriv(self._r(x))

    def inverse(self, y, lo, hi):
        return self._r(self.inner.inverse(self._r(y), self._r(hi), self._r(lo)))

    def singular_end(self, lo, hi):
        e = self.inner.singular_end(self._r(hi), self._r(lo))
        return {"lo": "hi", "hi": "lo"}.get(e)

    def closed_beta(self):
        return self.inner.closed_beta()

    def holder(self):
        return self.inner.holder()

    def junctions(self):
        return tuple(self._r(j) for j in self.inner.junctions())

    def inverse_logdist(self, s, end, lo, hi):
        return self.inner.inverse_logdist(s, self._r(end), self._r(hi), self._r(lo))

    def log_deriv_logdist(self, t, end, lo, hi):
        return self.inner.log_deriv_logdist(t, self._r(end), self._r(hi), self._r(lo))

    def value_logdist(self, t, end, lo, hi):
        return self._r(self.inner.value_logdist(t, self._r(end), self._r(hi), self._r(lo)))
