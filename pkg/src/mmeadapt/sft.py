"""Subshifts of finite type: graph structure, Perron data and the Parry measure.

Words are sequences of symbols ``0..size-1``; a string of digits is accepted
as shorthand, so ``"0110"`` and ``(0, 1, 1, 0)`` are the same word.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NoConvergence, NotIrreducible, PeriodMismatch, SymbolOutOfRange

Word = Sequence[int]

PERRON_TOL = 1e-13
PERRON_MAX_ITER = 100_000


def as_matrix(A) -> np.ndarray:
    M = np.asarray(A, dtype=np.int64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError("transition matrix must be square and nonempty")
    if not np.all((M == 0) | (M == 1)):
        raise ValueError("transition matrix entries must be 0 or 1")
    return M


def as_word(w) -> tuple[int, ...]:
    if isinstance(w, str):
        return tuple(int(ch) for ch in w)
    return tuple(int(s) for s in w)


def is_essential(A) -> bool:
    """True when no symbol is stranded (every row and column has a 1)."""
    M = as_matrix(A)
    return bool(M.any(axis=1).all() and M.any(axis=0).all())


@dataclass(frozen=True)
class SccOrder:
    components: list[frozenset[int]]
    # (a, b) in order means component a reaches component b (a precedes b)
    order: frozenset[tuple[int, int]]
    # a component is recurrent when it carries at least one cycle
    recurrent: tuple[bool, ...]

    def component_of(self, symbol: int) -> int:
        for k, comp in enumerate(self.components):
            if symbol in comp:
                return k
        raise SymbolOutOfRange(symbol)


def _reachability(M: np.ndarray) -> np.ndarray:
    """R[i, j] iff there is a path of length >= 1 from i to j."""
    n = M.shape[0]
    R = M.astype(bool)
    for k in range(n):
        R = R | (R[:, [k]] & R[[k], :])
    return R


def scc_order(A) -> SccOrder:
    """Strongly connected components and the reachability order between them.

    Components are sorted by their smallest symbol.
    """
    M = as_matrix(A)
    _, labels = connected_components(M, directed=True, connection="strong")
    groups: dict[int, set[int]] = {}
    for sym, lab in enumerate(labels):
        groups.setdefault(int(lab), set()).add(sym)
    comps = sorted((frozenset(g) for g in groups.values()), key=min)
    R = _reachability(M)
    index = {s: k for k, c in enumerate(comps) for s in c}
    order = {
        (index[i], index[j])
        for i, j in zip(*np.nonzero(R))
        if index[int(i)] != index[int(j)]
    }
    recurrent = tuple(bool(R[min(c), min(c)]) for c in comps)
    return SccOrder(comps, frozenset(order), recurrent)


def is_irreducible(A) -> bool:
    M = as_matrix(A)
    info = scc_order(M)
    return len(info.components) == 1 and info.recurrent[0]


def _require_irreducible(M: np.ndarray) -> None:
    if not is_irreducible(M):
        raise NotIrreducible("transition matrix is not irreducible")


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    left: np.ndarray
    right: np.ndarray
    iterations: int = 0


def _dominant(M: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    # I + A is primitive whenever A is irreducible, so the iteration converges
    # even for periodic A; eigenvectors are shared and the root shifts by 1.
    n = M.shape[0]
    B = M.astype(float) + np.eye(n)
    Mf = M.astype(float)
    x = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        y = B @ x
        y /= y.sum()
        Ay = Mf @ y
        lam = float(y @ Ay / (y @ y))
        res = np.linalg.norm(Ay - lam * y) / (lam * np.linalg.norm(y))
        if res <= tol:
            return lam, y, it
        x = y
    raise NoConvergence(f"power iteration did not reach {tol:g} in {max_iter} steps")


def perron(A, tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> PerronData:
    """Perron root with positive left/right eigenvectors, normalized <u, v> = 1.

    Both vectors are scaled to the same Euclidean norm before normalizing, so a
    symmetric matrix gets u == v.
    """
    M = as_matrix(A)
    _require_irreducible(M)
    lam_r, v, it_r = _dominant(M, tol, max_iter)
    lam_l, u, it_l = _dominant(M.T.copy(), tol, max_iter)
    lam = 0.5 * (lam_r + lam_l)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    s = math.sqrt(float(u @ v))
    return PerronData(lam, u / s, v / s, max(it_r, it_l))


@dataclass(frozen=True)
class ParryMeasure:
    matrix: np.ndarray
    perron: PerronData
    stationary: np.ndarray
    stochastic: np.ndarray
    entropy: float
    # relabeled symbol k corresponds to original partition index labels[k]
    labels: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def relabel(self, original: int) -> int:
        return self.labels.index(original)

    def mass(self, w) -> float:
        return cylinder_mass(self, w)


def parry_measure(A, labels: Sequence[int] | None = None) -> ParryMeasure:
    M = as_matrix(A)
    pd = perron(M)
    u, v, lam = pd.left, pd.right, pd.eigenvalue
    P = M * v[None, :] / (lam * v[:, None])
    stat = u * v
    labs = tuple(labels) if labels is not None else tuple(range(M.shape[0]))
    return ParryMeasure(M, pd, stat, P, math.log(lam), labs)


def is_admissible(A, w) -> bool:
    M = as_matrix(A) if not isinstance(A, np.ndarray) else A
    w = as_word(w)
    return all(M[a, b] == 1 for a, b in zip(w, w[1:]))


def cylinder_mass(m: ParryMeasure, w) -> float:
    w = as_word(w)
    if not w:
        raise ValueError("empty word")
    if any(s < 0 or s >= m.size for s in w):
        raise SymbolOutOfRange(f"word {w} uses symbols outside 0..{m.size - 1}")
    if not is_admissible(m.matrix, w):
        return 0.0
    pd = m.perron
    return float(pd.left[w[0]] * pd.right[w[-1]] * pd.eigenvalue ** (1 - len(w)))


def admissible_words(A, length: int) -> Iterator[tuple[int, ...]]:
    M = as_matrix(A)
    n = M.shape[0]
    words: list[tuple[int, ...]] = [(i,) for i in range(n)]
    for _ in range(length - 1):
        words = [w + (j,) for w in words for j in range(n) if M[w[-1], j]]
    yield from words


@dataclass(frozen=True)
class GibbsConstants:
    c1: float
    c2: float


def gibbs_constants(m: ParryMeasure) -> GibbsConstants:
    """Tight constants in c1 e^{-nh} <= mu([w]) <= c2 e^{-nh}."""
    pd = m.perron
    outer = np.outer(pd.left, pd.right)
    return GibbsConstants(pd.eigenvalue * float(outer.min()), pd.eigenvalue * float(outer.max()))


@dataclass(frozen=True)
class CyclicStructure:
    period: int
    classes: tuple[frozenset[int], ...]

    def class_of(self, symbol: int) -> int:
        for k, c in enumerate(self.classes):
            if symbol in c:
                return k
        raise SymbolOutOfRange(symbol)


def cyclic_structure(A) -> CyclicStructure:
    M = as_matrix(A)
    _require_irreducible(M)
    n = M.shape[0]
    level = [-1] * n
    level[0] = 0
    queue = [0]
    for i in queue:
        for j in np.nonzero(M[i])[0]:
            if level[j] < 0:
                level[j] = level[i] + 1
                queue.append(int(j))
    d = reduce(math.gcd, (abs(level[i] + 1 - level[j]) for i, j in zip(*np.nonzero(M))), 0)
    classes = tuple(frozenset(i for i in range(n) if level[i] % d == k) for k in range(d))
    return CyclicStructure(d, classes)


Measure = Callable[[tuple[int, ...]], float]


@dataclass(frozen=True)
class MeasureCorrespondence:
    """Cylinder-functional correspondence between sigma^n-invariant measures on
    the first cyclic class and sigma-invariant measures on the whole shift."""

    matrix: np.ndarray
    cyclic: CyclicStructure
    base_class: int = 0
    _pre: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.cyclic.period

    def _prefixes(self, length: int, end: int) -> list[tuple[int, ...]]:
        """Admissible words u of the given length starting in the base class
        with u[-1] -> end allowed."""
        key = (length, end)
        if key not in self._pre:
            base = self.cyclic.classes[self.base_class]
            out = [u for u in admissible_words(self.matrix, length)
                   if u[0] in base and self.matrix[u[-1], end]]
            self._pre[key] = out
        return self._pre[key]

    def forward(self, nu: Measure) -> Measure:
        n = self.n

        def mu(w) -> float:
            w = as_word(w)
            total = 0.0
            for i in range(n):
                if i == 0:
                    if w[0] in self.cyclic.classes[self.base_class]:
                        total += nu(w)
                else:
                    total += sum(nu(u + w) for u in self._prefixes(i, w[0]))
            return total / n

        return mu

    def inverse(self, mu: Measure) -> Measure:
        n = self.n
        base = self.cyclic.classes[self.base_class]

        def nu(w) -> float:
            w = as_word(w)
            return n * mu(w) if w[0] in base else 0.0

        return nu


def measure_correspondence(A, n: int, base_class: int = 0) -> MeasureCorrespondence:
    """Correspondence phi for return period n; n must equal the cyclic period."""
    M = as_matrix(A)
    cyc = cyclic_structure(M)
    if n != cyc.period:
        raise PeriodMismatch(f"period {n} differs from the cyclic period {cyc.period}")
    return MeasureCorrespondence(M, cyc, base_class)


def matrix_power(A, n: int) -> np.ndarray:
    return (np.linalg.matrix_power(as_matrix(A), n) > 0).astype(np.int64)


def all_words(size: int, length: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(size), repeat=length)
