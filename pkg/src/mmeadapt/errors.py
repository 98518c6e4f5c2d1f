"""Exception types raised across the package."""


class MapError(ValueError):
    """Base class for all domain errors."""


# symbolic dynamics
class NotIrreducible(MapError):
    pass


class NoConvergence(MapError):
    pass


class SymbolOutOfRange(MapError):
    pass


class PeriodMismatch(MapError):
    pass


# interval maps
class NotMarkov(MapError):
    def __init__(self, index, mismatch):
        super().__init__(f"branch {index} endpoint image misses the partition by {mismatch:.3g}")
        self.index = index
        self.mismatch = mismatch


class NotExpanding(MapError):
    def __init__(self, index, witness):
        super().__init__(f"branch {index} has |f'| <= 1 near x = {witness!r}")
        self.index = index
        self.witness = witness


class NotMonotone(MapError):
    def __init__(self, index):
        super().__init__(f"branch {index} is not strictly monotone")
        self.index = index


class UntrackedPoint(MapError):
    pass


class MultipleSingularities(MapError):
    def __init__(self, found):
        super().__init__(f"{len(found)} singularities found, exactly one is supported")
        self.found = found


class EmptyComponent(MapError):
    pass


class OrbitHitsBoundary(MapError):
    def __init__(self, step):
        super().__init__(f"orbit lands on a partition point at step {step}")
        self.step = step


class Inadmissible(MapError):
    pass


class BracketTouchesSingularity(MapError):
    pass


# analysis
class NoSingularity(MapError):
    pass


class NotPeriodic(MapError):
    pass


class HypothesesNotMet(MapError):
    pass


class NoComponent(MapError):
    pass


class ZeroEntropy(MapError):
    pass


# constructions
class BadRho(MapError):
    pass


class ExponentTooSmall(MapError):
    pass


class BadEigenvalues(MapError):
    pass


# configs
class ParseError(MapError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(MapError):
    def __init__(self, violation):
        super().__init__(f"invalid map: {violation}")
        self.violation = violation
