"""Adaptedness of measures of maximal entropy for Markov interval maps with a
one-sided singularity."""
from .adaptedness import classify_mme, integral_bounds, period_reduce
from .config import build_map, parse_config, serialize
from .intervalmap import MarkovIntervalMap, prepare, validate

__all__ = [
    "MarkovIntervalMap",
    "build_map",
    "classify_mme",
    "integral_bounds",
    "parse_config",
    "period_reduce",
    "prepare",
    "serialize",
    "validate",
]
