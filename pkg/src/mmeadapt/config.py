"""Line-oriented map descriptions.

    name = eqnonadapt
    partition = 0, 1/2, 1

    [branch]
    interval = 0
    kind = power_offset
    span = 0, 1/16
    p = 0
    ...

Numbers accept `p/q`.  Several `[branch]` sections on the same interval are
glued in order of their spans.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

from .branches import Affine, DerivativeBlend, Glued, IterLogPower, LogReciprocal, PowerOffset
from .errors import MapError, ParseError, ValidationError
from .intervalmap import EPS_GRID, EPS_MARKOV, MarkovIntervalMap, validate

KINDS = {
    "affine": Affine,
    "power_offset": PowerOffset,
    "log_reciprocal": LogReciprocal,
    "iter_log_power": IterLogPower,
    "derivative_blend": DerivativeBlend,
}
KIND_OF = {cls: name for name, cls in KINDS.items()}
HEADER_KEYS = {"name", "domain", "partition", "eps_markov", "eps_grid", "depth"}
BRANCH_KEYS = {"interval", "kind", "span", "orientation"}


@dataclass(frozen=True)
class BranchSpec:
    interval: int
    kind: str
    params: tuple[tuple[str, float], ...]
    span: tuple[float, float] | None = None
    orientation: int | None = None

    def build(self):
        return KINDS[self.kind](**dict(self.params))


@dataclass(frozen=True)
class MapConfig:
    partition: tuple[float, ...]
    branches: tuple[BranchSpec, ...]
    name: str = ""
    eps_markov: float = EPS_MARKOV
    eps_grid: float = EPS_GRID
    depth: int | None = None

    @property
    def domain(self) -> tuple[float, float]:
        return self.partition[0], self.partition[-1]


def _number(text: str, line: int) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise ParseError(line, f"not a number: {text.strip()!r}") from None


def _numbers(text: str, line: int) -> tuple[float, ...]:
    return tuple(_number(t, line) for t in text.split(","))


def parse_config(text: str) -> MapConfig:
    header: dict[str, tuple[str, int]] = {}
    sections: list[tuple[int, dict[str, tuple[str, int]]]] = []
    current = header
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[branch]":
            current = {}
            sections.append((n, current))
            continue
        if line.startswith("["):
            raise ParseError(n, f"unknown section {line}")
        if "=" not in line:
            raise ParseError(n, "expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if current is header and key not in HEADER_KEYS:
            raise ParseError(n, f"unknown field {key!r}")
        if key in current:
            raise ParseError(n, f"duplicate field {key!r}")
        current[key] = (value, n)

    if "partition" not in header:
        raise ParseError(0, "missing field 'partition'")
    ptext, pline = header["partition"]
    partition = _numbers(ptext, pline)
    if len(partition) < 2 or any(b <= a for a, b in zip(partition, partition[1:])):
        raise ParseError(pline, "partition must be strictly increasing")
    if "domain" in header:
        dtext, dline = header["domain"]
        if _numbers(dtext, dline) != (partition[0], partition[-1]):
            raise ParseError(dline, "domain must match the partition ends")

    specs = []
    for start, sec in sections:
        for key in ("interval", "kind"):
            if key not in sec:
                raise ParseError(start, f"branch section missing {key!r}")
        idx_text, idx_line = sec["interval"]
        try:
            idx = int(idx_text)
        except ValueError:
            raise ParseError(idx_line, "interval must be an integer") from None
        if not 0 <= idx < len(partition) - 1:
            raise ParseError(idx_line, f"interval {idx} out of range")
        kind, kline = sec["kind"]
        if kind not in KINDS:
            raise ParseError(kline, f"unknown kind {kind!r}")
        names = [f.name for f in dataclasses.fields(KINDS[kind])]
        extra = set(sec) - BRANCH_KEYS - set(names)
        if extra:
            raise ParseError(start, f"unknown field(s) {sorted(extra)} for {kind}")
        missing = [f for f in names if f not in sec]
        if missing:
            raise ParseError(start, f"{kind} needs {missing}")
        params = tuple((f, _number(*sec[f])) for f in names)
        span = None
        if "span" in sec:
            span = _numbers(*sec["span"])
            if len(span) != 2 or span[0] >= span[1]:
                raise ParseError(sec["span"][1], "span needs two increasing numbers")
        orient = None
        if "orientation" in sec:
            otext, oline = sec["orientation"]
            if otext not in ("+1", "1", "-1"):
                raise ParseError(oline, "orientation is +1 or -1")
            orient = int(otext)
        specs.append(BranchSpec(idx, kind, params, span, orient))

    covered = {s.interval for s in specs}
    for i in range(len(partition) - 1):
        if i not in covered:
            raise ParseError(0, f"no branch for interval {i}")

    def opt(key, conv):
        if key not in header:
            return None
        value, line = header[key]
        try:
            return conv(value)
        except ValueError:
            raise ParseError(line, f"bad value for {key!r}") from None

    return MapConfig(
        partition=partition,
        branches=tuple(specs),
        name=header.get("name", ("", 0))[0],
        eps_markov=opt("eps_markov", float) or EPS_MARKOV,
        eps_grid=opt("eps_grid", float) or EPS_GRID,
        depth=opt("depth", int),
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize(cfg: MapConfig) -> str:
    out = []
    if cfg.name:
        out.append(f"name = {cfg.name}")
    out.append("partition = " + ", ".join(_fmt(x) for x in cfg.partition))
    out.append(f"eps_markov = {cfg.eps_markov!r}")
    out.append(f"eps_grid = {cfg.eps_grid!r}")
    if cfg.depth is not None:
        out.append(f"depth = {cfg.depth}")
    for b in cfg.branches:
        out += ["", "[branch]", f"interval = {b.interval}", f"kind = {b.kind}"]
        if b.span is not None:
            out.append(f"span = {_fmt(b.span[0])}, {_fmt(b.span[1])}")
        if b.orientation is not None:
            out.append(f"orientation = {b.orientation:+d}")
        out += [f"{k} = {_fmt(v)}" for k, v in b.params]
    return "\n".join(out) + "\n"


def build_map(cfg: MapConfig) -> MarkovIntervalMap:
    """MarkovIntervalMap for a config; ValidationError if it fails validation."""
    branches = []
    for i in range(len(cfg.partition) - 1):
        specs = sorted((s for s in cfg.branches if s.interval == i),
                       key=lambda s: s.span[0] if s.span else 0.0)
        lo, hi = cfg.partition[i], cfg.partition[i + 1]
        if len(specs) == 1 and specs[0].span in (None, (lo, hi)):
            branches.append(specs[0].build())
            continue
        if any(s.span is None for s in specs):
            raise ValidationError("glued branches need a span on every piece")
        ends = [specs[0].span[0]] + [s.span[1] for s in specs]
        if ends[0] != lo or ends[-1] != hi or any(
                a.span[1] != b.span[0] for a, b in zip(specs, specs[1:])):
            raise ValidationError(f"spans on interval {i} do not tile [{lo}, {hi}]")
        branches.append(Glued(tuple((s.span[0], s.span[1], s.build()) for s in specs)))
    fmap = MarkovIntervalMap(cfg.partition, tuple(branches), eps_markov=cfg.eps_markov,
                             eps_grid=cfg.eps_grid, name=cfg.name)
    try:
        validate(fmap)
    except MapError as err:
        raise ValidationError(err) from err
    for s in cfg.branches:
        if s.orientation is not None and s.orientation != fmap.orientation(s.interval):
            raise ValidationError(f"branch on interval {s.interval} has the wrong orientation")
    return fmap


def _spec(idx: int, br, span=None) -> BranchSpec:
    kind = KIND_OF.get(type(br))
    if kind is None:
        raise ValueError(f"{type(br).__name__} branches have no config form")
    params = tuple((f.name, float(getattr(br, f.name))) for f in dataclasses.fields(br))
    return BranchSpec(idx, kind, params, span)


def config_of(fmap: MarkovIntervalMap, depth: int | None = None) -> MapConfig:
    """Descriptor of a map built from serializable branch kinds."""
    specs = []
    for i, br in enumerate(fmap.branches):
        if isinstance(br, Glued):
            specs += [_spec(i, piece, (lo, hi)) for lo, hi, piece in br.pieces]
        else:
            specs.append(_spec(i, br))
    return MapConfig(fmap.partition, tuple(specs), fmap.name, fmap.eps_markov, fmap.eps_grid, depth)


def load_map(path: str) -> tuple[MarkovIntervalMap, MapConfig]:
    with open(path, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    return build_map(cfg), cfg
