"""Line-oriented architecture description language.

One declaration per line, '#' starts a comment, keywords are
case-insensitive:

    input 13
    batchnorm
    level 1: branches 6, units 128, relu, merge pairs
    level 2: branches 3, units 128, relu, merge all
    level 3: branches 1, units 128, relu
    output: 1, linear

A level is a row of parallel dense layers ("branches") of equal width. With
one incoming stream every branch reads it in full; otherwise branch i reads
stream i. "merge pairs" concatenates adjacent branch outputs in declaration
order (1+2, 3+4, ...), "merge all" concatenates everything into one stream,
"merge none" (the default) passes the branch outputs through unchanged.
"""

import re
from dataclasses import dataclass, field

from .errors import SpecError

ACTIVATIONS = ("relu", "linear")
MERGES = ("pairs", "all", "none")

DEFAULT_ARCHITECTURE = """\
input 13
batchnorm
level 1: branches 6, units 128, relu, merge pairs
level 2: branches 3, units 128, relu, merge all
level 3: branches 1, units 128, relu
output: 1, linear
"""


@dataclass(frozen=True)
class LevelSpec:
    branches: int
    units: int
    activation: str
    merge: str = "none"

    def streams_out(self) -> int:
        """Stream count this level emits after its merge step."""
        if self.merge == "pairs":
            return self.branches // 2
        if self.merge == "all":
            return 1
        return self.branches


@dataclass
class ArchitectureSpec:
    input_width: int
    use_batchnorm: bool
    levels: list[LevelSpec] = field(default_factory=list)
    output_units: int = 1
    output_activation: str = "linear"


_TOKEN = re.compile(r"[A-Za-z_]+|\d+|[:,]|\S")


def _tokens(line: str) -> list[str]:
    return _TOKEN.findall(line)


class _LineParser:
    def __init__(self, lineno: int, line: str):
        self.lineno = lineno
        self.toks = _tokens(line)
        self.pos = 0

    def fail(self, expected: str):
        got = self.toks[self.pos] if self.pos < len(self.toks) else "end of line"
        raise SpecError(f"line {self.lineno}: expected {expected}, got {got!r}")

    def peek(self):
        return self.toks[self.pos].lower() if self.pos < len(self.toks) else None

    def take(self, expected: str) -> str:
        if self.peek() != expected:
            self.fail(repr(expected))
        self.pos += 1
        return expected

    def take_int(self, what: str) -> int:
        tok = self.peek()
        if tok is None or not tok.isdigit():
            self.fail(f"integer {what}")
        self.pos += 1
        return int(tok)

    def take_word(self, what: str, choices) -> str:
        tok = self.peek()
        if tok not in choices:
            self.fail(f"{what} (one of {', '.join(choices)})")
        self.pos += 1
        return tok

    def done(self):
        if self.pos != len(self.toks):
            self.fail("end of line")


def parse_spec(text: str) -> ArchitectureSpec:
    """Parse and validate architecture text; raises SpecError on any problem."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise SpecError("line 1: expected 'input', got empty text")

    it = iter(lines)

    lineno, line = next(it)
    p = _LineParser(lineno, line)
    p.take("input")
    input_width = p.take_int("input width")
    p.done()

    use_batchnorm = False
    levels = []
    output_units = None
    output_activation = None
    expected_level = 1

    for lineno, line in it:
        p = _LineParser(lineno, line)
        head = p.peek()
        if head == "batchnorm":
            if levels or use_batchnorm:
                raise SpecError(
                    f"line {lineno}: 'batchnorm' must appear once, before the levels"
                )
            p.take("batchnorm")
            p.done()
            use_batchnorm = True
        elif head == "level":
            p.take("level")
            number = p.take_int("level number")
            if number != expected_level:
                raise SpecError(
                    f"line {lineno}: expected level {expected_level}, got level {number}"
                )
            expected_level += 1
            p.take(":")
            p.take("branches")
            branches = p.take_int("branch count")
            p.take(",")
            p.take("units")
            units = p.take_int("unit count")
            p.take(",")
            activation = p.take_word("activation", ACTIVATIONS)
            merge = "none"
            if p.peek() == ",":
                p.take(",")
                p.take("merge")
                merge = p.take_word("merge mode", MERGES)
            p.done()
            levels.append(LevelSpec(branches, units, activation, merge))
        elif head == "output":
            p.take("output")
            p.take(":")
            output_units = p.take_int("output units")
            p.take(",")
            output_activation = p.take_word("activation", ACTIVATIONS)
            p.done()
            trailing = next(it, None)
            if trailing is not None:
                raise SpecError(
                    f"line {trailing[0]}: unexpected declaration after 'output'"
                )
        else:
            p.fail("'batchnorm', 'level' or 'output'")

    if not levels:
        raise SpecError(f"line {lines[-1][0]}: expected at least one 'level' line")
    if output_units is None:
        raise SpecError(f"line {lines[-1][0]}: missing 'output' line")

    spec = ArchitectureSpec(
        input_width=input_width,
        use_batchnorm=use_batchnorm,
        levels=levels,
        output_units=output_units,
        output_activation=output_activation,
    )
    violations = validate_spec(spec)
    if violations:
        raise SpecError("; ".join(violations))
    return spec


def validate_spec(spec: ArchitectureSpec) -> list[str]:
    """Return every invariant violation (empty list means the spec is valid)."""
    out = []
    if spec.input_width < 1:
        out.append(f"input width must be positive, got {spec.input_width}")
    if spec.output_units < 1:
        out.append(f"output units must be positive, got {spec.output_units}")
    if spec.output_activation not in ACTIVATIONS:
        out.append(f"unknown output activation {spec.output_activation!r}")

    streams = 1
    for i, level in enumerate(spec.levels, start=1):
        if level.branches < 1:
            out.append(f"level {i}: branch count must be positive, got {level.branches}")
            continue
        if level.units < 1:
            out.append(f"level {i}: units must be positive, got {level.units}")
        if level.activation not in ACTIVATIONS:
            out.append(f"level {i}: unknown activation {level.activation!r}")
        if level.merge not in MERGES:
            out.append(f"level {i}: unknown merge mode {level.merge!r}")
            continue
        if i > 1 and level.branches != streams:
            out.append(f"level {i}: branches {level.branches} ≠ streams {streams}")
        if level.merge == "pairs" and level.branches % 2 != 0:
            out.append(
                f"level {i}: merge pairs requires an even branch count, got {level.branches}"
            )
            continue
        streams = level.streams_out()
    if spec.levels and streams != 1:
        out.append(
            f"final level emits {streams} streams; the output layer consumes exactly 1"
        )
    return out


def render_spec(spec: ArchitectureSpec) -> str:
    """Canonical text form; parse_spec(render_spec(s)) == s for valid specs."""
    lines = [f"input {spec.input_width}"]
    if spec.use_batchnorm:
        lines.append("batchnorm")
    for i, level in enumerate(spec.levels, start=1):
        line = f"level {i}: branches {level.branches}, units {level.units}, {level.activation}"
        if level.merge != "none":
            line += f", merge {level.merge}"
        lines.append(line)
    lines.append(f"output: {spec.output_units}, {spec.output_activation}")
    return "\n".join(lines) + "\n"


def default_spec() -> ArchitectureSpec:
    return parse_spec(DEFAULT_ARCHITECTURE)
