"""Parsing of SVG path ``d`` attributes and the statistics derived from them."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "EmptyPath",
    "PathCommand",
    "PathProgram",
    "PathMetrics",
    "parse_path",
    "path_metrics",
    "to_absolute",
    "pen_positions",
]

ARITY = {"M": 2, "L": 2, "T": 2, "H": 1, "V": 1, "C": 6, "S": 4, "Q": 4, "A": 7, "Z": 0}

POLYGON_TOLERANCE = 1e-6

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_SEPARATORS = re.compile(r"[\s,]*")
_WHITESPACE = re.compile(r"\s*")
_COMMANDS = frozenset("MmLlHhVvCcSsQqTtAaZz")


class EmptyPath(ValueError):
    """The path data has no leading moveto command."""


class PathCommand(NamedTuple):
    op: str
    args: tuple[float, ...]


@dataclass(frozen=True)
class PathProgram:
    commands: tuple[PathCommand, ...]
    d_length: int


@dataclass(frozen=True)
class PathMetrics:
    d_length: int
    start: tuple[float, float]
    end: tuple[float, float]
    endpoint_distance: float
    is_polygon: bool
    arc_calls: int


class _Truncated(Exception):
    pass


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self, pattern=_SEPARATORS):
        self.pos = pattern.match(self.text, self.pos).end()

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def number(self) -> float:
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if m is None:
            raise _Truncated
        self.pos = m.end()
        return float(m.group())

    def flag(self) -> float:
        # flags are single characters and may be packed without separators
        self.skip()
        ch = self.peek()
        if ch not in ("0", "1"):
            raise _Truncated
        self.pos += 1
        return float(ch)

    def starts_number(self) -> bool:
        self.skip()
        return _NUMBER.match(self.text, self.pos) is not None


def _read_args(scanner: _Scanner, op: str) -> tuple[float, ...]:
    if op in "Aa":
        rx, ry, rot = scanner.number(), scanner.number(), scanner.number()
        large, sweep = scanner.flag(), scanner.flag()
        return (rx, ry, rot, large, sweep, scanner.number(), scanner.number())
    return tuple(scanner.number() for _ in range(ARITY[op.upper()]))


def parse_path(d: str) -> PathProgram:
    """Parse path data into an explicit command list.

    Implicit repetition is expanded (extra pairs after a moveto become
    linetos). Parsing stops silently at the first malformed command, keeping
    every complete command before it.
    """
    scanner = _Scanner(d)
    commands: list[PathCommand] = []
    op = None
    while True:
        scanner.skip(_WHITESPACE)
        if scanner.at_end():
            break
        ch = scanner.peek()
        if ch in _COMMANDS:
            op = ch
            scanner.pos += 1
        elif op is None or op in "Zz" or not scanner.starts_number():
            break
        if op in "Zz":
            commands.append(PathCommand(op, ()))
            scanner.skip()
            continue
        saved = scanner.pos
        try:
            args = _read_args(scanner, op)
        except _Truncated:
            scanner.pos = saved
            break
        commands.append(PathCommand(op, args))
        if op in "Mm":
            op = "L" if op == "M" else "l"
        scanner.skip()
    if not commands or commands[0].op not in "Mm":
        raise EmptyPath(f"path data has no leading moveto: {d[:40]!r}")
    return PathProgram(tuple(commands), len(d))


def _walk(program: PathProgram):
    """Yield (absolute command, pen position after it) for each command."""
    x = y = 0.0
    sx = sy = 0.0
    for cmd in program.commands:
        op, args = cmd
        upper = op.upper()
        rel = op.islower()
        if upper == "Z":
            absolute = PathCommand("Z", ())
            x, y = sx, sy
        elif upper == "H":
            nx = args[0] + (x if rel else 0.0)
            absolute = PathCommand("H", (nx,))
            x = nx
        elif upper == "V":
            ny = args[0] + (y if rel else 0.0)
            absolute = PathCommand("V", (ny,))
            y = ny
        elif upper == "A":
            ex = args[5] + (x if rel else 0.0)
            ey = args[6] + (y if rel else 0.0)
            absolute = PathCommand("A", args[:5] + (ex, ey))
            x, y = ex, ey
        else:
            ox, oy = (x, y) if rel else (0.0, 0.0)
            shifted = tuple(a + (ox if i % 2 == 0 else oy) for i, a in enumerate(args))
            absolute = PathCommand(upper, shifted)
            x, y = shifted[-2], shifted[-1]
            if upper == "M":
                sx, sy = x, y
        yield absolute, (x, y)


def to_absolute(program: PathProgram) -> PathProgram:
    """Rewrite every relative command as its absolute equivalent.

    ``d_length`` is carried over from the source program.
    """
    return PathProgram(tuple(cmd for cmd, _ in _walk(program)), program.d_length)


def pen_positions(program: PathProgram) -> list[tuple[float, float]]:
    return [pen for _, pen in _walk(program)]


def path_metrics(program: PathProgram) -> PathMetrics:
    pens = pen_positions(program)
    start = pens[0]
    end = pens[-1]
    distance = math.hypot(end[0] - start[0], end[1] - start[1])
    closed = program.commands[-1].op in "Zz"
    arcs = sum(1 for cmd in program.commands if cmd.op in "Aa")
    return PathMetrics(
        d_length=program.d_length,
        start=start,
        end=end,
        endpoint_distance=distance,
        is_polygon=closed or distance <= POLYGON_TOLERANCE,
        arc_calls=arcs,
    )
