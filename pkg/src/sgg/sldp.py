"""SLDP answers: sets, lists, dictionaries and points with tolerant equality.

Grammar (whitespace ignored)::

    expression = num | string | set | list | dict | point
    set   = "<" [expression {"," expression}] ">"
    list  = "[" [expression {"," expression}] "]"
    dict  = "{" [string ":" expression {"," string ":" expression}] "}"
    point = "POINT(" num num num ")"

Strings are C identifiers; numbers are signed ints or floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

DEFAULT_EPSILON = 0.01
DEFAULT_DELTA = 0.01
# absorbs binary rounding so boundary differences such as 1.01 - 1.00 count as 0.01
_SLACK = 1e-9


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class SldpSet:
    items: tuple


SldpValue = Union[float, str, Point, list, SldpSet, dict]


@dataclass(frozen=True)
class Tolerance:
    epsilon: float = DEFAULT_EPSILON
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.epsilon < 0 or self.delta < 0:
            raise ValueError("tolerances must be non-negative")


class SldpSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SldpSemanticError(ValueError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<point>[Pp][Oo][Ii][Nn][Tt]\s*\()
  | (?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[<>\[\]{}:,()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SldpSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, value, pos = self.take()
        if value != text:
            found = "end of input" if kind == "eof" else repr(value)
            raise SldpSyntaxError(f"expected {text!r}, found {found}", pos)

    def expression(self) -> SldpValue:
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return float(value)
        if kind == "name":
            self.take()
            return value
        if kind == "point":
            self.take()
            coords = []
            for _ in range(3):
                k, v, p = self.take()
                if k != "num":
                    raise SldpSyntaxError("POINT needs three space-separated numbers", p)
                coords.append(float(v))
            self.expect(")")
            return Point(*coords)
        if value == "<":
            self.take()
            return SldpSet(tuple(self.sequence(">")))
        if value == "[":
            self.take()
            return self.sequence("]")
        if value == "{":
            self.take()
            return self.dictionary()
        found = "end of input" if kind == "eof" else repr(value)
        raise SldpSyntaxError(f"expected an expression, found {found}", pos)

    def sequence(self, close: str) -> list:
        items = []
        if self.peek()[1] == close:
            self.take()
            return items
        while True:
            items.append(self.expression())
            kind, value, pos = self.take()
            if value == close:
                return items
            if value != ",":
                raise SldpSyntaxError(f"expected ',' or {close!r}", pos)

    def dictionary(self) -> dict:
        out: dict = {}
        if self.peek()[1] == "}":
            self.take()
            return out
        while True:
            kind, key, pos = self.take()
            if kind != "name":
                raise SldpSyntaxError("dictionary keys must be identifiers", pos)
            self.expect(":")
            if key in out:
                raise SldpSemanticError(f"duplicate dictionary key {key!r}")
            out[key] = self.expression()
            kind, value, pos = self.take()
            if value == "}":
                return out
            if value != ",":
                raise SldpSyntaxError("expected ',' or '}'", pos)


def parse_sldp(text: str) -> SldpValue:
    parser = _Parser(text)
    value = parser.expression()
    kind, tok, pos = parser.peek()
    if kind != "eof":
        raise SldpSyntaxError(f"unexpected trailing {tok!r}", pos)
    return value


def kind(value: SldpValue) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans are not SLDP values")
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, Point):
        return "point"
    if isinstance(value, SldpSet):
        return "set"
    if isinstance(value, list):
        return "list"
    if isinstance(value, dict):
        return "dict"
    raise TypeError(f"not an SLDP value: {value!r}")


def _within(diff: float, tol: float, scale: float) -> bool:
    return diff <= tol + _SLACK * max(1.0, scale)


def sldp_equal(a: SldpValue, b: SldpValue, tol: Tolerance = Tolerance()) -> bool:
    ka, kb = kind(a), kind(b)
    if ka != kb:
        return False
    if ka == "number":
        return _within(abs(a - b), tol.epsilon, max(abs(a), abs(b)))
    if ka == "string":
        return a == b
    if ka == "point":
        pa, pb = (a.x, a.y, a.z), (b.x, b.y, b.z)
        linf = max(abs(x - y) for x, y in zip(pa, pb))
        return _within(linf, tol.delta, max(abs(c) for c in pa + pb))
    if ka == "list":
        return len(a) == len(b) and all(sldp_equal(x, y, tol) for x, y in zip(a, b))
    if ka == "set":
        return _included(a.items, b.items, tol) and _included(b.items, a.items, tol)
    return set(a) == set(b) and all(sldp_equal(a[k], b[k], tol) for k in a)


def _included(xs, ys, tol) -> bool:
    return all(any(sldp_equal(x, y, tol) for y in ys) for x in xs)


def _render_number(v: float) -> str:
    f = float(v)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def render_sldp(value: SldpValue) -> str:
    k = kind(value)
    if k == "number":
        return _render_number(value)
    if k == "string":
        return value
    if k == "point":
        return f"POINT({_render_number(value.x)} {_render_number(value.y)} {_render_number(value.z)})"
    if k == "list":
        return "[" + ", ".join(render_sldp(v) for v in value) + "]"
    if k == "set":
        return "<" + ", ".join(sorted(render_sldp(v) for v in value.items)) + ">"
    return "{" + ", ".join(f"{key}: {render_sldp(value[key])}" for key in sorted(value)) + "}"
