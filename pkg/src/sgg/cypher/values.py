"""Runtime values and their text rendering."""

from __future__ import annotations

import math

from ..scene_graph import GraphNode, Point
from .errors import QueryError


class NodeRef:
    """A node bound to a query variable; equal by symbol."""

    __slots__ = ("node",)

    def __init__(self, node: GraphNode):
        self.node = node

    @property
    def symbol(self) -> str:
        return self.node.symbol

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeRef) and other.node.symbol == self.node.symbol

    def __hash__(self) -> int:
        return hash(("node", self.node.symbol))

    def __repr__(self) -> str:
        return f"NodeRef({self.node.symbol})"


def kind_of(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, (int, float)):
        return "number"
    if isinstance(v, str):
        return "string"
    if isinstance(v, Point):
        return "point"
    if isinstance(v, list):
        return "list"
    if isinstance(v, NodeRef):
        return "node"
    return type(v).__name__


def hash_key(v):
    """Hashable identity used for grouping and DISTINCT."""
    if isinstance(v, list):
        return ("list", tuple(hash_key(i) for i in v))
    if isinstance(v, bool):
        return ("bool", v)
    if isinstance(v, (int, float)):
        f = float(v)
        return ("num", 0.0 if f == 0 else f)
    if isinstance(v, Point):
        return ("point", float(v.x), float(v.y), float(v.z))
    return (kind_of(v), v)


_ORDER_RANK = {"node": 0, "list": 1, "point": 2, "string": 3, "boolean": 4, "number": 5, "null": 6}


def sort_key(v):
    """Total order for ORDER BY/min/max: null sorts last ascending."""
    k = kind_of(v)
    rank = _ORDER_RANK.get(k, 7)
    if k == "number":
        f = float(v)
        return (rank, (1, 0.0) if math.isnan(f) else (0, f))
    if k == "string" or k == "boolean":
        return (rank, v)
    if k == "point":
        return (rank, (float(v.x), float(v.y), float(v.z)))
    if k == "list":
        return (rank, tuple(sort_key(i) for i in v))
    if k == "node":
        from ..scene_graph import symbol_key
        return (rank, symbol_key(v.symbol))
    return (rank, 0)


def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    text = f"{v:.3f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    if text == "-0.0":
        text = "0.0"
    return text


def render_value(v) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_float(float(v))
    if isinstance(v, str):
        return v
    if isinstance(v, Point):
        return "POINT(" + " ".join(format_float(float(c)) for c in v) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(render_value(i) for i in v) + "]"
    if isinstance(v, NodeRef):
        n = v.node
        props = ", ".join(f"{k}: {render_value(val)}" for k, val in n.properties().items())
        return f"(:{n.layer} {{{props}}})"
    raise QueryError("type-mismatch", f"cannot render value of type {type(v).__name__}")
