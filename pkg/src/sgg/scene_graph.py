"""In-memory property graph holding a layered 3D scene graph."""

from __future__ import annotations

import functools
import json
import math
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator

LAYERS = ("Object", "MeshPlace", "Place", "Room")
PREFIX_TO_LAYER = {"O": "Object", "P": "MeshPlace", "p": "Place", "R": "Room"}
LAYER_TO_PREFIX = {v: k for k, v in PREFIX_TO_LAYER.items()}
# bottom-up hierarchy order, used for every deterministic enumeration
LAYER_RANK = {"Object": 0, "MeshPlace": 1, "Place": 2, "Room": 3}

EDGE_TYPES = (
    "CONTAINS",
    "OBJECT_CONNECTED",
    "PLACE_CONNECTED",
    "MESH_PLACE_CONNECTED",
    "ROOM_CONNECTED",
)
CONNECTED_LAYER = {
    "OBJECT_CONNECTED": "Object",
    "PLACE_CONNECTED": "Place",
    "MESH_PLACE_CONNECTED": "MeshPlace",
    "ROOM_CONNECTED": "Room",
}
# parent layer -> child layers permitted for CONTAINS
CONTAINMENT = {
    "Room": ("MeshPlace", "Place"),
    "MeshPlace": ("Object",),
    "Place": ("Object",),
}

_JSON_LAYER_KEYS = {
    "objects": "Object",
    "mesh_places": "MeshPlace",
    "places": "Place",
    "rooms": "Room",
}
_JSON_EDGE_KEYS = {t.lower(): t for t in EDGE_TYPES}

DEFAULT_LABELSPACE = {
    "objects": (
        "tree vehicle signal rock fence boat sign door pole rail window flower bed box "
        "storage barrel bag basket seating flag decor light appliance trash bicycle "
        "food clothes"
    ).split(),
    "rooms": (
        "road field shelter indoor stairs sidewalk path boundary shore ground dock "
        "parking footing"
    ).split(),
    "mesh_places": (
        "water ground grass sand sidewalk dock path hill bridge wall floor stairs "
        "structure surface flora"
    ).split(),
}
_LABELSPACE_LAYER = {"Object": "objects", "Room": "rooms", "MeshPlace": "mesh_places"}

_SYMBOL_RE = re.compile(r"^([OPpR])(0|[1-9][0-9]*)$")


class SceneGraphError(Exception):
    """Base class for scene-graph loading errors."""


class GraphParseError(SceneGraphError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class SymbolConflictError(SceneGraphError):
    def __init__(self, symbol: str):
        super().__init__(f"duplicate node symbol {symbol}")
        self.symbol = symbol


class SchemaError(SceneGraphError):
    pass


class LookupFailure(SceneGraphError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown symbol"


class Num(float):
    """A float that remembers the literal text it was parsed from."""

    text: str

    def __new__(cls, value, text: str | None = None):
        obj = super().__new__(cls, value)
        obj.text = text if text is not None else repr(float(value))
        return obj

    @classmethod
    def parse(cls, text: str) -> "Num":
        return cls(float(text), text)


def format_number(value: float) -> str:
    """Printed form of a coordinate: the source literal when known."""
    text = getattr(value, "text", None)
    if text is not None:
        return text
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


@dataclass(frozen=True, order=True)
class NodeSymbol:
    prefix: str
    index: int

    @classmethod
    def parse(cls, text: str) -> "NodeSymbol":
        m = _SYMBOL_RE.match(text)
        if not m:
            raise ValueError(f"invalid node symbol {text!r}")
        return cls(m.group(1), int(m.group(2)))

    @property
    def layer(self) -> str:
        return PREFIX_TO_LAYER[self.prefix]

    def __str__(self) -> str:
        return f"{self.prefix}{self.index}"


@functools.lru_cache(maxsize=None)
def symbol_key(symbol: str) -> tuple[int, int, str]:
    """Sort key: layer (bottom-up), then numeric index."""
    m = _SYMBOL_RE.match(symbol)
    if not m:
        return (len(LAYERS), 0, symbol)
    return (LAYER_RANK[PREFIX_TO_LAYER[m.group(1)]], int(m.group(2)), symbol)


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    z: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))

    def distance(self, other: "Point") -> float:
        return math.sqrt(
            (self.x - other.x) ** 2 + (self.y - other.y) ** 2 + (self.z - other.z) ** 2
        )


@dataclass(frozen=True)
class BBox:
    min: Point
    max: Point


@dataclass
class GraphNode:
    symbol: str
    layer: str
    center: Point
    class_: str | None = None
    bbox: BBox | None = None

    def properties(self) -> dict:
        props = {"nodeSymbol": self.symbol}
        if self.class_ is not None:
            props["class"] = self.class_
        props["center"] = self.center
        return props


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    type: str


@dataclass(frozen=True)
class Violation:
    rule: str
    symbols: tuple[str, ...]
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


class PropertyGraph:
    """Typed nodes and typed directed edges, indexed for pattern matching.

    Connectivity edges are stored once but are symmetric for every lookup.
    """

    def __init__(self, labelspace: dict[str, list[str]] | None = None):
        self.labelspace = {
            k: list(v) for k, v in (labelspace or DEFAULT_LABELSPACE).items()
        }
        self.nodes: dict[str, GraphNode] = {}
        self.edges: list[GraphEdge] = []
        self._edge_set: set[tuple[str, str, str]] = set()
        # (symbol, type) -> {"out": [...], "in": [...]}
        self._adj: dict[tuple[str, str], dict[str, list[str]]] = {}
        self._by_layer: dict[str, list[str]] = {layer: [] for layer in LAYERS}
        self._sorted = True
        self._incident_cache: dict = {}
        self.write_lock = threading.RLock()

    def __len__(self) -> int:
        return len(self.nodes)

    def add_node(self, node: GraphNode) -> None:
        if node.symbol in self.nodes:
            raise SymbolConflictError(node.symbol)
        if not all(math.isfinite(c) for c in node.center):
            raise SchemaError(f"{node.symbol}: center must have finite coordinates")
        self.nodes[node.symbol] = node
        self._by_layer[node.layer].append(node.symbol)
        self._sorted = False

    def add_edge(self, source: str, target: str, type_: str) -> None:
        if type_ not in EDGE_TYPES:
            raise SchemaError(f"unknown edge type {type_!r}")
        for s in (source, target):
            if s not in self.nodes:
                raise SchemaError(f"edge {source}->{target} ({type_}): dangling endpoint {s}")
        if source == target:
            raise SchemaError(f"self-loop on {source} ({type_})")
        key = (source, target, type_)
        if key in self._edge_set:
            return
        if type_ in CONNECTED_LAYER and (target, source, type_) in self._edge_set:
            return
        self._edge_set.add(key)
        self.edges.append(GraphEdge(source, target, type_))
        self._adj.setdefault((source, type_), {"out": [], "in": []})["out"].append(target)
        self._adj.setdefault((target, type_), {"out": [], "in": []})["in"].append(source)
        self._sorted = False

    def _ensure_sorted(self) -> None:
        if self._sorted:
            return
        for symbols in self._by_layer.values():
            symbols.sort(key=symbol_key)
        for entry in self._adj.values():
            entry["out"].sort(key=symbol_key)
            entry["in"].sort(key=symbol_key)
        self.edges.sort(key=lambda e: (symbol_key(e.source), symbol_key(e.target), e.type))
        self._incident_cache.clear()
        self._sorted = True

    def node(self, symbol: str) -> GraphNode | None:
        return self.nodes.get(symbol)

    def symbols(self, layer: str | None = None) -> list[str]:
        self._ensure_sorted()
        if layer is not None:
            return list(self._by_layer[layer])
        out: list[str] = []
        for name in LAYERS:
            out.extend(self._by_layer[name])
        return out

    def edges_from(self, symbol: str, type_: str, direction: str = "out") -> list[str]:
        if symbol not in self.nodes:
            raise LookupFailure(f"unknown node symbol {symbol}")
        if direction not in ("out", "in", "either"):
            raise ValueError(f"direction must be out, in or either, not {direction!r}")
        self._ensure_sorted()
        entry = self._adj.get((symbol, type_))
        if entry is None:
            return []
        if type_ in CONNECTED_LAYER or direction == "either":
            merged = set(entry["out"]) | set(entry["in"])
            return sorted(merged, key=symbol_key)
        return list(entry[direction])

    def incident(self, symbol: str, types, direction: str) -> list[tuple[str, tuple[str, str, str]]]:
        """(neighbour, edge key) pairs; edge keys identify stored relationships.

        The returned list is cached and must not be modified.
        """
        self._ensure_sorted()
        cache_key = (symbol, tuple(types), direction)
        cached = self._incident_cache.get(cache_key)
        if cached is not None:
            return cached
        out = []
        for t in types:
            entry = self._adj.get((symbol, t))
            if entry is None:
                continue
            undirected = direction == "both" or t in CONNECTED_LAYER
            if direction == "out" or undirected:
                out.extend((n, (symbol, n, t)) for n in entry["out"])
            if direction == "in" or undirected:
                out.extend((n, (n, symbol, t)) for n in entry["in"])
        if len(types) > 1 or direction == "both" or any(t in CONNECTED_LAYER for t in types):
            out.sort(key=lambda item: (symbol_key(item[0]), item[1][2], item[1]))
        self._incident_cache[cache_key] = out
        return out

    def iter_edges(self, type_: str | None = None) -> Iterable[GraphEdge]:
        self._ensure_sorted()
        return [e for e in self.edges if type_ is None or e.type == type_]

    def has_edge(self, source: str, target: str, type_: str) -> bool:
        if (source, target, type_) in self._edge_set:
            return True
        return type_ in CONNECTED_LAYER and (target, source, type_) in self._edge_set

    def set_property(self, symbol: str, name: str, value) -> None:
        node = self.nodes[symbol]
        if name == "class":
            node.class_ = value
        elif name == "center":
            node.center = value
        else:
            raise KeyError(name)

    def allowed_classes(self, layer: str) -> list[str] | None:
        key = _LABELSPACE_LAYER.get(layer)
        if key is None:
            return None
        return self.labelspace.get(key)


def _point(raw, where: str) -> Point:
    if not isinstance(raw, list) or len(raw) != 3:
        raise SchemaError(f"{where}: expected [x, y, z]")
    coords = []
    for c in raw:
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise SchemaError(f"{where}: coordinates must be numbers")
        coords.append(c if isinstance(c, Num) else Num(c, str(c)))
    return Point(*coords)


def load_graph(document: str | bytes) -> PropertyGraph:
    """Build a PropertyGraph from the JSON interchange document."""
    try:
        data = json.loads(
            document,
            parse_float=Num.parse,
            parse_int=lambda s: Num(int(s), s),
        )
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.pos) from None
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object")

    graph = PropertyGraph(data.get("labelspace"))
    nodes = data.get("nodes", data.get("layers", {})) or {}
    if not isinstance(nodes, dict):
        raise SchemaError("'nodes' must be an object")
    for key, records in nodes.items():
        layer = _JSON_LAYER_KEYS.get(key)
        if layer is None:
            raise SchemaError(f"unknown node layer {key!r}")
        for rec in records:
            sym = rec.get("id")
            try:
                parsed = NodeSymbol.parse(sym)
            except (ValueError, TypeError):
                raise SchemaError(f"invalid node id {sym!r}") from None
            if parsed.layer != layer:
                raise SchemaError(f"{sym} listed under {key} but its prefix means {parsed.layer}")
            bbox = None
            if rec.get("bbox") is not None:
                b = rec["bbox"]
                bbox = BBox(_point(b.get("min"), f"{sym}.bbox.min"), _point(b.get("max"), f"{sym}.bbox.max"))
            cls = rec.get("class")
            if layer == "Place" and cls is not None:
                raise SchemaError(f"{sym}: Place nodes carry no class")
            graph.add_node(
                GraphNode(sym, layer, _point(rec.get("center"), f"{sym}.center"), cls, bbox)
            )

    edges = data.get("edges", {}) or {}
    for key, pairs in edges.items():
        type_ = _JSON_EDGE_KEYS.get(key)
        if type_ is None:
            raise SchemaError(f"unknown edge type {key!r}")
        for pair in pairs:
            if not isinstance(pair, list) or len(pair) != 2:
                raise SchemaError(f"{key}: edges must be [source, target] pairs")
            graph.add_edge(pair[0], pair[1], type_)
    graph._ensure_sorted()
    return graph


def load_graph_file(path) -> PropertyGraph:
    with open(path, "rb") as fh:
        return load_graph(fh.read())


def dump_graph(graph: PropertyGraph) -> str:
    """Inverse of load_graph (coordinates keep their literal text)."""

    def coords(p: Point) -> list:
        return [json.loads(format_number(c)) if getattr(c, "text", None) else float(c) for c in p]

    nodes: dict[str, list] = {k: [] for k in _JSON_LAYER_KEYS}
    rev = {v: k for k, v in _JSON_LAYER_KEYS.items()}
    for sym in graph.symbols():
        n = graph.nodes[sym]
        rec: dict = {"id": sym}
        if n.class_ is not None:
            rec["class"] = n.class_
        rec["center"] = coords(n.center)
        if n.bbox is not None:
            rec["bbox"] = {"min": coords(n.bbox.min), "max": coords(n.bbox.max)}
        nodes[rev[n.layer]].append(rec)
    edges = {t.lower(): [[e.source, e.target] for e in graph.iter_edges(t)] for t in EDGE_TYPES}
    return json.dumps({"labelspace": graph.labelspace, "nodes": nodes, "edges": edges}, indent=1)


def validate(graph: PropertyGraph) -> ValidationReport:
    report = ValidationReport()
    for edge in graph.iter_edges():
        src, dst = graph.nodes[edge.source], graph.nodes[edge.target]
        if edge.type == "CONTAINS":
            if dst.layer not in CONTAINMENT.get(src.layer, ()):
                report.violations.append(
                    Violation(
                        "containment-direction",
                        (edge.source, edge.target),
                        f"{src.layer} {edge.source} cannot CONTAIN {dst.layer} {edge.target}",
                    )
                )
        else:
            want = CONNECTED_LAYER[edge.type]
            if src.layer != want or dst.layer != want:
                report.violations.append(
                    Violation(
                        "connectivity-layer",
                        (edge.source, edge.target),
                        f"{edge.type} must join two {want} nodes",
                    )
                )
    for sym in graph.symbols("Object"):
        if not graph.edges_from(sym, "CONTAINS", "in"):
            report.violations.append(
                Violation("object-parent", (sym,), f"object {sym} has no parent place")
            )
    for sym in graph.symbols():
        node = graph.nodes[sym]
        allowed = graph.allowed_classes(node.layer)
        if allowed is None:
            continue
        if node.class_ is None:
            report.violations.append(
                Violation("labelspace", (sym,), f"{node.layer} {sym} has no class")
            )
        elif node.class_ not in allowed:
            report.violations.append(
                Violation(
                    "labelspace",
                    (sym,),
                    f"class {node.class_!r} of {sym} is not in the {node.layer} labelspace",
                )
            )
    return report
