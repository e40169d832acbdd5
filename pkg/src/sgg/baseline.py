"""Whole-graph text serialization for the context-window pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

from .scene_graph import CONNECTED_LAYER, PropertyGraph, format_number

_SIBLING_EDGE = {layer: t for t, layer in CONNECTED_LAYER.items()}

OBJECT_FIELDS = ("id", "type", "pos", "parent_places")
PLACE_FIELDS = ("id", "siblings", "parent_rooms")
ROOM_FIELDS = ("id", "type", "pos", "siblings")


@dataclass(frozen=True)
class SerializationConfig:
    sections: tuple = ("objects", "places", "rooms")
    object_fields: tuple = OBJECT_FIELDS
    place_fields: tuple = PLACE_FIELDS
    room_fields: tuple = ROOM_FIELDS
    # the reference listing prints a room without neighbours as "siblings=none"
    empty_room_siblings: str = "none"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, allowed in (("object_fields", OBJECT_FIELDS + ("siblings",)),
                              ("place_fields", PLACE_FIELDS + ("type", "pos")),
                              ("room_fields", ROOM_FIELDS)):
            bad = set(getattr(self, name)) - set(allowed)
            if bad:
                raise ValueError(f"{name}: unknown field(s) {sorted(bad)}")
        bad = set(self.sections) - {"objects", "places", "rooms"}
        if bad:
            raise ValueError(f"unknown section(s) {sorted(bad)}")


def _pos(node) -> str:
    return "(" + ",".join(format_number(c) for c in node.center) + ")"


def _symset(symbols: list[str]) -> str:
    return "{" + ",".join(f"'{s}'" for s in symbols) + "}"


def _parents(graph: PropertyGraph, symbol: str, layers: tuple) -> list[str]:
    return [s for s in graph.edges_from(symbol, "CONTAINS", "in") if graph.nodes[s].layer in layers]


def _siblings(graph: PropertyGraph, node) -> list[str]:
    edge = _SIBLING_EDGE.get(node.layer)
    return graph.edges_from(node.symbol, edge) if edge else []


def _line(graph: PropertyGraph, node, fields: tuple, config: SerializationConfig) -> str:
    parts = []
    for f in fields:
        if f == "id":
            parts.append(f"id={node.symbol}")
        elif f == "type":
            parts.append(f"type={node.class_ if node.class_ is not None else 'none'}")
        elif f == "pos":
            parts.append(f"pos={_pos(node)}")
        elif f == "parent_places":
            parts.append(f"parent_places={_symset(_parents(graph, node.symbol, ('Place', 'MeshPlace')))}")
        elif f == "parent_rooms":
            parts.append(f"parent_rooms={_symset(_parents(graph, node.symbol, ('Room',)))}")
        elif f == "siblings":
            sib = _siblings(graph, node)
            if not sib and node.layer == "Room":
                parts.append(f"siblings={config.empty_room_siblings}")
            else:
                parts.append(f"siblings={_symset(sib)}")
    return "- (" + ", ".join(parts) + ")"


def serialize_graph(graph: PropertyGraph, config: SerializationConfig = SerializationConfig()) -> str:
    """Objects, then mesh places and places, then rooms; one line per node."""
    lines = []
    if "objects" in config.sections:
        lines.append("Objects:")
        lines += [_line(graph, graph.nodes[s], config.object_fields, config)
                  for s in graph.symbols("Object")]
    if "places" in config.sections:
        lines.append("Places:")
        for layer in ("MeshPlace", "Place"):
            lines += [_line(graph, graph.nodes[s], config.place_fields, config)
                      for s in graph.symbols(layer)]
    if "rooms" in config.sections:
        lines.append("Rooms:")
        lines += [_line(graph, graph.nodes[s], config.room_fields, config)
                  for s in graph.symbols("Room")]
    return "\n".join(lines)
