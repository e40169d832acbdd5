"""The reconstructed graphs are reproducible and support their gold answers."""

import json

import pytest
from fixtures.build_graphs import build_large, build_small

from sgg.cypher import execute, parse_query
from sgg.sldp import parse_sldp, sldp_equal


def rows(graph, text):
    return execute(graph, parse_query(text)).rows


@pytest.mark.parametrize("name, build", [("small", build_small), ("large", build_large)])
def test_graphs_regenerate_identically(fixtures_dir, name, build):
    committed = (fixtures_dir / f"{name}_graph.json").read_text()
    assert json.dumps(build(), indent=1) + "\n" == committed


def test_large_graph_answers(graphs):
    g = graphs["large"]
    far = rows(g, "MATCH (a:Room), (b:Room) WHERE a.nodeSymbol < b.nodeSymbol RETURN a.nodeSymbol, "
                  "b.nodeSymbol ORDER BY point.distance(a.center, b.center) DESC LIMIT 1")
    assert far == [("R30", "R83")]
    (mean,), = rows(g, "MATCH (a:Object), (b:Object) WHERE a.class <> b.class "
                       "WITH a, min(point.distance(a.center, b.center)) AS d RETURN avg(d)")
    assert sldp_equal(mean, parse_sldp("60.00"))
    poles = rows(g, "MATCH (p:Object {class: 'pole'}), (f:Object {class: 'fence'}) "
                    "WHERE point.distance(p.center, f.center) <= 5 RETURN DISTINCT p.nodeSymbol")
    assert {r[0] for r in poles} == {"O95", "O99", "O102", "O381"}


def test_small_graph_answers(graphs):
    g = graphs["small"]
    hop = rows(g, "MATCH (b:Object {class: 'bag'})<-[:CONTAINS]-(m:MeshPlace)-[:MESH_PLACE_CONNECTED*1..6]-"
                  "(n:MeshPlace)-[:CONTAINS]->(o:Object) RETURN count(DISTINCT o)")
    same = rows(g, "MATCH (b:Object {class: 'bag'})<-[:CONTAINS]-(m:MeshPlace)-[:CONTAINS]->(o:Object) "
                   "WHERE o <> b RETURN count(o)")
    assert hop[0][0] + same[0][0] == 28
    busiest = rows(g, "MATCH (r:Room)-[:ROOM_CONNECTED]-(n:Room) RETURN r.nodeSymbol, count(n) AS k "
                      "ORDER BY k DESC LIMIT 2")
    assert busiest[0] == ("R2", 4) and busiest[1][1] < 4
    roomless = rows(g, "MATCH (m:MeshPlace) RETURN m.nodeSymbol")
    in_rooms = rows(g, "MATCH (:Room)-[:CONTAINS]->(m:MeshPlace) RETURN m.nodeSymbol")
    assert {r[0] for r in roomless} - {r[0] for r in in_rooms} == {"P2441", "P3107", "P15561", "P25023", "P25697"}
