import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goal_gen import atom_pool, random_goal, rewrite
from sgg.goals import (And, Atom, DnfBlowupError, GoalParseError, GoalSchemaError, Not, Or,
                       atoms_of, check_grounding, evaluate, format_goal, goals_equivalent,
                       load_schemas, parse_goal, to_dnf, truth_table)


def g(text):
    return parse_goal(text)


def test_parse_flattens_and_normalizes_case():
    expr = g("(AND (safe O1) (and (visited-object O2) (safe O3)))")
    assert expr == And((Atom("safe", ("O1",)), Atom("visited-object", ("O2",)), Atom("safe", ("O3",))))
    assert g("(or (safe O1))") == Atom("safe", ("O1",))
    assert format_goal(g("(not (safe O1))")) == "(not (safe O1))"


@pytest.mark.parametrize("text, exc", [
    ("", GoalParseError),
    ("(and (safe O1)", GoalParseError),
    ("(and)", GoalParseError),
    ("(not (safe O1) (safe O2))", GoalParseError),
    ("(safe (O1))", GoalParseError),
    ("(safe O1) (safe O2)", GoalParseError),
    ("(fly O1)", GoalSchemaError),
    ("(safe O1 O2)", GoalSchemaError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        g(text)


def test_schema_check_can_be_disabled():
    assert parse_goal("(fly O1)", schemas=None) == Atom("fly", ("O1",))


def test_load_schemas(tmp_path):
    path = tmp_path / "schemas.json"
    path.write_text(json.dumps([{"name": "Carry", "layers": [["Object"], ["Room"]]}]))
    schemas = load_schemas(path)
    assert parse_goal("(carry O1 R2)", schemas) == Atom("carry", ("O1", "R2"))
    with pytest.raises(GoalSchemaError):
        parse_goal("(carry O1)", schemas)


@pytest.mark.parametrize("a, b, same", [
    ("(and (safe O1) (safe O2))", "(and (safe O2) (safe O1))", True),
    ("(or (safe O1) (and (safe O1) (safe O2)))", "(safe O1)", True),
    ("(not (and (safe O1) (safe O2)))", "(or (not (safe O1)) (not (safe O2)))", True),
    ("(or (and (safe O1) (safe O2)) (and (not (safe O1)) (safe O3)) (and (safe O2) (safe O3)))",
     "(or (and (safe O1) (safe O2)) (and (not (safe O1)) (safe O3)))", True),
    ("(or (safe O1) (safe O2))", "(safe O1)", False),
    ("(safe O1)", "(visited-object O1)", False),
])
def test_equivalence(a, b, same):
    for method in ("auto", "truth-table", "dnf"):
        assert goals_equivalent(g(a), g(b), method) is same


def test_dnf_is_canonical():
    a = to_dnf(g("(and (or (safe O1) (safe O2)) (or (safe O1) (safe O3)))"))
    b = to_dnf(g("(or (safe O1) (and (safe O2) (safe O3)))"))
    assert a == b
    assert a.to_text() == "(or (safe O1) (and (safe O2) (safe O3)))"
    assert to_dnf(g("(and (safe O1) (not (safe O1)))")).to_text() == "(or)"
    assert to_dnf(g("(or (safe O1) (not (safe O1)))")).to_text() == "(and)"


def test_dnf_blowup_guard():
    # (or x_i y_i) for 12 i has 4096 product terms
    text = "(and " + " ".join(f"(or (safe O{i}) (holding O{i}))" for i in range(12)) + ")"
    with pytest.raises(DnfBlowupError):
        to_dnf(g(text), max_terms=1000)


def test_truth_table_bit_layout():
    x, y = Atom("safe", ("O1",)), Atom("safe", ("O2",))
    # assignments k = 0..3 with x = bit 0, y = bit 1; and holds only at k = 3
    assert truth_table(And((x, y)), [x, y]) == 0b1000
    assert truth_table(Or((x, y)), [x, y]) == 0b1110
    assert truth_table(Not(x), [x, y]) == 0b0101


def test_grounding(graphs):
    small = graphs["small"]
    issues = check_grounding(g("(and (at-object O285) (safe O9999) (visited-object R1))"), small)
    assert issues == ["O9999 not in graph", "R1 is a Room, expected Object"]
    assert check_grounding(g("(visited-place P1833)"), small) == []


def test_random_goals_agree_with_their_dnf():
    rng = random.Random(3)
    for _ in range(150):
        atoms = atom_pool(rng.randint(1, 8))
        expr = random_goal(rng, atoms, 4)
        dnf = to_dnf(expr)
        used = sorted(atoms_of(expr))
        table = truth_table(expr, used)
        for k in range(1 << len(used)):
            truth = {a: bool(k >> i & 1) for i, a in enumerate(used)}
            assert dnf.evaluate(truth) == evaluate(expr, truth) == bool(table >> k & 1)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 8))
def test_rewrites_stay_equivalent(rng, n):
    expr = random_goal(rng, atom_pool(n), 4)
    other = rewrite(rng, expr)
    assert goals_equivalent(expr, other, "truth-table")
    assert goals_equivalent(expr, other, "dnf")


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 8))
def test_methods_agree(rng, n):
    atoms = atom_pool(n)
    a, b = random_goal(rng, atoms, 3), random_goal(rng, atoms, 3)
    assert goals_equivalent(a, b, "truth-table") == goals_equivalent(a, b, "dnf")


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(1, 6))
def test_format_parse_round_trip(rng, n):
    expr = random_goal(rng, atom_pool(n), 4)
    again = parse_goal(format_goal(expr))
    assert goals_equivalent(expr, again)
    assert format_goal(parse_goal(format_goal(again))) == format_goal(again)
