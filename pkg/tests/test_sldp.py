import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgg.sldp import (Point, SldpSemanticError, SldpSet, SldpSyntaxError, Tolerance, kind,
                      parse_sldp, render_sldp, sldp_equal)

EXACT = Tolerance(0.0, 0.0)


@pytest.mark.parametrize("text, expected", [
    ("3", 3.0),
    ("-2.5", -2.5),
    ("O12", "O12"),
    ("POINT(1 2.5 -3)", Point(1.0, 2.5, -3.0)),
    ("point( 1 2 3 )", Point(1.0, 2.0, 3.0)),
    ("[O1, O2]", ["O1", "O2"]),
    ("<O2, O1>", SldpSet(("O2", "O1"))),
    ("{a: 1, b: <>}", {"a": 1.0, "b": SldpSet(())}),
    ("{}", {}),
])
def test_parse(text, expected):
    assert parse_sldp(text) == expected


@pytest.mark.parametrize("text, position", [
    ("[O1 O2]", 4), ("<O1,", 4), ("POINT(1 2)", 9), ("{1: 2}", 1), ("O1 O2", 3), ("#", 0),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(SldpSyntaxError) as info:
        parse_sldp(text)
    assert info.value.position == position


def test_duplicate_keys():
    with pytest.raises(SldpSemanticError):
        parse_sldp("{a: 1, a: 2}")


@pytest.mark.parametrize("a, b, same", [
    ("1.000", "1.009", True), ("1.000", "1.010", True), ("1.000", "1.011", False),
    ("POINT(0 0 0)", "POINT(0.010 -0.010 0.005)", True),
    ("POINT(0 0 0)", "POINT(0 0.011 0)", False),
])
def test_tolerance_edges(a, b, same):
    assert sldp_equal(parse_sldp(a), parse_sldp(b)) is same


def test_tolerance_is_not_transitive():
    a, b, c = (parse_sldp(t) for t in ("1.000", "1.010", "1.020"))
    assert sldp_equal(a, b) and sldp_equal(b, c) and not sldp_equal(a, c)


def test_structures():
    assert sldp_equal(parse_sldp("<O1, O2, O2>"), parse_sldp("<O2, O1>"))
    assert not sldp_equal(parse_sldp("<O1, O2>"), parse_sldp("<O1>"))
    assert not sldp_equal(parse_sldp("[O1, O2]"), parse_sldp("[O2, O1]"))
    assert sldp_equal(parse_sldp("{x: 1.005, y: O1}"), parse_sldp("{y: O1, x: 1}"))
    assert not sldp_equal(parse_sldp("{x: 1}"), parse_sldp("{x: 1, y: 1}"))
    # kinds never cross
    assert not sldp_equal(parse_sldp("[O1]"), parse_sldp("<O1>"))
    assert not sldp_equal(parse_sldp("1"), parse_sldp("one"))


def test_tolerance_can_be_configured():
    assert sldp_equal(1.0, 1.05, Tolerance(epsilon=0.05))
    with pytest.raises(ValueError):
        Tolerance(epsilon=-1)


def test_canonical_render():
    assert render_sldp(parse_sldp("< O2 ,O10, O1 >")) == "<O1, O10, O2>"
    assert render_sldp(parse_sldp("{b: 2.0, a: POINT(1.5 0 -0)}")) == "{a: POINT(1.5 0 0), b: 2}"
    assert kind(parse_sldp("[]")) == "list"


# -- properties ----------------------------------------------------------------

names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,5}", fullmatch=True).filter(
    lambda s: s.lower() != "point")
numbers = st.floats(allow_nan=False, allow_infinity=False, width=64)
points = st.builds(Point, numbers, numbers, numbers)
scalars = numbers | names | points


def _values(children):
    return (st.lists(children, max_size=4)
            | st.lists(children, max_size=4).map(lambda xs: SldpSet(tuple(xs)))
            | st.dictionaries(names, children, max_size=3))


values = st.recursive(scalars, _values, max_leaves=12)


@given(values)
def test_render_parse_round_trip(v):
    text = render_sldp(v)
    again = parse_sldp(text)
    assert sldp_equal(v, again, EXACT)
    assert render_sldp(again) == text


@given(values)
def test_equality_is_reflexive(v):
    assert sldp_equal(v, v)


@given(values, values)
def test_equality_is_symmetric(a, b):
    assert sldp_equal(a, b) == sldp_equal(b, a)


small = st.integers(-50, 50).map(lambda i: i / 100)


@given(st.lists(small, max_size=6), st.lists(small, max_size=6))
def test_set_equality_is_mutual_inclusion(xs, ys):
    def covered(src, dst):
        return all(any(abs(x - y) <= 0.01 + 1e-9 for y in dst) for x in src)

    expected = covered(xs, ys) and covered(ys, xs)
    assert sldp_equal(SldpSet(tuple(xs)), SldpSet(tuple(ys))) == expected
