"""Deterministic near-miss corruptions of gold answers."""

from __future__ import annotations

import re

from sgg.goals import And, Atom, Not, Or, atoms_of, format_goal, parse_goal
from sgg.sldp import Point, SldpSet, kind, parse_sldp, render_sldp

_SYMBOL = re.compile(r"^([OPpR])(\d+)$")
STEP = 0.02


def _swap_symbol(sym: str, avoid: set) -> str:
    prefix, index = _SYMBOL.match(sym).groups()
    n = int(index) + 1
    while f"{prefix}{n}" in avoid:
        n += 1
    return f"{prefix}{n}"


def _perturb(value, labels, avoid: set):
    k = kind(value)
    if k == "number":
        return value + STEP
    if k == "point":
        return Point(value.x + STEP, value.y, value.z)
    if k == "string":
        if _SYMBOL.match(value):
            return _swap_symbol(value, avoid)
        return next(label for label in labels if label != value and label not in avoid)
    if k == "list":
        return [_perturb(value[0], labels, avoid)] + value[1:]
    if k == "set":
        items = sorted(value.items, key=render_sldp)
        used = {render_sldp(i) for i in items}
        return SldpSet((_perturb(items[0], labels, used),) + tuple(items[1:]))
    key = sorted(value)[0]
    return {**value, key: _perturb(value[key], labels, set())}


def perturb_qa(gold: str, labels: list[str]) -> str:
    """Symbol swap for ids, +0.02 on one number or point coordinate, label swap for classes."""
    return render_sldp(_perturb(parse_sldp(gold), labels, set()))


def perturb_pddl(gold: str) -> str:
    """Drop the last disjunct of an or-goal; otherwise swap the first atom's first symbol."""
    expr = parse_goal(gold)
    if isinstance(expr, Or):
        rest = expr.children[:-1]
        return format_goal(rest[0] if len(rest) == 1 else Or(rest))
    used = {arg for a in atoms_of(expr) for arg in a.args}

    def first_atom(e):
        if isinstance(e, Atom):
            return e
        if isinstance(e, Not):
            return first_atom(e.child)
        return first_atom(e.children[0])

    target = first_atom(expr)
    swapped = Atom(target.predicate, (_swap_symbol(target.args[0], used),) + target.args[1:])

    def replace(e):
        if e == target:
            return swapped
        if isinstance(e, Not):
            return Not(replace(e.child))
        if isinstance(e, (And, Or)):
            return type(e)(tuple(replace(c) for c in e.children))
        return e

    return format_goal(replace(expr))


def perturb(case, labels: list[str]) -> str:
    return perturb_qa(case.gold, labels) if case.task == "qa" else perturb_pddl(case.gold)
