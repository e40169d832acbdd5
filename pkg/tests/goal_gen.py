"""Random goal trees and equivalence-preserving rewrites of them."""

from __future__ import annotations

import random

from sgg.goals import And, Atom, Not, Or

PREDICATES = ("safe", "visited-object", "holding", "at-object")


def atom_pool(n: int) -> list[Atom]:
    return [Atom(PREDICATES[i % len(PREDICATES)], (f"O{i}",)) for i in range(n)]


def random_goal(rng: random.Random, atoms: list[Atom], depth: int):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    op = rng.choice(("and", "or", "not"))
    if op == "not":
        return Not(random_goal(rng, atoms, depth - 1))
    children = tuple(random_goal(rng, atoms, depth - 1) for _ in range(rng.randint(2, 3)))
    return (And if op == "and" else Or)(children)


def depth_of(expr) -> int:
    if isinstance(expr, Atom):
        return 0
    if isinstance(expr, Not):
        return 1 + depth_of(expr.child)
    return 1 + max(depth_of(c) for c in expr.children)


def rewrite(rng: random.Random, expr):
    """A logically equivalent, usually different-looking, goal."""
    if isinstance(expr, Atom):
        return Not(Not(expr)) if rng.random() < 0.15 else expr
    if isinstance(expr, Not):
        child = expr.child
        if isinstance(child, Not):
            return rewrite(rng, child.child)
        if isinstance(child, (And, Or)) and rng.random() < 0.6:
            # De Morgan
            dual = Or if isinstance(child, And) else And
            return dual(tuple(rewrite(rng, Not(c)) for c in child.children))
        return Not(rewrite(rng, child))
    cls = type(expr)
    children = [rewrite(rng, c) for c in expr.children]
    rng.shuffle(children)
    other = Or if cls is And else And
    if len(children) == 2 and isinstance(children[1], other) and rng.random() < 0.4:
        # distribute: a & (b | c) == (a & b) | (a & c)
        a, inner = children
        return other(tuple(cls((a, c)) for c in inner.children))
    return cls(tuple(children))
