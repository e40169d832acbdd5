"""Grounded PDDL goal clauses: parsing, DNF canonicalization, equivalence."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Union

DEFAULT_MAX_TERMS = 100_000
TRUTH_TABLE_MAX_ATOMS = 16


class GoalError(ValueError):
    pass


class GoalParseError(GoalError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class GoalSchemaError(GoalError):
    pass


class DnfBlowupError(GoalError):
    pass


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    arity: int
    layers: tuple  # one tuple of allowed layer names per argument

    def __post_init__(self):
        if self.arity not in (1, 2) or len(self.layers) != self.arity:
            raise ValueError(f"bad schema for {self.name}")


_PLACE = ("Place", "MeshPlace")
DEFAULT_SCHEMAS = {
    s.name: s
    for s in (
        PredicateSchema("visited-place", 1, (_PLACE,)),
        PredicateSchema("at-place", 1, (_PLACE,)),
        PredicateSchema("visited-object", 1, (("Object",),)),
        PredicateSchema("at-object", 1, (("Object",),)),
        PredicateSchema("safe", 1, (("Object",),)),
        PredicateSchema("holding", 1, (("Object",),)),
        PredicateSchema("visited-room", 1, (("Room",),)),
        PredicateSchema("in-room", 1, (("Room",),)),
        PredicateSchema("object-in-place", 2, (("Object",), _PLACE)),
    )
}


def load_schemas(path) -> dict[str, PredicateSchema]:
    """Read schemas from JSON: [{"name": ..., "layers": [["Object"], ...]}, ...]."""
    raw = json.loads(Path(path).read_text())
    out = {}
    for entry in raw:
        name = entry["name"].lower()
        if name in out:
            raise GoalSchemaError(f"duplicate predicate {name}")
        layers = tuple(tuple(a) for a in entry["layers"])
        out[name] = PredicateSchema(name, len(layers), layers)
    return out


# -- expression tree ---------------------------------------------------------

@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple

    def __str__(self) -> str:
        return f"({self.predicate} {' '.join(self.args)})"


@dataclass(frozen=True)
class Not:
    child: "GoalExpr"


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


GoalExpr = Union[Atom, Not, And, Or]


def format_goal(expr: GoalExpr) -> str:
    if isinstance(expr, Atom):
        return str(expr)
    if isinstance(expr, Not):
        return f"(not {format_goal(expr.child)})"
    op = "and" if isinstance(expr, And) else "or"
    return f"({op} " + " ".join(format_goal(c) for c in expr.children) + ")"


def atoms_of(expr: GoalExpr) -> set[Atom]:
    if isinstance(expr, Atom):
        return {expr}
    if isinstance(expr, Not):
        return atoms_of(expr.child)
    out: set[Atom] = set()
    for c in expr.children:
        out |= atoms_of(c)
    return out


def evaluate(expr: GoalExpr, truth: dict) -> bool:
    if isinstance(expr, Atom):
        return bool(truth[expr])
    if isinstance(expr, Not):
        return not evaluate(expr.child, truth)
    if isinstance(expr, And):
        return all(evaluate(c, truth) for c in expr.children)
    return any(evaluate(c, truth) for c in expr.children)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text: str):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if rest:
                raise GoalParseError(f"unexpected {rest[0]!r}", pos)
            return out
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()


def parse_goal(text: str, schemas: dict | None = DEFAULT_SCHEMAS) -> GoalExpr:
    """Parse an s-expression goal; schemas=None skips atom validation."""
    toks = _tokens(text)
    if not toks:
        raise GoalParseError("empty goal", 0)

    def read(i: int):
        tok, pos = toks[i]
        if tok == ")":
            raise GoalParseError("unexpected ')'", pos)
        if tok != "(":
            raise GoalParseError(f"expected '(' before {tok!r}", pos)
        i += 1
        if i >= len(toks):
            raise GoalParseError("unbalanced parentheses", len(text))
        head, hpos = toks[i]
        if head in "()":
            raise GoalParseError("expected a predicate or connective", hpos)
        op = head.lower()
        i += 1
        if op in ("and", "or", "not"):
            children = []
            while True:
                if i >= len(toks):
                    raise GoalParseError("unbalanced parentheses", len(text))
                if toks[i][0] == ")":
                    break
                child, i = read(i)
                children.append(child)
            if not children:
                raise GoalParseError(f"({op}) needs at least one operand", hpos)
            if op == "not":
                if len(children) != 1:
                    raise GoalParseError("(not) takes exactly one operand", hpos)
                return Not(children[0]), i + 1
            if len(children) == 1:
                return children[0], i + 1
            cls = And if op == "and" else Or
            flat = []
            for c in children:
                flat.extend(c.children if isinstance(c, cls) else (c,))
            return cls(tuple(flat)), i + 1
        args = []
        while True:
            if i >= len(toks):
                raise GoalParseError("unbalanced parentheses", len(text))
            tok, pos = toks[i]
            if tok == ")":
                break
            if tok == "(":
                raise GoalParseError("nested expression inside an atom", pos)
            args.append(tok)
            i += 1
        atom = Atom(op, tuple(args))
        if schemas is not None:
            _check_atom(atom, schemas)
        return atom, i + 1

    expr, i = read(0)
    if i != len(toks):
        raise GoalParseError(f"unexpected trailing {toks[i][0]!r}", toks[i][1])
    return expr


def _check_atom(atom: Atom, schemas: dict) -> None:
    schema = schemas.get(atom.predicate)
    if schema is None:
        raise GoalSchemaError(f"unknown predicate in {atom}")
    if len(atom.args) != schema.arity:
        raise GoalSchemaError(
            f"{atom}: {atom.predicate} takes {schema.arity} argument(s), got {len(atom.args)}")


# -- DNF ----------------------------------------------------------------------

Literal = tuple  # (Atom, bool)


@dataclass(frozen=True)
class Dnf:
    """Blake canonical form: the disjunction of all prime implicants."""

    terms: frozenset  # frozenset of frozenset of (Atom, sign)

    def evaluate(self, truth: dict) -> bool:
        return any(all(bool(truth[a]) == s for a, s in t) for t in self.terms)

    def sorted_terms(self) -> list[list[Literal]]:
        return sorted(sorted(t) for t in self.terms)

    def to_text(self) -> str:
        if not self.terms:
            return "(or)"

        def lit(a, s):
            return str(a) if s else f"(not {a})"

        parts = []
        for term in self.sorted_terms():
            if not term:
                parts.append("(and)")
            elif len(term) == 1:
                parts.append(lit(*term[0]))
            else:
                parts.append("(and " + " ".join(lit(a, s) for a, s in term) + ")")
        return parts[0] if len(parts) == 1 else "(or " + " ".join(parts) + ")"


def _absorb(terms: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Drop every term that is a superset of another (fewest literals first)."""
    ordered = sorted(set(terms), key=lambda t: bin(t[0]).count("1") + bin(t[1]).count("1"))
    kept: list[tuple[int, int]] = []
    for p, n in ordered:
        if not any(kp & p == kp and kn & n == kn for kp, kn in kept):
            kept.append((p, n))
    return kept


def _nnf_terms(expr: GoalExpr, positive: bool, index: dict, max_terms: int):
    if isinstance(expr, Atom):
        bit = 1 << index[expr]
        return [(bit, 0)] if positive else [(0, bit)]
    if isinstance(expr, Not):
        return _nnf_terms(expr.child, not positive, index, max_terms)
    conj = isinstance(expr, And) == positive
    parts = [_nnf_terms(c, positive, index, max_terms) for c in expr.children]
    if not conj:
        out = _absorb(t for part in parts for t in part)
        if len(out) > max_terms:
            raise DnfBlowupError(f"DNF exceeds {max_terms} terms")
        return out
    acc = [(0, 0)]
    for part in parts:
        if len(acc) * len(part) > max_terms * 10:
            raise DnfBlowupError(f"DNF exceeds {max_terms} terms")
        prod = []
        for ap, an in acc:
            for bp, bn in part:
                p, n = ap | bp, an | bn
                if not p & n:
                    prod.append((p, n))
        acc = _absorb(prod)
        if len(acc) > max_terms:
            raise DnfBlowupError(f"DNF exceeds {max_terms} terms")
        if not acc:
            break
    return acc


def _complete(terms: list[tuple[int, int]], max_terms: int) -> list[tuple[int, int]]:
    """Iterated consensus with absorption until every prime implicant is present."""
    terms = _absorb(terms)
    current = set(terms)
    pending = list(combinations(terms, 2))
    while pending:
        (p1, n1), (p2, n2) = pending.pop()
        if (p1, n1) not in current or (p2, n2) not in current:
            continue
        opp = (p1 & n2) | (n1 & p2)
        if opp == 0 or opp & (opp - 1):
            continue
        cand = ((p1 | p2) & ~opp, (n1 | n2) & ~opp)
        cp, cn = cand
        if any(tp & cp == tp and tn & cn == tn for tp, tn in current):
            continue
        current = {t for t in current if not (cp & t[0] == cp and cn & t[1] == cn)}
        pending.extend((cand, t) for t in current)
        current.add(cand)
        if len(current) > max_terms:
            raise DnfBlowupError(f"DNF exceeds {max_terms} terms")
    return list(current)


def to_dnf(expr: GoalExpr, max_terms: int = DEFAULT_MAX_TERMS) -> Dnf:
    atoms = sorted(atoms_of(expr))
    index = {a: i for i, a in enumerate(atoms)}
    raw = _nnf_terms(expr, True, index, max_terms)
    terms = _complete(raw, max_terms)

    def decode(p: int, n: int) -> frozenset:
        lits = set()
        for i, a in enumerate(atoms):
            if p >> i & 1:
                lits.add((a, True))
            elif n >> i & 1:
                lits.add((a, False))
        return frozenset(lits)

    return Dnf(frozenset(decode(p, n) for p, n in terms))


# -- equivalence -------------------------------------------------------------

def truth_table(expr: GoalExpr, atoms: list[Atom]) -> int:
    """Bitmask over all 2^n assignments; bit k set iff the goal holds for assignment k.

    Atom i is true in assignment k iff bit i of k is set.
    """
    n = len(atoms)
    size = 1 << n
    full = (1 << size) - 1
    masks = {}
    for i, a in enumerate(atoms):
        block = ((1 << (1 << i)) - 1) << (1 << i)  # 2^i zeros then 2^i ones
        period = 1 << (i + 1)
        m, width = block, period
        while width < size:
            m |= m << width
            width <<= 1
        masks[a] = m

    def ev(e) -> int:
        if isinstance(e, Atom):
            return masks[e]
        if isinstance(e, Not):
            return full ^ ev(e.child)
        vals = [ev(c) for c in e.children]
        out = vals[0]
        for v in vals[1:]:
            out = out & v if isinstance(e, And) else out | v
        return out

    return ev(expr)


def goals_equivalent(a: GoalExpr, b: GoalExpr, method: str = "auto",
                     max_terms: int = DEFAULT_MAX_TERMS) -> bool:
    """Logical equivalence; truth table up to 16 atoms, canonical DNF beyond."""
    if method not in ("auto", "truth-table", "dnf"):
        raise ValueError(f"unknown method {method!r}")
    atoms = sorted(atoms_of(a) | atoms_of(b))
    if method == "truth-table" or (method == "auto" and len(atoms) <= TRUTH_TABLE_MAX_ATOMS):
        return truth_table(a, atoms) == truth_table(b, atoms)
    return to_dnf(a, max_terms) == to_dnf(b, max_terms)


# -- grounding ----------------------------------------------------------------

def check_grounding(expr: GoalExpr, graph, schemas: dict = DEFAULT_SCHEMAS) -> list[str]:
    issues = []
    for atom in sorted(atoms_of(expr)):
        schema = schemas.get(atom.predicate)
        if schema is None:
            issues.append(f"unknown predicate {atom.predicate}")
            continue
        for sym, allowed in zip(atom.args, schema.layers):
            node = graph.node(sym)
            if node is None:
                issues.append(f"{sym} not in graph")
            elif node.layer not in allowed:
                issues.append(f"{sym} is a {node.layer}, expected {' or '.join(allowed)}")
    return issues
