"""Query syntax tree and its canonical text form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class Literal:
    value: object


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Property:
    subject: "Expr"
    name: str


@dataclass(frozen=True)
class FunctionCall:
    name: str
    args: tuple["Expr", ...] = ()
    distinct: bool = False
    star: bool = False


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnaryOp:
    op: str  # NOT or -
    operand: "Expr"


@dataclass(frozen=True)
class IsNull:
    operand: "Expr"
    negated: bool = False


@dataclass(frozen=True)
class ListLiteral:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class MapLiteral:
    items: tuple[tuple[str, "Expr"], ...]


Expr = Union[Literal, Variable, Property, FunctionCall, BinaryOp, UnaryOp, IsNull,
             ListLiteral, MapLiteral]


@dataclass(frozen=True)
class NodePattern:
    var: Optional[str] = None
    label: Optional[str] = None
    props: tuple[tuple[str, Expr], ...] = ()


@dataclass(frozen=True)
class RelPattern:
    type: Optional[str] = None
    direction: str = "out"  # out, in, both
    var_length: bool = False
    min_hops: int = 1
    max_hops: Optional[int] = 1  # None = up to the depth cap


@dataclass(frozen=True)
class PathPattern:
    elements: tuple  # NodePattern, RelPattern, NodePattern, ...

    @property
    def nodes(self) -> tuple[NodePattern, ...]:
        return self.elements[0::2]

    @property
    def rels(self) -> tuple[RelPattern, ...]:
        return self.elements[1::2]


@dataclass(frozen=True)
class ProjectionItem:
    expr: Expr
    alias: Optional[str] = None


@dataclass(frozen=True)
class SortItem:
    expr: Expr
    descending: bool = False


@dataclass(frozen=True)
class Projection:
    items: tuple[ProjectionItem, ...]
    distinct: bool = False
    order_by: tuple[SortItem, ...] = ()
    skip: Optional[int] = None
    limit: Optional[int] = None


@dataclass(frozen=True)
class Match:
    patterns: tuple[PathPattern, ...]
    where: Optional[Expr] = None


@dataclass(frozen=True)
class With:
    projection: Projection
    where: Optional[Expr] = None


@dataclass(frozen=True)
class Return:
    projection: Projection


@dataclass(frozen=True)
class SetItem:
    var: str
    prop: str
    value: Expr


@dataclass(frozen=True)
class SetClause:
    items: tuple[SetItem, ...]


Clause = Union[Match, With, Return, SetClause]


@dataclass(frozen=True)
class Query:
    clauses: tuple[Clause, ...]


AGGREGATES = frozenset({"count", "sum", "avg", "min", "max", "collect"})


def is_aggregate(expr: Expr) -> bool:
    return isinstance(expr, FunctionCall) and expr.name in AGGREGATES


def contains_aggregate(expr) -> bool:
    if is_aggregate(expr):
        return True
    return any(contains_aggregate(c) for c in children(expr))


def children(expr) -> tuple:
    if isinstance(expr, Property):
        return (expr.subject,)
    if isinstance(expr, FunctionCall):
        return expr.args
    if isinstance(expr, BinaryOp):
        return (expr.left, expr.right)
    if isinstance(expr, (UnaryOp, IsNull)):
        return (expr.operand,)
    if isinstance(expr, ListLiteral):
        return expr.items
    if isinstance(expr, MapLiteral):
        return tuple(v for _, v in expr.items)
    return ()


def item_column(item) -> str:
    if item.alias:
        return item.alias
    if isinstance(item.expr, Variable):
        return item.expr.name
    return column_name(item.expr)


def substitute_projected(expr, items):
    """Replace sub-expressions that are projected items by references to their columns."""
    for item in items:
        if expr == item.expr:
            return Variable(item_column(item))
    if isinstance(expr, Property):
        return Property(substitute_projected(expr.subject, items), expr.name)
    if isinstance(expr, FunctionCall):
        return FunctionCall(expr.name, tuple(substitute_projected(a, items) for a in expr.args),
                            expr.distinct, expr.star)
    if isinstance(expr, BinaryOp):
        return BinaryOp(expr.op, substitute_projected(expr.left, items),
                        substitute_projected(expr.right, items))
    if isinstance(expr, UnaryOp):
        return UnaryOp(expr.op, substitute_projected(expr.operand, items))
    if isinstance(expr, IsNull):
        return IsNull(substitute_projected(expr.operand, items), expr.negated)
    if isinstance(expr, ListLiteral):
        return ListLiteral(tuple(substitute_projected(i, items) for i in expr.items))
    if isinstance(expr, MapLiteral):
        return MapLiteral(tuple((k, substitute_projected(v, items)) for k, v in expr.items))
    return expr


# ---- canonical text ------------------------------------------------------

def _ident(name: str) -> str:
    if name and (name[0].isalpha() or name[0] == "_") and all(c.isalnum() or c == "_" for c in name):
        return name
    return "`" + name.replace("`", "``") + "`"


def _string(value: str) -> str:
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Literal):
        v = expr.value
        if v is None:
            return "null"
        if v is True:
            return "true"
        if v is False:
            return "false"
        if isinstance(v, str):
            return _string(v)
        return repr(v)
    if isinstance(expr, Variable):
        return _ident(expr.name)
    if isinstance(expr, Property):
        return f"{format_expr(expr.subject)}.{_ident(expr.name)}"
    if isinstance(expr, FunctionCall):
        if expr.star:
            return f"{expr.name}(*)"
        inner = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.name}({'DISTINCT ' if expr.distinct else ''}{inner})"
    if isinstance(expr, BinaryOp):
        return f"({format_expr(expr.left)} {expr.op} {format_expr(expr.right)})"
    if isinstance(expr, UnaryOp):
        if expr.op == "NOT":
            return f"(NOT {format_expr(expr.operand)})"
        return f"(-{format_expr(expr.operand)})"
    if isinstance(expr, IsNull):
        return f"({format_expr(expr.operand)} IS {'NOT ' if expr.negated else ''}NULL)"
    if isinstance(expr, ListLiteral):
        return "[" + ", ".join(format_expr(i) for i in expr.items) + "]"
    if isinstance(expr, MapLiteral):
        return "{" + ", ".join(f"{_ident(k)}: {format_expr(v)}" for k, v in expr.items) + "}"
    raise TypeError(expr)


def column_name(expr: Expr) -> str:
    """Display name for an unaliased projection (outer parentheses dropped)."""
    text = format_expr(expr)
    if isinstance(expr, (BinaryOp, UnaryOp, IsNull)) and text.startswith("("):
        return text[1:-1]
    return text


def _format_node(n: NodePattern) -> str:
    out = _ident(n.var) if n.var else ""
    if n.label:
        out += ":" + _ident(n.label)
    if n.props:
        out += (" " if out else "") + "{" + ", ".join(
            f"{_ident(k)}: {format_expr(v)}" for k, v in n.props) + "}"
    return f"({out})"


def _format_rel(r: RelPattern) -> str:
    body = ""
    if r.type:
        body += ":" + _ident(r.type)
    if r.var_length:
        body += "*"
        if r.max_hops is None:
            body += f"{r.min_hops}.."
        elif r.min_hops == r.max_hops:
            body += str(r.min_hops)
        else:
            body += f"{r.min_hops}..{r.max_hops}"
    left = "<-" if r.direction == "in" else "-"
    right = "->" if r.direction == "out" else "-"
    return f"{left}[{body}]{right}"


def format_pattern(p: PathPattern) -> str:
    return "".join(
        _format_node(e) if isinstance(e, NodePattern) else _format_rel(e) for e in p.elements
    )


def _format_projection(p: Projection) -> str:
    items = ", ".join(
        format_expr(i.expr) + (f" AS {_ident(i.alias)}" if i.alias else "") for i in p.items
    )
    out = ("DISTINCT " if p.distinct else "") + items
    if p.order_by:
        out += " ORDER BY " + ", ".join(
            format_expr(s.expr) + (" DESC" if s.descending else "") for s in p.order_by
        )
    if p.skip is not None:
        out += f" SKIP {p.skip}"
    if p.limit is not None:
        out += f" LIMIT {p.limit}"
    return out


def format_query(q: Query) -> str:
    parts = []
    for c in q.clauses:
        if isinstance(c, Match):
            s = "MATCH " + ", ".join(format_pattern(p) for p in c.patterns)
            if c.where is not None:
                s += " WHERE " + format_expr(c.where)
        elif isinstance(c, With):
            s = "WITH " + _format_projection(c.projection)
            if c.where is not None:
                s += " WHERE " + format_expr(c.where)
        elif isinstance(c, Return):
            s = "RETURN " + _format_projection(c.projection)
        else:
            s = "SET " + ", ".join(
                f"{_ident(i.var)}.{_ident(i.prop)} = {format_expr(i.value)}" for i in c.items
            )
        parts.append(s)
    return "\n".join(parts)
