"""Evaluation of parsed queries against a PropertyGraph."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

from ..scene_graph import EDGE_TYPES, LAYERS, Point, PropertyGraph
from .ast import (
    BinaryOp,
    FunctionCall,
    IsNull,
    ListLiteral,
    Literal,
    MapLiteral,
    Match,
    NodePattern,
    Projection,
    Property,
    Query,
    RelPattern,
    Return,
    SetClause,
    UnaryOp,
    Variable,
    With,
    contains_aggregate,
    is_aggregate,
    item_column,
    substitute_projected,
)
from .errors import QueryError
from .values import NodeRef, hash_key, kind_of, sort_key

NODE_PROPERTIES = ("nodeSymbol", "class", "center")
SETTABLE = ("class", "center")


@dataclass
class Limits:
    depth_cap: int = 32
    row_cap: int = 100_000
    expansion_budget: int = 2_000_000
    read_only: bool = False


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    total_rows: int = 0
    properties_set: int = 0


class _Budget:
    def __init__(self, limit: int):
        self.left = limit
        self.limit = limit

    def spend(self, n: int = 1) -> None:
        self.left -= n
        if self.left < 0:
            raise QueryError(
                "resource-limit",
                f"pattern expansion exceeded {self.limit} steps; add labels, property filters "
                "or tighter variable-length bounds (e.g. *1..3)",
            )


def _check_schema(query: Query, limits: Limits) -> None:
    for clause in query.clauses:
        if not isinstance(clause, Match):
            continue
        for pattern in clause.patterns:
            for node in pattern.nodes:
                if node.label is not None and node.label not in LAYERS:
                    raise QueryError(
                        "unknown-identifier",
                        f"unknown label :{node.label}; node labels are {', '.join(LAYERS)}",
                    )
                for key, _ in node.props:
                    if key not in NODE_PROPERTIES:
                        raise QueryError(
                            "unknown-identifier",
                            f"unknown property `{key}`; node properties are "
                            f"{', '.join(NODE_PROPERTIES)}",
                        )
            for rel in pattern.rels:
                if rel.type is not None and rel.type not in EDGE_TYPES:
                    raise QueryError(
                        "unknown-identifier",
                        f"unknown relationship type :{rel.type}; types are {', '.join(EDGE_TYPES)}",
                    )
                if rel.var_length and rel.max_hops is not None and rel.max_hops > limits.depth_cap:
                    raise QueryError(
                        "depth-exceeded",
                        f"variable-length bound *{rel.min_hops}..{rel.max_hops} exceeds the "
                        f"depth cap of {limits.depth_cap} hops",
                    )
                if rel.var_length and rel.min_hops > limits.depth_cap:
                    raise QueryError(
                        "depth-exceeded",
                        f"minimum hop count {rel.min_hops} exceeds the depth cap of {limits.depth_cap}",
                    )


def _truthy(v) -> bool:
    return v is True


def _num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def equal(a, b):
    """Cypher equality with nulls folded to false."""
    if a is None or b is None:
        return False
    if _num(a) and _num(b):
        return float(a) == float(b)
    ka, kb = kind_of(a), kind_of(b)
    if ka != kb:
        return False
    if ka == "list":
        return len(a) == len(b) and all(equal(x, y) for x, y in zip(a, b))
    if ka == "point":
        return (float(a.x), float(a.y), float(a.z)) == (float(b.x), float(b.y), float(b.z))
    return a == b


class Executor:
    def __init__(self, graph: PropertyGraph, limits: Limits | None = None):
        self.graph = graph
        self.limits = limits or Limits()
        self.budget = _Budget(self.limits.expansion_budget)

    # ---- driver ----------------------------------------------------------
    def run(self, query: Query) -> ResultTable:
        _check_schema(query, self.limits)
        rows: list[dict] = [{}]
        table = None
        props_set = 0
        for clause in query.clauses:
            if isinstance(clause, Match):
                rows = self._match_clause(clause, rows)
            elif isinstance(clause, With):
                columns, projected, _ = self._project(clause.projection, rows)
                rows = [dict(zip(columns, r)) for r in projected]
                if clause.where is not None:
                    rows = [r for r in rows if _truthy(self.eval(clause.where, r))]
            elif isinstance(clause, SetClause):
                props_set += self._apply_set(clause, rows)
            elif isinstance(clause, Return):
                columns, projected, total = self._project(clause.projection, rows)
                table = ResultTable(columns, projected, total)
        if table is None:
            table = ResultTable(["propertiesSet"], [(props_set,)], 1)
        table.properties_set = props_set
        if len(table.rows) > self.limits.row_cap:
            table.rows = table.rows[: self.limits.row_cap]
        return table

    # ---- matching --------------------------------------------------------
    def _match_clause(self, clause: Match, rows: list[dict]) -> list[dict]:
        names: list[str] = []
        for pattern in clause.patterns:
            for node in pattern.nodes:
                if node.var and node.var not in names:
                    names.append(node.var)
        bound = set(rows[0]) if rows else set()
        steps = []
        for pattern in clause.patterns:
            els = self._orient(pattern, bound)
            bound.update(n.var for n in els[0::2] if n.var)
            steps.append(("start", els[0]))
            for k in range(1, len(els), 2):
                steps.append(("expand", els[k], els[k + 1]))
        last_rel = max((i for i, s in enumerate(steps) if s[0] == "expand"), default=-1)

        # patterns whose variable is already bound can rule a row out up front
        fixed = [n for pattern in clause.patterns for n in pattern.nodes
                 if n.var is not None and all(isinstance(e, Literal) for _, e in n.props)]

        out: list[dict] = []
        for row in rows:
            if any(n.var in row and not self._node_ok(n, self._bound_symbol(n, row), row)
                   for n in fixed):
                continue
            seen = set()
            for binding in self._expand_steps(steps, 0, row, None, frozenset(), last_rel):
                key = tuple(binding[n].symbol for n in names)
                if key in seen:
                    continue
                seen.add(key)
                if clause.where is None or _truthy(self.eval(clause.where, binding)):
                    out.append(binding)
                if len(out) > self.limits.row_cap * 10:
                    raise QueryError(
                        "resource-limit",
                        f"MATCH produced more than {self.limits.row_cap * 10} rows; "
                        "narrow the pattern or aggregate earlier",
                    )
        return out

    @staticmethod
    def _selectivity(node: NodePattern, bound: set) -> int:
        if node.var is not None and node.var in bound:
            return 0
        keys = [k for k, _ in node.props]
        if "nodeSymbol" in keys:
            return 1
        if keys:
            return 2
        return 3 if node.label is not None else 4

    def _orient(self, pattern, bound: set) -> tuple:
        """Elements of the path, reversed when its far end is more selective."""
        els = pattern.elements
        if len(els) == 1 or self._selectivity(els[-1], bound) >= self._selectivity(els[0], bound):
            return els
        flip = {"out": "in", "in": "out", "both": "both"}
        return tuple(replace(e, direction=flip[e.direction]) if isinstance(e, RelPattern) else e
                     for e in reversed(els))

    def _expand_steps(self, steps, i, binding, current, used, last_rel):
        if i == len(steps):
            yield binding
            return
        step = steps[i]
        if step[0] == "start":
            for sym in self._candidates(step[1], binding):
                yield from self._expand_steps(
                    steps, i + 1, self._bind(step[1], sym, binding), sym, used, last_rel
                )
            return
        _, rel, node_pat = step
        if rel.var_length:
            ends = self._var_length(rel, node_pat, binding, current, used, i == last_rel)
        else:
            ends = self._single_hop(rel, current, used)
        for sym, edges in ends:
            self.budget.spend()
            if not self._node_ok(node_pat, sym, binding):
                continue
            yield from self._expand_steps(
                steps, i + 1, self._bind(node_pat, sym, binding), sym, used | edges, last_rel
            )

    def _bind(self, pattern: NodePattern, sym: str, binding: dict) -> dict:
        if pattern.var is None or pattern.var in binding:
            return binding
        new = dict(binding)
        new[pattern.var] = NodeRef(self.graph.nodes[sym])
        return new

    def _bound_symbol(self, pattern: NodePattern, binding: dict):
        value = binding[pattern.var]
        if not isinstance(value, NodeRef):
            raise QueryError(
                "type-mismatch",
                f"variable `{pattern.var}` holds a {kind_of(value)}, not a node, "
                "and cannot be used in a pattern",
            )
        return value.symbol

    def _candidates(self, pattern: NodePattern, binding: dict) -> list[str]:
        if pattern.var is not None and pattern.var in binding:
            sym = self._bound_symbol(pattern, binding)
            return [sym] if self._node_ok(pattern, sym, binding) else []
        for key, expr in pattern.props:
            if key == "nodeSymbol":
                value = self.eval(expr, binding)
                node = self.graph.nodes.get(value) if isinstance(value, str) else None
                if node is None or not self._node_ok(pattern, value, binding):
                    return []
                return [value]
        syms = self.graph.symbols(pattern.label)
        self.budget.spend(len(syms))
        return [s for s in syms if self._node_ok(pattern, s, binding)]

    def _node_ok(self, pattern: NodePattern, sym: str, binding: dict) -> bool:
        node = self.graph.nodes[sym]
        if pattern.label is not None and node.layer != pattern.label:
            return False
        if pattern.var is not None and pattern.var in binding:
            if self._bound_symbol(pattern, binding) != sym:
                return False
        if pattern.props:
            props = node.properties()
            for key, expr in pattern.props:
                if not equal(props.get(key), self.eval(expr, binding)):
                    return False
        return True

    def _types(self, rel: RelPattern):
        return (rel.type,) if rel.type is not None else EDGE_TYPES

    def _single_hop(self, rel: RelPattern, current: str, used: frozenset):
        for nbr, key in self.graph.incident(current, self._types(rel), rel.direction):
            if key not in used:
                yield nbr, frozenset((key,))

    def _var_length(self, rel, node_pat, binding, start, used, is_last):
        if is_last and rel.min_hops <= 1:
            return self._reachable(rel, start, used)
        return self._trails(rel, start, used)

    def _reachable(self, rel: RelPattern, start: str, used: frozenset):
        """Ends of trails from start with length in [1, max], as (end, no edges)."""
        cap = rel.max_hops if rel.max_hops is not None else self.limits.depth_cap
        types = self._types(rel)
        dist = self._bfs(start, types, rel.direction, used, cap, unbounded=rel.max_hops is None)
        ends = [s for s, d in dist.items() if s != start and 1 <= d <= cap]
        # the start node itself is reachable only through a cycle
        best = None
        for nbr, key in self.graph.incident(start, types, rel.direction):
            if key in used:
                continue
            if nbr == start:
                best = 1
                break
            back = self._bfs(nbr, types, rel.direction, used | {key}, cap - 1, target=start)
            if start in back:
                length = 1 + back[start]
                best = length if best is None else min(best, length)
        if best is not None and best <= cap:
            ends.append(start)
        from ..scene_graph import symbol_key
        ends.sort(key=symbol_key)
        return [(s, frozenset()) for s in ends]

    def _bfs(self, start, types, direction, used, cap, target=None, unbounded=False):
        dist = {start: 0}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            d = dist[cur]
            for nbr, key in self.graph.incident(cur, types, direction):
                self.budget.spend()
                if key in used or nbr in dist:
                    continue
                if d + 1 > cap:
                    if unbounded:
                        raise QueryError(
                            "depth-exceeded",
                            f"unbounded variable-length pattern reaches past the depth cap of "
                            f"{cap} hops; give an explicit upper bound such as *1..{min(cap, 6)}",
                        )
                    continue
                dist[nbr] = d + 1
                if nbr == target:
                    return dist
                queue.append(nbr)
        return dist

    def _trails(self, rel: RelPattern, start: str, used: frozenset):
        """Every trail (no repeated relationship) from start within the hop bounds."""
        cap = rel.max_hops if rel.max_hops is not None else self.limits.depth_cap
        types = self._types(rel)
        if rel.max_hops is None:
            # same rule as the reachability path: fail if the cap hides a reachable node
            self._bfs(start, types, rel.direction, used, cap, unbounded=True)
        stack = [(start, 0, frozenset())]
        while stack:
            cur, depth, path = stack.pop()
            if depth >= rel.min_hops:
                yield cur, path
            if depth == cap:
                continue
            nxt = []
            for nbr, key in self.graph.incident(cur, types, rel.direction):
                self.budget.spend()
                if key in used or key in path:
                    continue
                nxt.append((nbr, depth + 1, path | {key}))
            stack.extend(reversed(nxt))

    # ---- projection ------------------------------------------------------
    def _project(self, proj: Projection, rows: list[dict]):
        columns = [item_column(i) for i in proj.items]
        aggregating = any(contains_aggregate(i.expr) for i in proj.items)
        pairs: list[tuple[tuple, dict]] = []  # (output row, scope for ORDER BY)
        if aggregating:
            key_idx = [k for k, i in enumerate(proj.items) if not contains_aggregate(i.expr)]
            groups: dict = {}
            order = []
            for row in rows:
                key_vals = [self.eval(proj.items[k].expr, row) for k in key_idx]
                key = tuple(hash_key(v) for v in key_vals)
                if key not in groups:
                    groups[key] = (key_vals, [])
                    order.append(key)
                groups[key][1].append(row)
            if not rows and not key_idx:
                groups[()] = ([], [])
                order.append(())
            for key in order:
                key_vals, members = groups[key]
                values = []
                kv = iter(key_vals)
                for k, item in enumerate(proj.items):
                    if k in key_idx:
                        values.append(next(kv))
                    else:
                        values.append(self.eval(item.expr, members[0] if members else {}, members))
                out = tuple(values)
                pairs.append((out, dict(zip(columns, out))))
        else:
            for row in rows:
                out = tuple(self.eval(i.expr, row) for i in proj.items)
                scope = dict(row)
                scope.update(zip(columns, out))
                pairs.append((out, scope))
        if proj.distinct:
            seen = set()
            unique = []
            for out, scope in pairs:
                key = tuple(hash_key(v) for v in out)
                if key not in seen:
                    seen.add(key)
                    unique.append((out, scope))
            pairs = unique
        if proj.order_by:
            keys = [(substitute_projected(s.expr, proj.items), s.descending) for s in proj.order_by]
            decorated = [
                ([sort_key(self.eval(e, scope)) for e, _ in keys], out) for out, scope in pairs
            ]
            # stable multi-key sort: apply keys from last to first
            for idx in range(len(keys) - 1, -1, -1):
                desc = keys[idx][1]
                decorated.sort(key=lambda d: d[0][idx], reverse=desc)
            result = [out for _, out in decorated]
        else:
            result = [out for out, _ in pairs]
        total = len(result)
        if proj.skip:
            result = result[proj.skip:]
        if proj.limit is not None:
            result = result[: proj.limit]
        return columns, result, total

    # ---- SET -------------------------------------------------------------
    def _apply_set(self, clause: SetClause, rows: list[dict]) -> int:
        if self.limits.read_only:
            raise QueryError("unsupported-feature", "SET is disabled: the graph is read-only here")
        count = 0
        pending = []
        for row in rows:
            for item in clause.items:
                target = row.get(item.var)
                if not isinstance(target, NodeRef):
                    raise QueryError("type-mismatch", f"SET target `{item.var}` is not a node")
                if item.prop == "nodeSymbol":
                    raise QueryError("unsupported-feature", "nodeSymbol is immutable and cannot be SET")
                if item.prop not in SETTABLE:
                    raise QueryError(
                        "unknown-identifier",
                        f"unknown property `{item.prop}`; settable properties are class, center",
                    )
                value = self.eval(item.value, row)
                if item.prop == "class" and value is not None and not isinstance(value, str):
                    raise QueryError("type-mismatch", f"class must be a string, got {kind_of(value)}")
                if item.prop == "center" and not isinstance(value, Point):
                    raise QueryError("type-mismatch", f"center must be a point, got {kind_of(value)}")
                if item.prop == "class" and target.node.layer == "Place":
                    raise QueryError("type-mismatch", "Place nodes have no class property")
                pending.append((target.symbol, item.prop, value))
        with self.graph.write_lock:
            for sym, prop, value in pending:
                self.graph.set_property(sym, prop, value)
                count += 1
        return count

    # ---- expressions -----------------------------------------------------
    def eval(self, expr, row: dict, group: list | None = None):
        if isinstance(expr, Literal):
            return expr.value
        if isinstance(expr, Variable):
            if expr.name not in row:
                raise QueryError("unknown-identifier", f"variable `{expr.name}` is not defined")
            return row[expr.name]
        if isinstance(expr, Property):
            return self._property(self.eval(expr.subject, row, group), expr.name)
        if isinstance(expr, BinaryOp):
            return self._binary(expr, row, group)
        if isinstance(expr, UnaryOp):
            v = self.eval(expr.operand, row, group)
            if expr.op == "NOT":
                if v is None:
                    return True
                if not isinstance(v, bool):
                    raise QueryError("type-mismatch", f"NOT expects a boolean, got {kind_of(v)}")
                return not v
            if v is None:
                return None
            if not _num(v):
                raise QueryError("type-mismatch", f"cannot negate a {kind_of(v)}")
            return -v
        if isinstance(expr, IsNull):
            v = self.eval(expr.operand, row, group)
            return (v is not None) if expr.negated else (v is None)
        if isinstance(expr, ListLiteral):
            return [self.eval(i, row, group) for i in expr.items]
        if isinstance(expr, MapLiteral):
            raise QueryError("unsupported-feature", "map values are only supported inside point({...})")
        if isinstance(expr, FunctionCall):
            if is_aggregate(expr):
                if group is None:
                    raise QueryError("parse", f"aggregate {expr.name}() used outside a projection")
                return self._aggregate(expr, group)
            return self._function(expr, row, group)
        raise TypeError(expr)

    def _property(self, subject, name: str):
        if subject is None:
            return None
        if isinstance(subject, NodeRef):
            if name not in NODE_PROPERTIES:
                raise QueryError(
                    "unknown-identifier",
                    f"unknown property `{name}` on {subject.node.layer}; node properties are "
                    f"{', '.join(NODE_PROPERTIES)}",
                )
            return subject.node.properties().get(name)
        if isinstance(subject, Point):
            if name in ("x", "y", "z"):
                return float(getattr(subject, name))
            raise QueryError("unknown-identifier", f"points have x, y, z components, not `{name}`")
        raise QueryError("type-mismatch", f"cannot read property `{name}` of a {kind_of(subject)}")

    def _binary(self, expr: BinaryOp, row, group):
        op = expr.op
        if op in ("AND", "OR"):
            left = self.eval(expr.left, row, group)
            for v in (left,):
                if v is not None and not isinstance(v, bool):
                    raise QueryError("type-mismatch", f"{op} expects booleans, got {kind_of(v)}")
            if op == "AND" and left is not True:
                right = self.eval(expr.right, row, group)
                self._check_bool(right, op)
                return False
            if op == "OR" and left is True:
                self._check_bool(self.eval(expr.right, row, group), op)
                return True
            right = self.eval(expr.right, row, group)
            self._check_bool(right, op)
            return right is True
        a = self.eval(expr.left, row, group)
        b = self.eval(expr.right, row, group)
        if op == "=":
            return equal(a, b)
        if op == "<>":
            if a is None or b is None:
                return False
            return not equal(a, b)
        if op in ("<", "<=", ">", ">="):
            if a is None or b is None:
                return False
            if _num(a) and _num(b):
                x, y = float(a), float(b)
            elif isinstance(a, str) and isinstance(b, str):
                x, y = a, b
            else:
                raise QueryError(
                    "type-mismatch",
                    f"cannot compare {kind_of(a)} with {kind_of(b)} using {op}",
                )
            return {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]
        if op == "IN":
            if a is None or b is None:
                return False
            if not isinstance(b, list):
                raise QueryError("type-mismatch", f"IN expects a list on the right, got {kind_of(b)}")
            return any(equal(a, x) for x in b)
        if op == "CONTAINS":
            if a is None or b is None:
                return False
            if not (isinstance(a, str) and isinstance(b, str)):
                raise QueryError("type-mismatch", "CONTAINS compares two strings")
            return b in a
        return self._arith(op, a, b)

    @staticmethod
    def _check_bool(v, op):
        if v is not None and not isinstance(v, bool):
            raise QueryError("type-mismatch", f"{op} expects booleans, got {kind_of(v)}")

    def _arith(self, op: str, a, b):
        if a is None or b is None:
            return None
        if isinstance(a, Point) or isinstance(b, Point):
            raise QueryError(
                "type-mismatch",
                f"arithmetic ({op}) is not defined on points; use point.distance or .x/.y/.z",
            )
        if op == "+":
            if isinstance(a, str) and isinstance(b, str):
                return a + b
            if isinstance(a, list) and isinstance(b, list):
                return a + b
        if not (_num(a) and _num(b)):
            raise QueryError("type-mismatch", f"cannot apply {op} to {kind_of(a)} and {kind_of(b)}")
        both_int = isinstance(a, int) and isinstance(b, int)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            raise QueryError("type-mismatch", f"division by zero in {op}")
        if op == "/":
            if both_int:
                q = abs(a) // abs(b)
                return q if (a >= 0) == (b >= 0) else -q
            return a / b
        if op == "%":
            return math.fmod(a, b) if not both_int else int(math.fmod(a, b))
        raise QueryError("unsupported-feature", f"operator {op}")

    def _function(self, fc: FunctionCall, row, group):
        name = fc.name
        if name == "point":
            arg = fc.args[0]
            if not isinstance(arg, MapLiteral):
                raise QueryError("type-mismatch", "point() expects a map such as {x: 1, y: 2, z: 0}")
            coords = {k: self.eval(v, row, group) for k, v in arg.items}
            extra = set(coords) - {"x", "y", "z"}
            if extra or "x" not in coords or "y" not in coords:
                raise QueryError("type-mismatch", "point() needs x and y (and optionally z) keys")
            vals = [coords.get("x"), coords.get("y"), coords.get("z", 0.0)]
            if any(v is None for v in vals):
                return None
            if not all(_num(v) and math.isfinite(v) for v in vals):
                raise QueryError("type-mismatch", "point coordinates must be finite numbers")
            return Point(*(float(v) for v in vals))
        args = [self.eval(a, row, group) for a in fc.args]
        if name == "point.distance":
            a, b = args
            if a is None or b is None:
                return None
            if not (isinstance(a, Point) and isinstance(b, Point)):
                raise QueryError(
                    "type-mismatch",
                    f"point.distance expects two points, got {kind_of(a)} and {kind_of(b)}; "
                    "use the center property",
                )
            return point_distance(a, b)
        v = args[0]
        if v is None:
            return None
        if name == "labels":
            if not isinstance(v, NodeRef):
                raise QueryError("type-mismatch", "labels() expects a node")
            return [v.node.layer]
        if name in ("toLower", "toUpper"):
            if not isinstance(v, str):
                raise QueryError("type-mismatch", f"{name}() expects a string, got {kind_of(v)}")
            return v.lower() if name == "toLower" else v.upper()
        if name == "size":
            if not isinstance(v, (str, list)):
                raise QueryError("type-mismatch", f"size() expects a string or list, got {kind_of(v)}")
            return len(v)
        if not _num(v):
            raise QueryError("type-mismatch", f"{name}() expects a number, got {kind_of(v)}")
        if name == "abs":
            return abs(v)
        if name == "sqrt":
            if v < 0:
                return float("nan")
            return math.sqrt(v)
        if name == "round":
            digits = args[1] if len(args) > 1 else 0
            if not isinstance(digits, int):
                raise QueryError("type-mismatch", "round() precision must be an integer")
            return float(round(float(v), digits))
        raise QueryError("unsupported-feature", f"function {name}()")

    def _aggregate(self, fc: FunctionCall, group: list):
        if fc.star:
            return len(group)
        values = [self.eval(fc.args[0], r) for r in group]
        values = [v for v in values if v is not None]
        if fc.distinct:
            seen, unique = set(), []
            for v in values:
                k = hash_key(v)
                if k not in seen:
                    seen.add(k)
                    unique.append(v)
            values = unique
        name = fc.name
        if name == "count":
            return len(values)
        if name == "collect":
            return values
        if name in ("min", "max"):
            if not values:
                return None
            pick = min if name == "min" else max
            return pick(values, key=sort_key)
        if not all(_num(v) for v in values):
            bad = next(v for v in values if not _num(v))
            raise QueryError("type-mismatch", f"{name}() expects numbers, got {kind_of(bad)}")
        if name == "sum":
            return sum(values) if values else 0
        if name == "avg":
            return (sum(float(v) for v in values) / len(values)) if values else None
        raise QueryError("unsupported-feature", f"aggregate {name}()")


def point_distance(a: Point, b: Point) -> float:
    if not (isinstance(a, Point) and isinstance(b, Point)):
        raise QueryError("type-mismatch", "point.distance expects two points")
    return math.sqrt(
        (float(a.x) - float(b.x)) ** 2 + (float(a.y) - float(b.y)) ** 2 + (float(a.z) - float(b.z)) ** 2
    )


def execute(graph: PropertyGraph, query: Query, limits: Limits | None = None) -> ResultTable:
    return Executor(graph, limits).run(query)
