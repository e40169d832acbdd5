"""Recursive-descent parser for the supported Cypher subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    AGGREGATES,
    BinaryOp,
    FunctionCall,
    IsNull,
    ListLiteral,
    Literal,
    MapLiteral,
    Match,
    NodePattern,
    PathPattern,
    Projection,
    ProjectionItem,
    Property,
    Query,
    RelPattern,
    Return,
    SetClause,
    SetItem,
    SortItem,
    UnaryOp,
    Variable,
    With,
    children,
    contains_aggregate,
    is_aggregate,
    item_column,
    substitute_projected,
)
from .errors import QueryError

# canonical spelling of every supported function, keyed by lower-case name
FUNCTIONS = {
    "count": "count",
    "sum": "sum",
    "avg": "avg",
    "min": "min",
    "max": "max",
    "collect": "collect",
    "abs": "abs",
    "round": "round",
    "sqrt": "sqrt",
    "tolower": "toLower",
    "toupper": "toUpper",
    "size": "size",
    "labels": "labels",
    "point": "point",
    "point.distance": "point.distance",
}

UNSUPPORTED_CLAUSES = {
    "CREATE", "DELETE", "DETACH", "MERGE", "REMOVE", "UNWIND", "CALL", "FOREACH",
    "LOAD", "UNION", "OPTIONAL", "USE", "SHOW", "DROP", "YIELD",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*|/\*.*?\*/)
  | (?P<number>\d+\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+|\d+)
  | (?P<string>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quoted>`(?:[^`]|``)*`)
  | (?P<op><>|<=|>=|!=|=~|\.\.|[()\[\]{}:,.;<>=+\-*/%|$])
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"'}


@dataclass
class Token:
    kind: str  # ident, quoted, number, string, op, eof
    text: str
    value: object
    line: int
    col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            col = pos - line_start + 1
            raise QueryError(
                "parse",
                f"line {line}, column {col}: unexpected character {text[pos]!r}",
                span=(line, col),
            )
        kind = m.lastgroup
        chunk = m.group()
        col = pos - line_start + 1
        if kind == "string":
            if len(chunk) < 2:
                raise QueryError("parse", f"line {line}, column {col}: unterminated string",
                                 span=(line, col))
            tokens.append(Token("string", chunk, _unescape(chunk[1:-1]), line, col))
        elif kind == "number":
            value = float(chunk) if any(c in chunk for c in ".eE") else int(chunk)
            tokens.append(Token("number", chunk, value, line, col))
        elif kind == "ident":
            tokens.append(Token("ident", chunk, chunk, line, col))
        elif kind == "quoted":
            tokens.append(Token("quoted", chunk, chunk[1:-1].replace("``", "`"), line, col))
        elif kind == "op":
            tokens.append(Token("op", chunk, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", None, line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # ---- token helpers ---------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text.upper() in words

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def error(self, expected, tok: Token | None = None) -> QueryError:
        tok = tok or self.tok
        expected = tuple(expected)
        exp = ", ".join(expected)
        return QueryError(
            "parse",
            f"line {tok.line}, column {tok.col}: unexpected {tok.describe()}; expected {exp}",
            span=(tok.line, tok.col),
            expected=expected,
        )

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            raise self.error([repr(op)])
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        if not self.at_kw(word):
            raise self.error([word])
        return self.advance()

    def name(self, what: str = "identifier") -> str:
        if self.tok.kind in ("ident", "quoted"):
            return self.advance().value
        raise self.error([what])

    # ---- clauses ---------------------------------------------------------
    def parse(self) -> Query:
        clauses = []
        while True:
            if self.tok.kind == "eof" or self.at_op(";"):
                break
            if self.at_kw("MATCH"):
                self.advance()
                clauses.append(self.match_clause())
            elif self.at_kw("WITH"):
                self.advance()
                proj = self.projection(require_alias=True)
                where = None
                if self.at_kw("WHERE"):
                    self.advance()
                    where = self.expr()
                clauses.append(With(proj, where))
            elif self.at_kw("RETURN"):
                self.advance()
                clauses.append(Return(self.projection()))
                break
            elif self.at_kw("SET"):
                self.advance()
                clauses.append(self.set_clause())
                if self.at_kw("RETURN"):
                    self.advance()
                    clauses.append(Return(self.projection()))
                break
            elif self.at_kw(*UNSUPPORTED_CLAUSES):
                word = self.tok.text.upper()
                if word == "OPTIONAL":
                    word = "OPTIONAL MATCH"
                raise QueryError(
                    "unsupported-feature",
                    f"{word} is not supported; only MATCH, WHERE, WITH, RETURN, ORDER BY, "
                    "SKIP, LIMIT and SET are available",
                )
            else:
                raise self.error(["MATCH", "WITH", "RETURN", "SET"])
        if self.at_op(";"):
            self.advance()
        if self.tok.kind != "eof":
            raise self.error(["end of input"])
        if not clauses:
            raise self.error(["MATCH", "RETURN"])
        if not isinstance(clauses[-1], (Return, SetClause)):
            raise QueryError(
                "parse", "query must end with a RETURN or SET clause", expected=("RETURN", "SET")
            )
        query = Query(tuple(clauses))
        check_semantics(query)
        return query

    def match_clause(self) -> Match:
        patterns = [self.path_pattern()]
        while self.at_op(","):
            self.advance()
            patterns.append(self.path_pattern())
        where = None
        if self.at_kw("WHERE"):
            self.advance()
            where = self.expr()
        return Match(tuple(patterns), where)

    def path_pattern(self) -> PathPattern:
        if self.tok.kind in ("ident", "quoted") and self.peek().kind == "op" and self.peek().text == "=":
            raise QueryError("unsupported-feature", "named paths (p = (...)) are not supported")
        elements = [self.node_pattern()]
        while self.at_op("-", "<"):
            elements.append(self.rel_pattern())
            elements.append(self.node_pattern())
        return PathPattern(tuple(elements))

    def node_pattern(self) -> NodePattern:
        self.expect_op("(")
        var = label = None
        if self.tok.kind in ("ident", "quoted"):
            var = self.advance().value
        if self.at_op(":"):
            self.advance()
            label = self.name("label")
            if self.at_op(":"):
                raise QueryError("unsupported-feature", "multiple labels on one node are not supported")
        props = ()
        if self.at_op("{"):
            props = self.map_items()
        if not self.at_op(")"):
            raise self.error(["')'", "':'", "'{'"])
        self.advance()
        return NodePattern(var, label, props)

    def rel_pattern(self) -> RelPattern:
        incoming = False
        if self.at_op("<"):
            self.advance()
            incoming = True
        self.expect_op("-")
        rtype = None
        var_length = False
        lo, hi = 1, 1
        if self.at_op("["):
            self.advance()
            if self.tok.kind in ("ident", "quoted"):
                raise QueryError(
                    "unsupported-feature",
                    f"relationship variables ({self.tok.text}) are not supported; "
                    "use an anonymous relationship such as -[:CONTAINS]->",
                )
            if self.at_op(":"):
                self.advance()
                rtype = self.name("relationship type")
                if self.at_op("|"):
                    raise QueryError("unsupported-feature",
                                     "alternative relationship types (A|B) are not supported")
            if self.at_op("*"):
                self.advance()
                var_length = True
                lo, hi = 1, None
                if self.tok.kind == "number":
                    lo = self._hop_count()
                    hi = lo
                    if self.at_op(".."):
                        self.advance()
                        hi = self._hop_count() if self.tok.kind == "number" else None
                elif self.at_op(".."):
                    self.advance()
                    hi = self._hop_count()
                if lo < 1 or (hi is not None and hi < lo):
                    raise QueryError(
                        "parse",
                        f"invalid variable-length bounds *{lo}..{hi}; need 1 <= min <= max",
                    )
            if self.at_op("{"):
                raise QueryError("unsupported-feature", "relationship properties are not supported")
            self.expect_op("]")
        self.expect_op("-")
        outgoing = False
        if self.at_op(">"):
            self.advance()
            outgoing = True
        if incoming and outgoing:
            raise QueryError("parse", "a relationship cannot point both ways (<-...->)")
        direction = "in" if incoming else "out" if outgoing else "both"
        return RelPattern(rtype, direction, var_length, lo, hi)

    def _hop_count(self) -> int:
        t = self.tok
        if t.kind != "number" or not isinstance(t.value, int):
            raise self.error(["integer hop count"])
        self.advance()
        return t.value

    def map_items(self) -> tuple:
        self.expect_op("{")
        items = []
        if not self.at_op("}"):
            while True:
                key = self.name("property name")
                self.expect_op(":")
                items.append((key, self.expr()))
                if self.at_op(","):
                    self.advance()
                    continue
                break
        if not self.at_op("}"):
            raise self.error(["','", "'}'"])
        self.advance()
        keys = [k for k, _ in items]
        if len(set(keys)) != len(keys):
            raise QueryError("parse", f"duplicate key in map {{{', '.join(keys)}}}")
        return tuple(items)

    def projection(self, require_alias: bool = False) -> Projection:
        distinct = False
        if self.at_kw("DISTINCT"):
            self.advance()
            distinct = True
        if self.at_op("*"):
            raise QueryError("unsupported-feature", "RETURN * / WITH * is not supported; list the items")
        items = []
        while True:
            expr = self.expr()
            alias = None
            if self.at_kw("AS"):
                self.advance()
                alias = self.name("alias")
            if require_alias and alias is None and not isinstance(expr, Variable):
                raise QueryError("parse", "expressions in WITH must be aliased (use AS)")
            items.append(ProjectionItem(expr, alias))
            if self.at_op(","):
                self.advance()
                continue
            break
        order = []
        if self.at_kw("ORDER"):
            self.advance()
            self.expect_kw("BY")
            while True:
                e = self.expr()
                desc = False
                if self.at_kw("DESC", "DESCENDING"):
                    self.advance()
                    desc = True
                elif self.at_kw("ASC", "ASCENDING"):
                    self.advance()
                order.append(SortItem(e, desc))
                if self.at_op(","):
                    self.advance()
                    continue
                break
        skip = limit = None
        if self.at_kw("SKIP"):
            self.advance()
            skip = self._count("SKIP")
        if self.at_kw("LIMIT"):
            self.advance()
            limit = self._count("LIMIT")
        return Projection(tuple(items), distinct, tuple(order), skip, limit)

    def _count(self, what: str) -> int:
        t = self.tok
        if t.kind != "number" or not isinstance(t.value, int):
            raise self.error([f"non-negative integer after {what}"])
        self.advance()
        return t.value

    def set_clause(self) -> SetClause:
        items = []
        while True:
            var = self.name("variable")
            self.expect_op(".")
            prop = self.name("property name")
            self.expect_op("=")
            items.append(SetItem(var, prop, self.expr()))
            if self.at_op(","):
                self.advance()
                continue
            break
        return SetClause(tuple(items))

    # ---- expressions -----------------------------------------------------
    def expr(self):
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.at_kw("OR"):
            self.advance()
            left = BinaryOp("OR", left, self.and_expr())
        if self.at_kw("XOR"):
            raise QueryError("unsupported-feature", "XOR is not supported")
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at_kw("AND"):
            self.advance()
            left = BinaryOp("AND", left, self.not_expr())
        return left

    def not_expr(self):
        if self.at_kw("NOT"):
            self.advance()
            return UnaryOp("NOT", self.not_expr())
        return self.comparison()

    def comparison(self):
        left = self.additive()
        while True:
            if self.at_op("=", "<>", "<", "<=", ">", ">=", "!="):
                op = self.advance().text
                if op == "!=":
                    op = "<>"
                left = BinaryOp(op, left, self.additive())
            elif self.at_kw("IN"):
                self.advance()
                left = BinaryOp("IN", left, self.additive())
            elif self.at_kw("CONTAINS"):
                self.advance()
                left = BinaryOp("CONTAINS", left, self.additive())
            elif self.at_kw("STARTS", "ENDS"):
                raise QueryError("unsupported-feature",
                                 f"{self.tok.text.upper()} WITH is not supported; use CONTAINS")
            elif self.at_kw("IS"):
                self.advance()
                negated = False
                if self.at_kw("NOT"):
                    self.advance()
                    negated = True
                self.expect_kw("NULL")
                left = IsNull(left, negated)
            elif self.at_op("=~"):
                raise QueryError("unsupported-feature", "regular expressions (=~) are not supported")
            else:
                return left

    def additive(self):
        left = self.multiplicative()
        while self.at_op("+", "-"):
            op = self.advance().text
            left = BinaryOp(op, left, self.multiplicative())
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at_op("*", "/", "%"):
            op = self.advance().text
            left = BinaryOp(op, left, self.unary())
        return left

    def unary(self):
        if self.at_op("-"):
            self.advance()
            operand = self.unary()
            if isinstance(operand, Literal) and isinstance(operand.value, (int, float)) \
                    and not isinstance(operand.value, bool):
                return Literal(-operand.value)
            return UnaryOp("-", operand)
        if self.at_op("+"):
            self.advance()
            return self.unary()
        return self.postfix()

    def postfix(self):
        e = self.atom()
        while True:
            if self.at_op("."):
                self.advance()
                e = Property(e, self.name("property name"))
            elif self.at_op("["):
                raise QueryError("unsupported-feature", "list indexing and slicing are not supported")
            else:
                return e

    def atom(self):
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Literal(t.value)
        if t.kind == "string":
            self.advance()
            return Literal(t.value)
        if self.at_op("("):
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        if self.at_op("["):
            self.advance()
            items = []
            if not self.at_op("]"):
                while True:
                    items.append(self.expr())
                    if self.at_op(","):
                        self.advance()
                        continue
                    break
            self.expect_op("]")
            return ListLiteral(tuple(items))
        if self.at_op("{"):
            return MapLiteral(self.map_items())
        if self.at_op("$"):
            raise QueryError("unsupported-feature", "query parameters ($name) are not supported")
        if t.kind == "quoted":
            self.advance()
            return Variable(t.value)
        if t.kind == "ident":
            word = t.text.upper()
            if word == "TRUE":
                self.advance()
                return Literal(True)
            if word == "FALSE":
                self.advance()
                return Literal(False)
            if word == "NULL":
                self.advance()
                return Literal(None)
            next_is_paren = self.peek().kind == "op" and self.peek().text == "("
            if word == "CASE" or (word in ("EXISTS", "ALL", "ANY", "NONE", "SINGLE", "REDUCE")
                                  and next_is_paren):
                raise QueryError("unsupported-feature", f"{word} expressions are not supported")
            # dotted function name: ident(.ident)* followed by '('
            j = self.i
            parts = [self.tokens[j].text]
            while (self.tokens[j + 1].kind == "op" and self.tokens[j + 1].text == "."
                   and self.tokens[j + 2].kind == "ident"):
                parts.append(self.tokens[j + 2].text)
                j += 2
            if self.tokens[j + 1].kind == "op" and self.tokens[j + 1].text == "(":
                self.i = j + 1
                return self.function_call(".".join(parts))
            self.advance()
            return Variable(t.text)
        raise self.error(["expression"])

    def function_call(self, raw_name: str):
        self.expect_op("(")
        lowered = raw_name.lower()
        if lowered.startswith("apoc."):
            raise QueryError(
                "unsupported-feature",
                f"{raw_name}: APOC functions are not available; use built-in Cypher functions "
                "(count, sum, avg, min, max, collect, point.distance, ...)",
            )
        if lowered == "distance":
            raise QueryError("unsupported-feature",
                             "distance() has been replaced by point.distance(a, b)")
        name = FUNCTIONS.get(lowered)
        if name is None:
            supported = ", ".join(sorted(set(FUNCTIONS.values())))
            raise QueryError("unsupported-feature",
                             f"function {raw_name}() is not supported; available: {supported}")
        if self.at_op("*"):
            if name != "count":
                raise self.error(["expression"])
            self.advance()
            self.expect_op(")")
            return FunctionCall("count", (), False, True)
        distinct = False
        if self.at_kw("DISTINCT"):
            if name not in AGGREGATES:
                raise QueryError("parse", f"DISTINCT is only allowed inside aggregate functions, not {name}()")
            self.advance()
            distinct = True
        args = []
        if not self.at_op(")"):
            while True:
                args.append(self.expr())
                if self.at_op(","):
                    self.advance()
                    continue
                break
        if not self.at_op(")"):
            raise self.error(["','", "')'"])
        self.advance()
        arity = {"point.distance": (2, 2), "round": (1, 2)}.get(name, (1, 1))
        if not arity[0] <= len(args) <= arity[1]:
            raise QueryError("parse", f"{name}() takes {arity[0]} argument(s), got {len(args)}")
        return FunctionCall(name, tuple(args), distinct, False)


# ---- static checks -------------------------------------------------------

def _walk(expr):
    yield expr
    for c in children(expr):
        yield from _walk(c)


def _check_vars(expr, scope: set, where: str):
    for e in _walk(expr):
        if isinstance(e, Variable) and e.name not in scope:
            raise QueryError(
                "unknown-identifier",
                f"variable `{e.name}` is not defined in {where}; bound variables: "
                f"{', '.join(sorted(scope)) or 'none'}",
            )


def _check_no_aggregate(expr, where: str):
    if expr is not None and contains_aggregate(expr):
        raise QueryError("parse", f"aggregate functions are not allowed in {where}")
    for e in _walk(expr) if expr is not None else ():
        if is_aggregate(e):
            for a in e.args:
                if contains_aggregate(a):
                    raise QueryError("parse", "aggregate functions cannot be nested")


def check_semantics(query: Query) -> None:
    scope: set[str] = set()
    for clause in query.clauses:
        if isinstance(clause, Match):
            for pattern in clause.patterns:
                for node in pattern.nodes:
                    for _, v in node.props:
                        _check_no_aggregate(v, "pattern properties")
                        _check_vars(v, scope, "pattern properties")
                    if node.var:
                        scope.add(node.var)
            if clause.where is not None:
                _check_no_aggregate(clause.where, "WHERE")
                _check_vars(clause.where, scope, "WHERE")
        elif isinstance(clause, (With, Return)):
            proj = clause.projection
            for item in proj.items:
                _check_vars(item.expr, scope, type(clause).__name__.upper())
                for e in _walk(item.expr):
                    if is_aggregate(e):
                        for a in e.args:
                            if contains_aggregate(a):
                                raise QueryError("parse", "aggregate functions cannot be nested")
            new_scope = {i.alias or i.expr.name for i in proj.items
                         if i.alias or isinstance(i.expr, Variable)}
            aggregating = any(contains_aggregate(i.expr) for i in proj.items)
            order_scope = new_scope | {item_column(i) for i in proj.items}
            if not aggregating and not proj.distinct:
                order_scope |= scope
            for s in proj.order_by:
                key = substitute_projected(s.expr, proj.items)
                _check_vars(key, order_scope, "ORDER BY")
                if aggregating and contains_aggregate(key):
                    raise QueryError("parse", "ORDER BY may only use aggregates that are also projected")
            scope = new_scope
            if isinstance(clause, With) and clause.where is not None:
                _check_no_aggregate(clause.where, "WHERE")
                _check_vars(clause.where, scope, "WHERE")
        else:
            for item in clause.items:
                if item.var not in scope:
                    raise QueryError("unknown-identifier",
                                     f"variable `{item.var}` in SET is not defined")
                _check_no_aggregate(item.value, "SET")
                _check_vars(item.value, scope, "SET")


def parse_query(text: str) -> Query:
    """Parse query text; raises QueryError (parse / unsupported-feature / unknown-identifier)."""
    return Parser(text).parse()
