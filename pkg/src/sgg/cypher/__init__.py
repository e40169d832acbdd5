"""Cypher-subset query engine over scene graphs."""

from .ast import Query, format_query
from .errors import QueryError
from .executor import Limits, ResultTable, execute, point_distance
from .parser import parse_query
from .values import NodeRef, render_value

DEFAULT_MAX_ROWS = 50


def render_result(table: ResultTable, max_rows: int = DEFAULT_MAX_ROWS) -> str:
    lines = [" | ".join(table.columns)]
    if not table.rows:
        lines.append("(0 rows)")
        return "\n".join(lines)
    for row in table.rows[:max_rows]:
        lines.append(" | ".join(render_value(v) for v in row))
    if len(table.rows) > max_rows:
        lines.append(f"(truncated, {len(table.rows)} total rows)")
    return "\n".join(lines)


def answer_query(graph, text: str, limits: Limits | None = None,
                 max_rows: int = DEFAULT_MAX_ROWS) -> tuple[str, QueryError | None]:
    """Rendered text plus the error, if the query failed."""
    try:
        table = execute(graph, parse_query(text), limits)
    except QueryError as exc:
        return format_error(exc), exc
    return render_result(table, max_rows), None


def run_query(graph, text: str, limits: Limits | None = None,
              max_rows: int = DEFAULT_MAX_ROWS) -> str:
    """Parse, execute and render; query failures come back as their message text.

    This is the exact text handed back to the model as a tool result.
    """
    return answer_query(graph, text, limits, max_rows)[0]


def format_error(exc: QueryError) -> str:
    return f"Query error ({exc.kind}): {exc.message}"


__all__ = [
    "DEFAULT_MAX_ROWS",
    "Limits",
    "answer_query",
    "NodeRef",
    "Query",
    "QueryError",
    "ResultTable",
    "execute",
    "format_error",
    "format_query",
    "parse_query",
    "point_distance",
    "render_result",
    "render_value",
    "run_query",
]
