from __future__ import annotations

KINDS = (
    "parse",
    "unknown-identifier",
    "type-mismatch",
    "unsupported-feature",
    "depth-exceeded",
    "resource-limit",
)


class QueryError(Exception):
    """A query failure whose message is meant to be shown to the query author."""

    def __init__(self, kind: str, message: str, span: tuple[int, int] | None = None,
                 expected: tuple[str, ...] = ()):
        assert kind in KINDS, kind
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.span = span
        self.expected = expected

    def __str__(self) -> str:
        return f"QueryError[{self.kind}]: {self.message}"
