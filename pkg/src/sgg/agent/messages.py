"""Chat messages, backend actions and session transcripts."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

ROLES = ("system", "user", "assistant", "tool")
# token categories: I (prompt and control text), T (tool results), O (model output)
CATEGORIES = ("input", "tool", "output")


def count_tokens(text: str) -> int:
    """Approximate tokens as ceil(utf-8 bytes / 4)."""
    return math.ceil(len(text.encode("utf-8")) / 4)


@dataclass
class Message:
    role: str
    text: str
    tokens: int
    category: str
    tool_call: str | None = None
    call_id: str | None = None

    @classmethod
    def make(cls, role: str, text: str, *, category: str | None = None,
             tool_call: str | None = None, call_id: str | None = None,
             tokens: int | None = None) -> "Message":
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if category is None:
            category = "input"
        if tokens is None:
            tokens = count_tokens(text) + (count_tokens(tool_call) if tool_call else 0)
        return cls(role, text, tokens, category, tool_call, call_id)


@dataclass(frozen=True)
class ToolCall:
    query: str
    text: str = ""


@dataclass(frozen=True)
class FinalText:
    text: str


BackendAction = ToolCall | FinalText


@dataclass
class SessionTranscript:
    messages: list[Message] = field(default_factory=list)
    tool_calls: int = 0
    backend_calls: int = 0
    outcome: str | None = None
    # usage numbers reported by the backend, when it reports any
    reported_input_tokens: int | None = None

    def append(self, msg: Message) -> None:
        self.messages.append(msg)

    def _total(self, category: str) -> int:
        return sum(m.tokens for m in self.messages if m.category == category)

    @property
    def input_tokens(self) -> int:
        return self._total("input")

    @property
    def tool_tokens(self) -> int:
        return self._total("tool")

    @property
    def output_tokens(self) -> int:
        return self._total("output")

    def to_dict(self) -> dict:
        return {
            "messages": [asdict(m) for m in self.messages],
            "tokens": {"I": self.input_tokens, "T": self.tool_tokens, "O": self.output_tokens},
            "reported_input_tokens": self.reported_input_tokens,
            "tool_calls": self.tool_calls,
            "backend_calls": self.backend_calls,
            "outcome": self.outcome,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


@dataclass
class SessionResult:
    answer: str | None
    failure: str | None  # "extraction-failure" | "session-failure"
    detail: str
    transcript: SessionTranscript

    @property
    def ok(self) -> bool:
        return self.failure is None
