"""LLM backends: a scripted replay backend and an OpenAI-compatible HTTP client."""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .messages import BackendAction, FinalText, Message, ToolCall
from .prompts import TOOL_DESCRIPTION, TOOL_NAME

log = logging.getLogger(__name__)

_FENCE = re.compile(r"```cypher\s*(.*?)```", re.DOTALL)


class BackendError(Exception):
    pass


class BackendTransportError(BackendError):
    """Network-level failure; retried before it reaches the session."""


class BackendProtocolError(BackendError):
    """The backend answered, but not with something we can act on."""


@dataclass
class BackendReply:
    action: BackendAction
    prompt_tokens: int | None = None
    completion_tokens: int | None = None


def parse_text_action(text: str) -> BackendAction:
    """Text fallback: a ```cypher fenced block is a tool call."""
    m = _FENCE.search(text)
    if m:
        return ToolCall(m.group(1).strip(), text[: m.start()].strip())
    return FinalText(text)


class ScriptedBackend:
    """Replays canned assistant outputs in order.

    A script is a list of entries: {"tool_call": q}, {"text": t}, or a bare string.
    A mapping of case id -> list gives each eval case its own script.
    """

    def __init__(self, script):
        if isinstance(script, dict):
            self.scripts = {str(k): list(v) for k, v in script.items()}
            self.entries = None
        elif isinstance(script, list):
            self.scripts = None
            self.entries = list(script)
        else:
            raise BackendProtocolError("script must be a JSON list or an object of lists")
        self.position = 0

    @classmethod
    def from_file(cls, path) -> "ScriptedBackend":
        return cls(json.loads(Path(path).read_text()))

    def for_case(self, case_id: str) -> "ScriptedBackend":
        if self.scripts is None:
            return ScriptedBackend(self.entries)
        if case_id not in self.scripts:
            raise BackendProtocolError(f"no script for case {case_id}")
        return ScriptedBackend(self.scripts[case_id])

    def complete(self, messages: list[Message], tools: bool = True) -> BackendReply:
        if self.entries is None:
            raise BackendProtocolError("per-case script: call for_case() first")
        if self.position >= len(self.entries):
            raise BackendProtocolError("script exhausted")
        entry = self.entries[self.position]
        self.position += 1
        if isinstance(entry, str):
            return BackendReply(parse_text_action(entry))
        if isinstance(entry, dict):
            if isinstance(entry.get("tool_call"), str):
                return BackendReply(ToolCall(entry["tool_call"], entry.get("text", "")))
            if isinstance(entry.get("text"), str):
                return BackendReply(parse_text_action(entry["text"]))
        raise BackendProtocolError(f"malformed script entry {self.position - 1}: {entry!r}")


def _wire_messages(messages: list[Message], native_tools: bool) -> list[dict]:
    out = []
    for m in messages:
        if m.role == "assistant" and m.tool_call is not None:
            if native_tools:
                out.append({
                    "role": "assistant",
                    "content": m.text or None,
                    "tool_calls": [{
                        "id": m.call_id,
                        "type": "function",
                        "function": {"name": TOOL_NAME,
                                     "arguments": json.dumps({"query": m.tool_call})},
                    }],
                })
            else:
                body = f"{m.text}\n```cypher\n{m.tool_call}\n```".lstrip()
                out.append({"role": "assistant", "content": body})
        elif m.role == "tool":
            if native_tools:
                out.append({"role": "tool", "tool_call_id": m.call_id, "content": m.text})
            else:
                out.append({"role": "user", "content": f"Query result:\n{m.text}"})
        else:
            out.append({"role": m.role, "content": m.text})
    return out


TOOL_SCHEMA = {
    "type": "function",
    "function": {
        "name": TOOL_NAME,
        "description": TOOL_DESCRIPTION,
        "parameters": {
            "type": "object",
            "properties": {"query": {"type": "string", "description": "Cypher query text"}},
            "required": ["query"],
        },
    },
}


class HttpBackend:
    """OpenAI-compatible chat-completions client with one tool, run_cypher."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 model: str | None = None, *, temperature: float = 0.0,
                 native_tools: bool = True, max_concurrency: int = 4, attempts: int = 3,
                 backoff: float = 1.0, timeout: float = 120.0,
                 transport: httpx.BaseTransport | None = None):
        self.base_url = (base_url or os.environ.get("SGG_API_BASE") or "").rstrip("/")
        if not self.base_url:
            raise BackendError("no API base URL (set SGG_API_BASE)")
        self.api_key = api_key if api_key is not None else os.environ.get("SGG_API_KEY")
        self.model = model or os.environ.get("SGG_MODEL")
        if not self.model:
            raise BackendError("no model name (set SGG_MODEL)")
        self.temperature = temperature
        self.native_tools = native_tools
        self.attempts = attempts
        self.backoff = backoff
        self._gate = threading.BoundedSemaphore(max_concurrency)
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def for_case(self, case_id: str) -> "HttpBackend":
        return self

    def close(self) -> None:
        self._client.close()

    def _post(self, body: dict) -> dict:
        url = f"{self.base_url}/v1/chat/completions"
        last: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                with self._gate:
                    resp = self._client.post(url, json=body)
            except httpx.TransportError as exc:
                last = exc
                log.warning("transport error (attempt %d): %s", attempt + 1, exc)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = BackendTransportError(f"HTTP {resp.status_code}")
                log.warning("server error (attempt %d): HTTP %d", attempt + 1, resp.status_code)
                continue
            if resp.status_code != 200:
                raise BackendProtocolError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()
            except ValueError:
                raise BackendProtocolError("response is not JSON") from None
        raise BackendTransportError(f"giving up after {self.attempts} attempts: {last}")

    def complete(self, messages: list[Message], tools: bool = True) -> BackendReply:
        body = {
            "model": self.model,
            "messages": _wire_messages(messages, self.native_tools),
            "temperature": self.temperature,
        }
        if tools and self.native_tools:
            body["tools"] = [TOOL_SCHEMA]
        data = self._post(body)
        try:
            msg = data["choices"][0]["message"]
        except (KeyError, IndexError, TypeError):
            raise BackendProtocolError("response has no choices[0].message") from None
        usage = data.get("usage") or {}
        calls = msg.get("tool_calls") or []
        text = msg.get("content") or ""
        if calls:
            fn = calls[0].get("function", {})
            if fn.get("name") != TOOL_NAME:
                raise BackendProtocolError(f"unknown tool {fn.get('name')!r}")
            try:
                query = json.loads(fn.get("arguments") or "{}")["query"]
            except (ValueError, KeyError, TypeError):
                raise BackendProtocolError("tool call arguments lack a query string") from None
            action: BackendAction = ToolCall(str(query), text)
        else:
            action = parse_text_action(text)
        return BackendReply(action, usage.get("prompt_tokens"), usage.get("completion_tokens"))
