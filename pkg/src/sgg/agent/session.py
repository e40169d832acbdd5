"""The tool-calling loop and answer extraction."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..cypher import Limits, run_query
from .backends import BackendError, BackendProtocolError
from .messages import (FinalText, Message, SessionResult, SessionTranscript, ToolCall,
                       count_tokens)
from .prompts import FORCING_MESSAGE, MODES, SINGLE_PHASE_TWO, PromptSpec, build_prompt

DEFAULT_MAX_CALLS = 5
READ_ONLY = Limits(read_only=True)

_ANSWER = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)


@dataclass(frozen=True)
class Extraction:
    answer: str | None
    failure: str | None = None  # "absent" | "multiple"


def extract_answer(text: str) -> Extraction:
    pairs = _ANSWER.findall(text)
    if not pairs:
        return Extraction(None, "absent")
    if len(pairs) > 1:
        return Extraction(None, "multiple")
    return Extraction(pairs[0].strip())


def step(backend, transcript: SessionTranscript, tools: bool = True):
    """Ask the backend for its next action and record it as an assistant message."""
    if transcript.messages and transcript.messages[-1].role == "assistant":
        raise BackendProtocolError("transcript must not end with an assistant message")
    transcript.backend_calls += 1
    reply = backend.complete(transcript.messages, tools)
    action = reply.action
    if reply.prompt_tokens is not None:
        transcript.reported_input_tokens = (transcript.reported_input_tokens or 0) + reply.prompt_tokens
    if isinstance(action, ToolCall):
        call_id = f"call_{transcript.backend_calls}"
        msg = Message.make("assistant", action.text, category="output",
                           tool_call=action.query, call_id=call_id,
                           tokens=reply.completion_tokens)
    else:
        msg = Message.make("assistant", action.text, category="output",
                           tokens=reply.completion_tokens)
    transcript.append(msg)
    return action


def _tool_result(graph, query: str, limits: Limits, max_rows: int) -> str:
    return run_query(graph, query, limits, max_rows)


def _finish(transcript: SessionTranscript, text: str) -> SessionResult:
    ext = extract_answer(text)
    if ext.answer is None:
        detail = ("no answer tags in final response" if ext.failure == "absent"
                  else "more than one pair of answer tags")
        transcript.outcome = f"extraction-failure: {detail}"
        return SessionResult(None, "extraction-failure", detail, transcript)
    transcript.outcome = f"answer: {ext.answer}"
    return SessionResult(ext.answer, None, "", transcript)


def _fail(transcript: SessionTranscript, detail: str) -> SessionResult:
    transcript.outcome = f"session-failure: {detail}"
    return SessionResult(None, "session-failure", detail, transcript)


def run_session(backend, graph, spec: PromptSpec, max_calls: int = DEFAULT_MAX_CALLS, *,
                mode: str = "agentic", limits: Limits = READ_ONLY,
                max_rows: int = 50) -> SessionResult:
    """Run one question or instruction to completion.

    agentic: up to max_calls tool calls, then the forcing message on the next attempt.
    single:  exactly one tool call, then a second phase with tools withdrawn.
    context: the graph is already in the prompt; no tool calls.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if max_calls < 0:
        raise ValueError("max_calls must be non-negative")
    transcript = SessionTranscript(list(build_prompt(spec)))
    try:
        if mode == "agentic":
            return _agentic(backend, graph, transcript, max_calls, limits, max_rows)
        if mode == "single":
            return _single(backend, graph, transcript, limits, max_rows)
        action = step(backend, transcript, tools=False)
        if isinstance(action, ToolCall):
            return _fail(transcript, "tool call attempted in context mode")
        return _finish(transcript, action.text)
    except BackendError as exc:
        return _fail(transcript, f"{type(exc).__name__}: {exc}")


def _agentic(backend, graph, transcript, max_calls, limits, max_rows) -> SessionResult:
    forced = False
    while True:
        action = step(backend, transcript)
        if isinstance(action, FinalText):
            return _finish(transcript, action.text)
        call_id = transcript.messages[-1].call_id
        if forced:
            return _fail(transcript, "tool call after the forcing message")
        if transcript.tool_calls < max_calls:
            transcript.tool_calls += 1
            result = _tool_result(graph, action.query, limits, max_rows)
            transcript.append(Message.make("tool", result, category="tool", call_id=call_id))
        else:
            forced = True
            transcript.append(Message.make("tool", FORCING_MESSAGE, category="input",
                                           call_id=call_id))


def _single(backend, graph, transcript, limits, max_rows) -> SessionResult:
    action = step(backend, transcript)
    if not isinstance(action, ToolCall):
        return _fail(transcript, "single-call mode expects a tool call first")
    transcript.tool_calls = 1
    result = _tool_result(graph, action.query, limits, max_rows)
    transcript.append(Message.make("tool", result, category="tool",
                                   call_id=transcript.messages[-1].call_id))
    transcript.append(Message.make("system", SINGLE_PHASE_TWO))
    action = step(backend, transcript, tools=False)
    if isinstance(action, ToolCall):
        return _fail(transcript, "second tool call in single-call mode")
    return _finish(transcript, action.text)


__all__ = ["DEFAULT_MAX_CALLS", "Extraction", "count_tokens", "extract_answer",
           "run_session", "step"]
