"""Prompt assembly, LLM backends and the tool-calling session loop."""

from .backends import (BackendError, BackendProtocolError, BackendReply,
                       BackendTransportError, HttpBackend, ScriptedBackend, parse_text_action)
from .messages import (FinalText, Message, SessionResult, SessionTranscript, ToolCall,
                       count_tokens)
from .prompts import (FORCING_MESSAGE, PromptConfigError, PromptSpec, build_prompt,
                      make_spec)
from .session import DEFAULT_MAX_CALLS, Extraction, extract_answer, run_session, step

__all__ = [
    "BackendError", "BackendProtocolError", "BackendReply", "BackendTransportError",
    "DEFAULT_MAX_CALLS", "Extraction", "FORCING_MESSAGE", "FinalText", "HttpBackend",
    "Message", "PromptConfigError", "PromptSpec", "ScriptedBackend", "SessionResult",
    "SessionTranscript", "ToolCall", "build_prompt", "count_tokens", "extract_answer",
    "make_spec", "parse_text_action", "run_session", "step",
]
