"""Scripted sessions shared by the agent tests and the acceptance suite."""

from sgg.agent import ScriptedBackend, make_spec, run_session

COUNT_QUERY = "MATCH (o:Object) RETURN count(o)"
QUESTION = "How many objects are in the scene?"


def calls_script(attempts: int, answer: str = "8") -> list:
    """attempts tool calls, then the final answer."""
    return [{"tool_call": COUNT_QUERY, "text": f"Call {i + 1}."} for i in range(attempts)] + [
        {"text": f"<answer>{answer}</answer>"}]


ERROR_THEN_CORRECTION = [
    {"tool_call": "MATCH (o:Objects) RETURN count(o)", "text": "Counting objects."},
    {"tool_call": COUNT_QUERY, "text": "The label is Object; retrying."},
    {"text": "There are eight objects. <answer>8</answer>"},
]


def qa_session(graph, script, max_calls: int = 5, mode: str = "agentic"):
    spec = make_spec("qa", graph.labelspace, QUESTION, mode=mode, answer_kind="number",
                     max_calls=max_calls)
    return run_session(ScriptedBackend(script), graph, spec, max_calls, mode=mode)
