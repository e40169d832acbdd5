"""Datasets, scoring and reports for the three pipelines."""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .agent import BackendError, make_spec, run_session
from .agent.prompts import ANSWER_KINDS, MODES
from .baseline import serialize_graph
from .goals import GoalError, goals_equivalent, parse_goal
from .sldp import SldpSemanticError, SldpSyntaxError, Tolerance, kind, parse_sldp, sldp_equal

FAILURE_CLASSES = ("wrong-answer", "extraction-failure", "session-failure", "parse-failure")


class DatasetError(ValueError):
    pass


class EvalConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EvalCase:
    id: str
    task: str
    graph: str
    input: str
    gold: str
    kind: str | None = None


@dataclass
class Outcome:
    case_id: str
    success: bool
    predicted: str | None
    failure: str | None
    tokens: tuple = (0, 0, 0)  # (I, T, O)
    tool_calls: int = 0
    detail: str = ""


@dataclass
class Report:
    mode: str
    outcomes: list[Outcome] = field(default_factory=list)
    cases: dict = field(default_factory=dict)  # case id -> (task, graph)

    def groups(self) -> dict:
        out: dict = {}
        for o in self.outcomes:
            task, graph = self.cases[o.case_id]
            out.setdefault((task, graph, self.mode), []).append(o)
        return dict(sorted(out.items()))

    @staticmethod
    def summarize(outcomes: list[Outcome]) -> dict:
        n = len(outcomes)
        succ = sum(o.success for o in outcomes)
        mean = [sum(o.tokens[i] for o in outcomes) / n if n else 0.0 for i in range(3)]
        return {"cases": n, "successes": succ, "success_rate": succ / n if n else 0.0,
                "I": mean[0], "T": mean[1], "O": mean[2]}

    @property
    def success_rate(self) -> float:
        return self.summarize(self.outcomes)["success_rate"]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "token_counts": "approximate unless the backend reported usage",
            "overall": self.summarize(self.outcomes),
            "groups": [{"task": t, "graph": g, "mode": m, **self.summarize(os)}
                       for (t, g, m), os in self.groups().items()],
            "outcomes": [asdict(o) for o in self.outcomes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_text(self) -> str:
        header = ("task", "graph", "mode", "cases", "success", "I", "T", "O")
        rows = []
        for (t, g, m), os in self.groups().items():
            s = self.summarize(os)
            rows.append((t, g, m, str(s["cases"]), f"{s['success_rate']:.3f}",
                         f"{s['I']:.0f}", f"{s['T']:.0f}", f"{s['O']:.0f}"))
        widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
        lines += [fmt.format(*r) for r in rows]
        return "\n".join(line.rstrip() for line in lines)


def case_sort_key(case_id: str) -> list:
    """Natural order, so ex2 sorts before ex10."""
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", case_id)]


def _check_gold(case: EvalCase) -> None:
    if case.task == "qa":
        if case.kind not in ANSWER_KINDS:
            raise DatasetError(f"case {case.id}: qa cases need kind in {ANSWER_KINDS}")
        value = parse_sldp(case.gold)
        if kind(value) != case.kind:
            raise DatasetError(f"case {case.id}: gold is a {kind(value)}, kind says {case.kind}")
    elif case.task == "pddl":
        parse_goal(case.gold)
    else:
        raise DatasetError(f"case {case.id}: unknown task {case.task!r}")


def load_dataset(path) -> list[EvalCase]:
    cases = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            case = EvalCase(id=str(raw["id"]), task=raw["task"], graph=raw["graph"],
                            input=raw["input"], gold=raw["gold"], kind=raw.get("kind"))
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetError(f"line {lineno}: malformed case ({exc})") from None
        if case.id in seen:
            raise DatasetError(f"line {lineno}: duplicate case id {case.id}")
        seen.add(case.id)
        try:
            _check_gold(case)
        except (SldpSyntaxError, SldpSemanticError, GoalError) as exc:
            raise DatasetError(f"case {case.id}: gold does not parse: {exc}") from None
        cases.append(case)
    return cases


def score_case(case: EvalCase, predicted: str | None, tol: Tolerance = Tolerance()) -> Outcome:
    if predicted is None:
        return Outcome(case.id, False, None, "extraction-failure")
    try:
        if case.task == "qa":
            ok = sldp_equal(parse_sldp(case.gold), parse_sldp(predicted), tol)
        else:
            ok = goals_equivalent(parse_goal(case.gold), parse_goal(predicted))
    except (SldpSyntaxError, SldpSemanticError, GoalError) as exc:
        return Outcome(case.id, False, predicted, "parse-failure", detail=str(exc))
    return Outcome(case.id, ok, predicted, None if ok else "wrong-answer")


def run_case(case: EvalCase, graph, mode: str, backend, max_calls: int,
             tol: Tolerance = Tolerance(), serialization: str | None = None) -> Outcome:
    spec = make_spec(case.task, graph.labelspace, case.input, mode=mode,
                     answer_kind=case.kind, max_calls=max_calls, serialization=serialization)
    try:
        case_backend = backend.for_case(case.id)
    except BackendError as exc:
        return Outcome(case.id, False, None, "session-failure", detail=str(exc))
    result = run_session(case_backend, graph, spec, max_calls, mode=mode)
    tr = result.transcript
    tokens = (tr.input_tokens, tr.tool_tokens, tr.output_tokens)
    if result.failure:
        out = Outcome(case.id, False, None, result.failure, detail=result.detail)
    else:
        out = score_case(case, result.answer, tol)
    out.tokens = tokens
    out.tool_calls = tr.tool_calls
    return out


def run_eval(graphs: dict, dataset: list[EvalCase], mode: str, backend,
             max_calls: int = 5, *, workers: int = 4, tol: Tolerance = Tolerance()) -> Report:
    """Run every case; graphs maps graph id -> PropertyGraph."""
    if mode not in MODES:
        raise EvalConfigError(f"unknown mode {mode!r}")
    missing = sorted({c.graph for c in dataset} - set(graphs))
    if missing:
        raise EvalConfigError(f"dataset references unknown graph(s): {', '.join(missing)}")
    serial = {}
    if mode == "context":
        serial = {gid: serialize_graph(graphs[gid]) for gid in {c.graph for c in dataset}}

    def one(case: EvalCase) -> Outcome:
        return run_case(case, graphs[case.graph], mode, backend, max_calls, tol,
                        serial.get(case.graph))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(one, dataset))
    outcomes.sort(key=lambda o: case_sort_key(o.case_id))
    return Report(mode, outcomes, {c.id: (c.task, c.graph) for c in dataset})
