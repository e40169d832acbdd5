"""Command-line entry point: ingest, query, ask, eval, check, serialize."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .agent import BackendError, HttpBackend, PromptConfigError, ScriptedBackend, make_spec, run_session
from .agent.prompts import ANSWER_KINDS, MODES
from .baseline import serialize_graph
from .cypher import DEFAULT_MAX_ROWS, Limits, answer_query
from .evalharness import DatasetError, EvalConfigError, load_dataset, run_eval
from .goals import GoalError, check_grounding, goals_equivalent, parse_goal
from .scene_graph import LAYERS, SceneGraphError, load_graph_file, validate
from .sldp import SldpSemanticError, SldpSyntaxError, Tolerance, parse_sldp, sldp_equal

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _load(path: str):
    try:
        return load_graph_file(path)
    except OSError as exc:
        raise CliError("io", f"{path}: {exc.strerror}") from None
    except SceneGraphError as exc:
        raise CliError("graph", f"{path}: {exc}") from None


def _backend(parser: argparse.ArgumentParser, values: list[str] | None):
    if not values:
        parser.error("--backend is required (scripted:<path> or http)")
    if len(values) > 1:
        parser.error("exactly one --backend may be given")
    value = values[0]
    try:
        if value == "http":
            return HttpBackend()
        if value.startswith("scripted:"):
            return ScriptedBackend.from_file(value[len("scripted:"):])
    except OSError as exc:
        raise CliError("io", f"{value}: {exc.strerror}") from None
    except (ValueError, BackendError) as exc:
        raise CliError("backend", str(exc)) from None
    parser.error(f"unknown backend {value!r} (use scripted:<path> or http)")


def cmd_ingest(args, parser) -> int:
    graph = _load(args.graph)
    counts = ", ".join(f"{len(graph.symbols(layer))} {layer}" for layer in LAYERS)
    print(f"loaded {len(graph)} nodes ({counts}), {len(graph.edges)} edges")
    if not args.validate:
        return EXIT_OK
    report = validate(graph)
    for v in report.violations:
        print(f"violation[{v.rule}]: {v.message}")
    print(f"validation: {report.verdict}")
    if not report.passed:
        raise CliError("validation", f"{len(report.violations)} violation(s)")
    return EXIT_OK


def _run_one(graph, text: str, limits: Limits, max_rows: int):
    """Shared by the REPL and -e: print the rendered result, return any error."""
    out, err = answer_query(graph, text, limits, max_rows)
    print(out, flush=True)
    return err


def cmd_query(args, parser) -> int:
    graph = _load(args.graph)
    limits = Limits(read_only=not args.allow_writes)
    if args.execute is not None:
        err = _run_one(graph, args.execute, limits, args.max_rows)
        if err is not None:
            raise CliError(f"query-{err.kind}", err.message)
        return EXIT_OK
    interactive = sys.stdin.isatty()
    while True:
        try:
            line = input("cypher> ") if interactive else sys.stdin.readline()
        except EOFError:
            break
        if not interactive and line == "":
            break
        line = line.strip().rstrip(";").strip()
        if not line:
            continue
        if line in (":q", ":quit", "exit"):
            break
        _run_one(graph, line, limits, args.max_rows)
    return EXIT_OK


def cmd_ask(args, parser) -> int:
    backend = _backend(parser, args.backend)
    graph = _load(args.graph)
    if args.task == "qa" and args.kind is None:
        parser.error("--kind is required for --task qa")
    serialization = serialize_graph(graph) if args.mode == "context" else None
    try:
        spec = make_spec(args.task, graph.labelspace, args.input, mode=args.mode,
                         answer_kind=args.kind, max_calls=args.max_calls,
                         serialization=serialization)
    except PromptConfigError as exc:
        raise CliError("config", str(exc)) from None
    result = run_session(backend, graph, spec, args.max_calls, mode=args.mode,
                         limits=Limits(read_only=not args.allow_writes))
    if args.transcript:
        Path(args.transcript).write_text(result.transcript.to_json() + "\n")
    tr = result.transcript
    print(f"tool calls: {tr.tool_calls}  tokens I={tr.input_tokens} T={tr.tool_tokens} "
          f"O={tr.output_tokens}", file=sys.stderr)
    if not result.ok:
        raise CliError(result.failure, result.detail)
    print(result.answer)
    if args.task == "pddl":
        try:
            for issue in check_grounding(parse_goal(result.answer), graph):
                print(f"warning: {issue}", file=sys.stderr)
        except GoalError as exc:
            print(f"warning: answer does not parse as a goal: {exc}", file=sys.stderr)
    return EXIT_OK


def _graph_arg(text: str) -> tuple[str, str]:
    name, sep, path = text.partition("=")
    if sep:
        return name, path
    return Path(text).stem, text


def cmd_eval(args, parser) -> int:
    backend = _backend(parser, args.backend)
    graphs = {}
    for item in args.graphs:
        name, path = _graph_arg(item)
        graphs[name] = _load(path)
    try:
        dataset = load_dataset(args.dataset)
    except OSError as exc:
        raise CliError("io", f"{args.dataset}: {exc.strerror}") from None
    except DatasetError as exc:
        raise CliError("dataset", str(exc)) from None
    try:
        report = run_eval(graphs, dataset, args.mode, backend, args.max_calls,
                          workers=args.workers, tol=Tolerance(args.epsilon, args.delta))
    except EvalConfigError as exc:
        raise CliError("config", str(exc)) from None
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    print(report.to_text())
    return EXIT_OK


def cmd_check(args, parser) -> int:
    try:
        if args.task == "qa":
            same = sldp_equal(parse_sldp(args.gold), parse_sldp(args.pred),
                              Tolerance(args.epsilon, args.delta))
            print("equal" if same else "not equal")
        else:
            same = goals_equivalent(parse_goal(args.gold), parse_goal(args.pred))
            print("equivalent" if same else "not equivalent")
    except (SldpSyntaxError, SldpSemanticError, GoalError) as exc:
        raise CliError("parse", str(exc)) from None
    return EXIT_OK if same else EXIT_FAIL


def cmd_serialize(args, parser) -> int:
    print(serialize_graph(_load(args.graph)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sgg", description="Query 3D scene graphs with Cypher and evaluate LLM agents.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log backend retries and other details")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a graph and optionally validate it")
    p.add_argument("graph")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(func=cmd_ingest, subparser=p)

    p = sub.add_parser("query", help="run Cypher queries (REPL when -e is absent)")
    p.add_argument("graph")
    p.add_argument("-e", "--execute", metavar="QUERY")
    p.add_argument("--max-rows", type=int, default=DEFAULT_MAX_ROWS)
    p.add_argument("--allow-writes", action="store_true", help="permit SET clauses")
    p.set_defaults(func=cmd_query, subparser=p)

    def session_flags(p):
        p.add_argument("--backend", action="append", metavar="scripted:<path>|http")
        p.add_argument("--mode", choices=MODES, default="agentic")
        p.add_argument("--max-calls", type=int, default=5)

    def tolerance_flags(p):
        p.add_argument("--epsilon", type=float, default=0.01)
        p.add_argument("--delta", type=float, default=0.01)

    p = sub.add_parser("ask", help="run one question or instruction through the agent")
    p.add_argument("graph")
    p.add_argument("--task", choices=("qa", "pddl"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=ANSWER_KINDS, help="expected SLDP answer kind (qa)")
    p.add_argument("--transcript", metavar="PATH")
    p.add_argument("--allow-writes", action="store_true")
    session_flags(p)
    p.set_defaults(func=cmd_ask, subparser=p)

    p = sub.add_parser("eval", help="run a dataset and write a report")
    p.add_argument("graphs", nargs="+", metavar="[NAME=]GRAPH")
    p.add_argument("--dataset", required=True)
    p.add_argument("--report", metavar="PATH")
    p.add_argument("--workers", type=int, default=4)
    session_flags(p)
    tolerance_flags(p)
    p.set_defaults(func=cmd_eval, subparser=p)

    p = sub.add_parser("check", help="compare a predicted answer with a gold answer")
    p.add_argument("--task", choices=("qa", "pddl"), required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    tolerance_flags(p)
    p.set_defaults(func=cmd_check, subparser=p)

    p = sub.add_parser("serialize", help="print the context-window serialization")
    p.add_argument("graph")
    p.set_defaults(func=cmd_serialize, subparser=p)
    return ap


def _one_line(exc: Exception) -> str:
    return " ".join(str(exc).split())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, args.subparser)
    except CliError as exc:
        print(f"error[{exc.kind}]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error[value]: {_one_line(exc)}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
