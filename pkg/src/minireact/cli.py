"""Command-line front end.

Subcommands: `run` a program to idle, `trace` it to a trace file, `serve`
the JSON-lines session protocol on standard streams, `conform` the
scenario matrix, and `check` a program against the invariant suites.
Exit status: 0 success, 1 engine error or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine import Budgets, Engine
from .errors import EngineError, LangError
from .oracle import (
    InapplicableImpureUpdates, check_similar_transition,
    check_theorem_effect_condition, check_theorem_reeval,
)
from .corpus import generate_program, run_all_scenarios
from .session import serve
from .syntax import parse_program
from .trace import serialize
from . import trace_checks


def _parse_events(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(part) for part in text.split(";") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--events wants semicolon-separated handler indices, got {text!r}")


def _budgets(args: argparse.Namespace) -> Budgets:
    return Budgets(retry_limit=args.retry_limit,
                   rerender_limit=args.rerender_limit)


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--retry-limit", type=int, default=25,
                        help="body re-evaluation passes before RetryLimitExceeded")
    parser.add_argument("--rerender-limit", type=int, default=100,
                        help="render cycles before RerenderLimitExceeded")


def _run_engine(path: str, budgets: Budgets, events: list[int]) -> Engine:
    source = Path(path).read_text(encoding="utf-8")
    engine = Engine(parse_program(source), budgets=budgets, source=source)
    engine.run_events(events)
    return engine


def cmd_run(args: argparse.Namespace) -> int:
    budgets = _budgets(args)
    try:
        engine = _run_engine(args.file, budgets, _parse_events(args.events))
    except LangError as err:
        if isinstance(err, EngineError):
            print(f"error: {err} (retry limit {budgets.retry_limit}, "
                  f"rerender limit {budgets.rerender_limit})", file=sys.stderr)
        else:
            print(f"error: {err}", file=sys.stderr)
        return 1
    for line in engine.console():
        print(line)
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    budgets = _budgets(args)
    source = Path(args.file).read_text(encoding="utf-8")
    engine = Engine(parse_program(source), budgets=budgets, source=source)
    status = 0
    try:
        engine.run_events(_parse_events(args.events))
    except EngineError as err:
        print(f"error: {err}", file=sys.stderr)
        status = 1
    Path(args.output).write_bytes(serialize(engine.trace_file()))
    print(f"wrote {args.output} ({len(engine.sink.steps)} steps)",
          file=sys.stderr)
    return status


def cmd_serve(args: argparse.Namespace) -> int:
    serve(budgets=_budgets(args))
    return 0


def cmd_conform(args: argparse.Namespace) -> int:
    results = run_all_scenarios()
    width = max(len(r.scenario.name) for r in results)
    failed = 0
    for result in results:
        mark = "pass" if result.passed else "FAIL"
        print(f"{result.scenario.row:>3}  {result.scenario.name:<{width}}  {mark}")
        for failure in result.failures:
            print(f"     - {failure}")
        failed += 0 if result.passed else 1
    print(f"{len(results) - failed}/{len(results)} scenarios pass")
    if args.check_invariants:
        bad = 0
        for i in range(args.corpus_size):
            item = generate_program(args.corpus_seed + i)
            ok, messages = trace_checks.check_generated(item)
            if not ok:
                bad += 1
                print(f"corpus item {i}: " + "; ".join(messages))
        print(f"{args.corpus_size - bad}/{args.corpus_size} corpus items pass")
        failed += bad
    return 1 if failed else 0


def cmd_check(args: argparse.Namespace) -> int:
    budgets = _budgets(args)
    source = Path(args.file).read_text(encoding="utf-8")
    engine = Engine(parse_program(source), budgets=budgets, source=source)
    status = 0
    try:
        engine.run_events(_parse_events(args.events))
    except EngineError as err:
        print(f"run: error {err}")
    else:
        print(f"run: idle after {len(engine.sink.steps)} steps, "
              f"{engine.renders} render(s)")
    trace = engine.trace_file()
    suites = [
        ("validity after every transition",
         trace_checks.validity_along_trace(engine)),
        ("coherence at every Check-mode entry",
         trace_checks.coherence_along_trace(engine)),
        ("setter-during-render forces re-check (thm: re-evaluation)",
         check_theorem_reeval(trace)),
        ("effect execution condition (thm: effect iff state change)",
         check_theorem_effect_condition(trace)),
    ]
    for name, ok in suites:
        print(f"{'pass' if ok else 'FAIL'}  {name}")
        status |= 0 if ok else 1
    try:
        ok = check_similar_transition(source, _parse_events(args.events),
                                      budgets=budgets)
        print(f"{'pass' if ok else 'FAIL'}  similar memories step alike "
              f"(thm: similar transitions)")
        status |= 0 if ok else 1
    except InapplicableImpureUpdates:
        print("skip  similar transitions (impure queued updates)")
    except EngineError:
        print("skip  similar transitions (run does not reach a check state)")
    return status


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="minireact",
        description="A miniature React-hooks render engine: run programs, "
                    "record traces, serve the visualizer protocol, and check "
                    "conformance.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a program to idle")
    p_run.add_argument("file")
    p_run.add_argument("--events", default="",
                       help='semicolon-separated handler indices, e.g. "0;0;1"')
    _add_budget_flags(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_trace = sub.add_parser("trace", help="execute and write a trace file")
    p_trace.add_argument("file")
    p_trace.add_argument("-o", "--output", required=True)
    p_trace.add_argument("--events", default="")
    _add_budget_flags(p_trace)
    p_trace.set_defaults(fn=cmd_trace)

    p_serve = sub.add_parser("serve", help="serve the session protocol on stdio")
    _add_budget_flags(p_serve)
    p_serve.set_defaults(fn=cmd_serve)

    p_conform = sub.add_parser("conform", help="run the scenario matrix")
    p_conform.add_argument("--check-invariants", action="store_true",
                           help="also run the generated-program theorem suites")
    p_conform.add_argument("--corpus-seed", "--seed", type=int, default=0,
                           dest="corpus_seed")
    p_conform.add_argument("--corpus-size", type=int, default=100)
    p_conform.set_defaults(fn=cmd_conform)

    p_check = sub.add_parser("check",
                             help="run a program plus the invariant suites")
    p_check.add_argument("file")
    p_check.add_argument("--events", default="")
    _add_budget_flags(p_check)
    p_check.set_defaults(fn=cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except LangError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
