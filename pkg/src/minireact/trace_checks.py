"""Invariant suites evaluated over recorded runs.

These work on trace snapshots (the serialized form), so they apply equally
to live engines, trace files, and the generated-program corpus.
"""

from __future__ import annotations

from .corpus import GeneratedProgram
from .engine import Budgets, Engine
from .errors import EngineError
from .oracle import (
    InapplicableImpureUpdates, check_similar_transition,
    check_theorem_effect_condition, check_theorem_reeval,
)
from .syntax import collect_labels, parse_program
from .trace import reachable_paths_of_snapshot


def snapshot_valid(snapshot: dict, defs: dict) -> bool:
    """Each view's store domain equals the label set of its body."""
    for view in snapshot.get("views", {}).values():
        name = view["spec"]["name"]
        if name not in defs:
            return False
        wanted = {str(label) for label in collect_labels(defs[name][1])}
        if set(view["sttst"].keys()) != wanted:
            return False
    return True


def snapshot_coherent(snapshot: dict) -> bool:
    """Check flag agrees with queue emptiness on every reachable view."""
    views = snapshot.get("views", {})
    for path in reachable_paths_of_snapshot(snapshot):
        view = views[path]
        queued = any(entry["sttq_len"] > 0 for entry in view["sttst"].values())
        if ("Check" in view["dec"]) != queued:
            return False
    return True


def validity_along_trace(engine: Engine) -> bool:
    return all(snapshot_valid(step.snapshot, engine.defs)
               for step in engine.sink.steps if step.snapshot is not None)


def coherence_along_trace(engine: Engine) -> bool:
    """Coherence is demanded at every entry into Check mode."""
    return all(snapshot_coherent(step.snapshot)
               for step in engine.sink.steps
               if step.snapshot is not None and step.snapshot["mode"] == "Check")


def check_generated(item: GeneratedProgram,
                    budgets: Budgets = Budgets()) -> tuple[bool, list[str]]:
    """Run one generated program and evaluate every applicable suite."""
    messages: list[str] = []
    engine = Engine(parse_program(item.source), budgets=budgets,
                    source=item.source)
    error = None
    try:
        engine.run_events(list(item.events))
    except EngineError as err:
        error = err
    trace = engine.trace_file()
    if not validity_along_trace(engine):
        messages.append("validity violated")
    if not coherence_along_trace(engine):
        messages.append("coherence violated")
    if not check_theorem_reeval(trace):
        messages.append("re-evaluation theorem violated")
    if not check_theorem_effect_condition(trace):
        messages.append("effect execution condition violated")
    if error is None and item.all_pure:
        try:
            if not check_similar_transition(item.source, list(item.events),
                                            budgets=budgets):
                messages.append("similar-transition theorem violated")
        except InapplicableImpureUpdates:
            pass
    return (not messages, messages)
