"""Executable meta-theory: purity, normalization, similarity, validity,
coherence, stability, and the two conformance theorems as trace checkers.

Purity is a sound syntactic approximation: a closure may be reported
impure even when it is semantically pure.  Checks that require purity
therefore skip (raise InapplicableImpureUpdates) instead of mis-certifying.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Optional

from .domains import (
    Const, Decision, Env, Mode, Phase, StateEntry, TPath, Tree, TreeMemory,
    Value, VArray, VClos, VComSpec, VCompName, VSetter, View, value_equiv,
)
from .engine import Budgets, Engine
from .errors import InapplicableImpureUpdates
from .evaluator import Ctx, Runtime, eval_expr
from .syntax import (
    AppE, ArrayE, BinopE, BoolE, CompNameE, CondE, Expr, FnE, IntE, LetE,
    SeqE, StrE, UnitE, VarE, collect_labels, parse_program,
)
from .trace import TraceSink

# Closure ids allocated while folding pure updates; kept far away from the
# ids any engine run can allocate so identities never collide.
_NORMALIZE_IDS = itertools.count(2 ** 40)


# -- purity ------------------------------------------------------------------

def _pure_expr(e: Expr) -> bool:
    if isinstance(e, (UnitE, BoolE, IntE, StrE, VarE, CompNameE)):
        return True
    if isinstance(e, BinopE):
        return _pure_expr(e.left) and _pure_expr(e.right)
    if isinstance(e, CondE):
        return _pure_expr(e.cond) and _pure_expr(e.then) and _pure_expr(e.other)
    if isinstance(e, FnE):
        return True
    if isinstance(e, SeqE):
        return _pure_expr(e.first) and _pure_expr(e.second)
    if isinstance(e, LetE):
        return _pure_expr(e.value) and _pure_expr(e.body)
    if isinstance(e, ArrayE):
        return all(_pure_expr(item) for item in e.items)
    if isinstance(e, AppE):
        # only applications of literal lambdas are provably side-effect free
        return (isinstance(e.fn, FnE) and _pure_expr(e.fn.body)
                and _pure_expr(e.arg))
    return False  # print, hooks, and anything unrecognized


def is_pure(clos: VClos) -> bool:
    """True only if applying the closure can never touch the context."""
    return _pure_expr(clos.body)


def _apply_pure(clos: VClos, arg: Value) -> Value:
    rt = Runtime({}, TraceSink())
    rt._clos_counter = next(_NORMALIZE_IDS)
    value, ctx = eval_expr(rt, Ctx.whole(TreeMemory.empty()),
                           clos.env.bind(clos.param, arg), clos.body)
    assert len(ctx.mem) == 0, "pure update touched the context"
    return value


# -- normalization and similarity ---------------------------------------------

@dataclass(frozen=True)
class NormalizedEntry:
    """A state entry with its pure update prefix folded in."""

    val: Value
    sttq: tuple
    decisions: frozenset


def normalize_entry(entry: StateEntry) -> NormalizedEntry:
    queue = entry.sttq
    prefix = 0
    while prefix < len(queue) and is_pure(queue[prefix]):
        prefix += 1
    value = entry.val
    for updater in queue[:prefix]:
        value = _apply_pure(updater, value)
    suffix = queue[prefix:]
    if suffix:
        decisions = frozenset({Decision.CHECK})
    elif not value_equiv(entry.val, value):
        decisions = frozenset({Decision.CHECK, Decision.EFFECT})
    else:
        decisions = frozenset()
    return NormalizedEntry(val=value, sttq=suffix, decisions=decisions)


def normalize_view(view: View) -> View:
    """Fold each entry's pure update prefix into its value and install the
    entries' decision contributions.

    A Check left with no queued update to justify it (and no pending
    Effect) is dropped, which keeps normalization idempotent.
    """
    normalized = [(label, normalize_entry(entry)) for label, entry in view.sttst]
    contributions: frozenset = frozenset()
    for _, ne in normalized:
        contributions |= ne.decisions
    dec = view.dec | contributions
    sttst = tuple((label, StateEntry(ne.val, ne.sttq)) for label, ne in normalized)
    if all(not entry.sttq for _, entry in sttst) and Decision.EFFECT not in dec:
        dec = dec - {Decision.CHECK}
    return replace(view, sttst=sttst, dec=dec)


def _queues_equal(a: tuple, b: tuple, struct: bool) -> bool:
    if len(a) != len(b):
        return False
    cmp = values_struct_eq if struct else value_equiv
    return all(cmp(x, y) for x, y in zip(a, b))


def trees_equal(a: Tree, b: Tree, struct: bool = False) -> bool:
    if isinstance(a, TPath) and isinstance(b, TPath):
        return a.path == b.path
    if isinstance(a, VArray) and isinstance(b, VArray):
        return len(a.items) == len(b.items) and all(
            trees_equal(x, y, struct) for x, y in zip(a.items, b.items))
    if isinstance(a, (TPath, VArray)) or isinstance(b, (TPath, VArray)):
        return False
    return values_struct_eq(a, b) if struct else value_equiv(a, b)


def views_equal(a: View, b: View, struct: bool = False,
                ignore_dead_effq: bool = False) -> bool:
    cmp = values_struct_eq if struct else value_equiv
    if a.dec != b.dec:
        return False
    if a.spec.name != b.spec.name or not cmp(a.spec.arg, b.spec.arg):
        return False
    if a.labels() != b.labels():
        return False
    for (_, ea), (_, eb) in zip(a.sttst, b.sttst):
        if not cmp(ea.val, eb.val):
            return False
        if not _queues_equal(ea.sttq, eb.sttq, struct):
            return False
    if not trees_equal(a.child, b.child, struct):
        return False
    if ignore_dead_effq and Decision.EFFECT not in a.dec:
        return True  # both queues are dead: cleared before the next evaluation
    return _queues_equal(a.effq, b.effq, struct)


def views_similar(a: View, b: View) -> bool:
    """Equal after normalization."""
    return views_equal(normalize_view(a), normalize_view(b))


def values_struct_eq(a: Value, b: Value) -> bool:
    """Structural equality that looks through closure identities, comparing
    them by parameter, body, and captured environment instead."""
    if isinstance(a, VClos) and isinstance(b, VClos):
        if a is b:
            return True
        if a.param != b.param or a.body != b.body:
            return False
        items_a, items_b = a.env.items(), b.env.items()
        if len(items_a) != len(items_b):
            return False
        return all(na == nb and values_struct_eq(va, vb)
                   for (na, va), (nb, vb) in zip(items_a, items_b))
    if isinstance(a, VComSpec) and isinstance(b, VComSpec):
        return a.name == b.name and values_struct_eq(a.arg, b.arg)
    if isinstance(a, VArray) and isinstance(b, VArray):
        return len(a.items) == len(b.items) and all(
            values_struct_eq(x, y) for x, y in zip(a.items, b.items))
    if isinstance(a, Const) and isinstance(b, Const):
        return a == b
    if isinstance(a, (VSetter, VCompName)) and isinstance(b, (VSetter, VCompName)):
        return a == b
    return False


# -- reachability and memory similarity ------------------------------------------

def reachable(mem: TreeMemory, tree: Tree) -> set[int]:
    seen: set[int] = set()

    def walk(node: Tree) -> None:
        if isinstance(node, TPath):
            if node.path not in seen and mem.contains(node.path):
                seen.add(node.path)
                walk(mem.get(node.path).child)
        elif isinstance(node, VArray):
            for item in node.items:
                walk(item)

    walk(tree)
    return seen


def mems_similar(a: TreeMemory, b: TreeMemory, tree: Tree) -> bool:
    """Reachable views similar, every other view exactly equal."""
    if set(a.paths()) != set(b.paths()):
        return False
    live = reachable(a, tree)
    for path in a.paths():
        if path in live:
            if not views_similar(a.get(path), b.get(path)):
                return False
        elif not views_equal(a.get(path), b.get(path)):
            return False
    return True


# -- validity, coherence, stability ------------------------------------------------

def check_validity(mem: TreeMemory, defs: dict[str, tuple[str, Expr]]) -> bool:
    """Every view's store domain equals the label set of its body."""
    for _, view in mem.items():
        if view.spec.name not in defs:
            return False
        _, body = defs[view.spec.name]
        if set(view.labels()) != set(collect_labels(body)):
            return False
    return True


def check_coherence(mem: TreeMemory, tree: Tree) -> bool:
    """Check flag agrees with queue emptiness on every reachable view."""
    for path in reachable(mem, tree):
        view = mem.get(path)
        queued = any(entry.sttq for _, entry in view.sttst)
        if (Decision.CHECK in view.dec) != queued:
            return False
    return True


def check_stability(view: View, defs: dict[str, tuple[str, Expr]],
                    path: int = 0) -> bool:
    """One body evaluation (Check removed, effects cleared) reproduces the
    view.  The re-collected effect queue is excluded from the comparison:
    it is a deterministic function of the fields that are compared."""
    param, body = defs[view.spec.name]
    rt = Runtime(defs, TraceSink())
    rt._clos_counter = next(_NORMALIZE_IDS)
    base = view.without_dec(Decision.CHECK).with_effq(())
    _, ctx = eval_expr(rt, Ctx.local(Phase.SUCC, path, base),
                       Env.empty().bind(param, view.spec.arg), body)
    result = ctx.view
    return views_equal(result.with_effq(()), base, struct=True)


def views_e_equivalent(a: View, b: View, body: Expr) -> bool:
    """Stores agree on every label occurring in `body`."""
    for label in collect_labels(body):
        if a.has_state(label) != b.has_state(label):
            return False
        if not a.has_state(label):
            continue
        ea, eb = a.state(label), b.state(label)
        if not values_struct_eq(ea.val, eb.val):
            return False
        if not _queues_equal(ea.sttq, eb.sttq, struct=True):
            return False
    return True


# -- theorem checkers over traces -----------------------------------------------

def check_theorem_reeval(trace: dict) -> bool:
    """Every body-evaluation pass that fired AppSetComp ends re-checking:
    its pass marker must be EvalMult (Check present), never EvalOnce."""
    for step in trace["steps"]:
        pending = 0
        for record in step["rules"]:
            rule = record["rule"]
            if rule == "AppSetComp":
                pending += 1
            elif rule == "EvalMult":
                pending = 0
            elif rule == "EvalOnce":
                if pending:
                    return False
                pending = 0
    return True


def _state_differs(path: str, before: dict, after: dict) -> bool:
    vb = before["views"].get(path)
    va = after["views"].get(path)
    if vb is None or va is None:
        return False
    labels = set(vb["sttst"]) | set(va["sttst"])
    for label in labels:
        eb = vb["sttst"].get(label)
        ea = va["sttst"].get(label)
        if eb is None or ea is None or eb["val"] != ea["val"]:
            return True
    return False


def check_theorem_effect_condition(trace: dict) -> bool:
    """Across each Check-mode transition, a reachable view carries Effect
    iff its own or an ancestor's state changed, or its own or an ancestor's
    body derivation fired AppSetComp."""
    steps = trace["steps"]
    for index, step in enumerate(steps):
        if step["transition"] != "StepCheck" or index == 0:
            continue
        before = steps[index - 1]["snapshot"]
        after = step["snapshot"]
        if before is None or after is None:
            continue
        appset = {str(r["path"]) for r in step["rules"]
                  if r["rule"] == "AppSetComp" and r["path"] is not None}
        views = after["views"]
        holds = True

        def walk(node, chain: tuple) -> None:
            nonlocal holds
            if isinstance(node, list):
                for item in node:
                    walk(item, chain)
            elif isinstance(node, dict) and node.get("kind") == "path":
                key = str(node["path"])
                if key not in views:
                    return
                lineage = chain + (key,)
                has_effect = "Effect" in views[key]["dec"]
                condition = any(
                    _state_differs(q, before, after) or q in appset
                    for q in lineage)
                if has_effect != condition:
                    holds = False
                walk(views[key]["child"], lineage)

        walk(after["root"], ())
        if not holds:
            return False
    return True


# -- similar transitions ---------------------------------------------------------

def _drive_to_check(engine: Engine, events: Optional[list[int]]) -> None:
    if events:
        engine.run_until_idle()
        for event in events[:-1]:
            engine.dispatch(event)
            engine.run_until_idle()
        engine.dispatch(events[-1])
    else:
        engine.boot()
        engine.step()
    assert engine.cfg is not None and engine.cfg.mode == Mode.CHECK


def _configs_equal(a: Engine, b: Engine) -> bool:
    ca, cb = a.cfg, b.cfg
    if ca.mode != cb.mode or not trees_equal(ca.root, cb.root, struct=True):
        return False
    if set(ca.mem.paths()) != set(cb.mem.paths()):
        return False
    return all(
        views_equal(ca.mem.get(p), cb.mem.get(p), struct=True,
                    ignore_dead_effq=True)
        for p in ca.mem.paths())


def check_similar_transition(source: str, events: Optional[list[int]] = None,
                             budgets: Budgets = Budgets()) -> bool:
    """Drive two identical runs to a Check-mode state, normalize the second
    run's reachable views, and confirm one more step agrees on everything
    (closure identities aside, which necessarily drift)."""
    program = parse_program(source)
    plain = Engine(program, budgets=budgets)
    folded = Engine(program, budgets=budgets)
    _drive_to_check(plain, events)
    _drive_to_check(folded, events)

    cfg = folded.cfg
    for path in reachable(cfg.mem, cfg.root):
        view = cfg.mem.get(path)
        for _, entry in view.sttst:
            for updater in entry.sttq:
                if not is_pure(updater):
                    raise InapplicableImpureUpdates(
                        f"impure queued update on view {path}")
    mem = cfg.mem
    for path in reachable(cfg.mem, cfg.root):
        mem = mem.set(path, normalize_view(cfg.mem.get(path)))
    folded.cfg = replace(cfg, mem=mem)

    plain.step()
    folded.step()
    return _configs_equal(plain, folded)
