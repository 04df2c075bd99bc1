"""Tree-level judgments: initialization, effect commit, check, reconcile.

All four thread one tree memory value.  The path counter is threaded
explicitly so that paths allocate strictly increasing and runs replay
deterministically.
"""

from __future__ import annotations

from .domains import (
    Const, Decision, Env, Mode, TPath, Tree, TreeMemory, Value, VArray, VClos,
    VComSpec, View, format_value, fresh_path, is_view_spec,
)
from .errors import NotAViewSpec, UnknownComponent
from .evaluator import Ctx, Phase, Runtime, eval_body_retry, eval_expr


def init(rt: Runtime, mem: TreeMemory, spec: Value,
         counter: int) -> tuple[Tree, TreeMemory, int]:
    """Realize a view spec into a tree, mounting fresh views along the way."""
    if isinstance(spec, Const):
        rt.sink.rule("InitConst")
        return spec, mem, counter
    if isinstance(spec, VClos):
        rt.sink.rule("InitClos")
        return spec, mem, counter
    if isinstance(spec, VArray):
        rt.sink.rule("InitArray")
        items = []
        for item in spec.items:
            tree, mem, counter = init(rt, mem, item, counter)
            items.append(tree)
        return VArray(tuple(items)), mem, counter
    if isinstance(spec, VComSpec):
        path, counter = fresh_path(counter)
        if spec.name not in rt.defs:
            raise UnknownComponent(spec.name)
        param, body = rt.defs[spec.name]
        rt.sink.rule("InitCom", path=path, detail=spec.name)
        child_spec, view = eval_body_retry(
            rt, Phase.INIT, path, View.empty(spec),
            Env.empty().bind(param, spec.arg), body)
        if not is_view_spec(child_spec):
            raise NotAViewSpec(
                f"body of {spec.name} returned {format_value(child_spec)}")
        mem = mem.set(path, view)
        child, mem, counter = init(rt, mem, child_spec, counter)
        mounted = view.with_dec(frozenset({Decision.EFFECT})).with_child(child)
        return TPath(path), mem.set(path, mounted), counter
    raise NotAViewSpec(f"cannot initialize {format_value(spec)}")


def commit_effs(rt: Runtime, mem: TreeMemory, tree: Tree) -> TreeMemory:
    """Run queued effects depth-first post-order, child before parent."""
    if isinstance(tree, Const):
        rt.sink.rule("CommitEffsConst")
        return mem
    if isinstance(tree, VClos):
        rt.sink.rule("CommitEffsClos")
        return mem
    if isinstance(tree, VArray):
        rt.sink.rule("CommitEffsArray")
        for item in tree.items:
            mem = commit_effs(rt, mem, item)
        return mem
    assert isinstance(tree, TPath)
    view = mem.get(tree.path)
    if Decision.EFFECT not in view.dec:
        rt.sink.rule("CommitEffsPathIdle", path=tree.path)
        return commit_effs(rt, mem, view.child)
    rt.sink.rule("CommitEffsPath", path=tree.path,
                 detail=f"{len(view.effq)} effect(s)")
    mem = commit_effs(rt, mem, view.child)
    for thunk in view.effq:
        _, ctx = eval_expr(rt, Ctx.whole(mem), thunk.env, thunk.body)
        mem = ctx.mem
    # Effect is consumed; the queue is dead until the next body evaluation
    # rebuilds it, so it is emptied here to keep snapshots canonical.
    done = mem.get(tree.path).without_dec(Decision.EFFECT).with_effq(())
    return mem.set(tree.path, done)


def _join(a: Mode, b: Mode) -> Mode:
    return Mode.RENDERED if Mode.RENDERED in (a, b) else Mode.EVENT_LOOP


def check(rt: Runtime, mem: TreeMemory, tree: Tree,
          counter: int) -> tuple[Mode, TreeMemory, int]:
    """Re-examine flagged views; re-render and reconcile where state changed."""
    if isinstance(tree, Const):
        rt.sink.rule("CheckConst")
        return Mode.EVENT_LOOP, mem, counter
    if isinstance(tree, VClos):
        rt.sink.rule("CheckClos")
        return Mode.EVENT_LOOP, mem, counter
    if isinstance(tree, VArray):
        rt.sink.rule("CheckArray")
        mode = Mode.EVENT_LOOP
        for item in tree.items:
            item_mode, mem, counter = check(rt, mem, item, counter)
            mode = _join(mode, item_mode)
        return mode, mem, counter
    assert isinstance(tree, TPath)
    view = mem.get(tree.path)
    if Decision.CHECK not in view.dec:
        rt.sink.rule("CheckIdle", path=tree.path)
        return check(rt, mem, view.child, counter)
    param, body = rt.defs[view.spec.name]
    new_spec, updated = eval_body_retry(
        rt, Phase.SUCC, tree.path, view,
        Env.empty().bind(param, view.spec.arg), body)
    if Decision.EFFECT not in updated.dec:
        rt.sink.rule("CheckNoEffect", path=tree.path)
        mode, mem, counter = check(rt, mem, view.child, counter)
        return mode, mem.set(tree.path, updated), counter
    rt.sink.rule("CheckEffect", path=tree.path)
    if not is_view_spec(new_spec):
        raise NotAViewSpec(
            f"body of {view.spec.name} returned {format_value(new_spec)}")
    child, mem, counter = reconcile(rt, mem, view.child, new_spec, counter)
    return Mode.RENDERED, mem.set(tree.path, updated.with_child(child)), counter


def reconcile(rt: Runtime, mem: TreeMemory, tree: Tree, spec: Value,
              counter: int) -> tuple[Tree, TreeMemory, int]:
    """Match an existing tree against a new spec, reusing paths when the
    component name is unchanged and re-initializing otherwise."""
    if (isinstance(tree, VArray) and isinstance(spec, VArray)
            and len(tree.items) == len(spec.items)):
        rt.sink.rule("ReconcileArray")
        items = []
        for sub_tree, sub_spec in zip(tree.items, spec.items):
            new_tree, mem, counter = reconcile(rt, mem, sub_tree, sub_spec, counter)
            items.append(new_tree)
        return VArray(tuple(items)), mem, counter
    if isinstance(tree, TPath) and isinstance(spec, VComSpec):
        view = mem.get(tree.path)
        if view.spec.name == spec.name:
            rt.sink.rule("ReconcileComEffect", path=tree.path, detail=spec.name)
            param, body = rt.defs[spec.name]
            new_spec, updated = eval_body_retry(
                rt, Phase.SUCC, tree.path, view.with_spec(spec),
                Env.empty().bind(param, spec.arg), body)
            if not is_view_spec(new_spec):
                raise NotAViewSpec(
                    f"body of {spec.name} returned {format_value(new_spec)}")
            child, mem, counter = reconcile(rt, mem, view.child, new_spec, counter)
            remounted = updated.with_dec(frozenset({Decision.EFFECT})).with_child(child)
            return tree, mem.set(tree.path, remounted), counter
        rt.sink.rule("ReconcileComNew", path=tree.path,
                     detail=f"{view.spec.name} -> {spec.name}")
        return init(rt, mem, spec, counter)
    rt.sink.rule("ReconcileOther")
    return init(rt, mem, spec, counter)


def handlers(mem: TreeMemory, tree: Tree) -> list[tuple[int, VClos]]:
    """Depth-first left-to-right enumeration of every closure leaf."""
    found: list[VClos] = []

    def walk(node: Tree) -> None:
        if isinstance(node, VClos):
            found.append(node)
        elif isinstance(node, VArray):
            for item in node.items:
                walk(item)
        elif isinstance(node, TPath):
            walk(mem.get(node.path).child)

    walk(tree)
    return list(enumerate(found))
