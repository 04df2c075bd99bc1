"""Big-step expression evaluation and retrying component-body evaluation.

Expressions evaluate under a context that is either the view currently
being rendered (Init/Succ phases) or the whole tree memory (Normal phase,
used by effects and event handlers).  Setter calls never update state in
place: they queue an updater closure on the owning view and flag it for a
re-check.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .domains import (
    Decision, Env, FALSE, Phase, StateEntry, TreeMemory, TRUE, UNIT, Value,
    VArray, VBool, VClos, VComSpec, VCompName, VInt, VSetter, VStr, VUnit,
    View, format_value, value_equiv,
)
from .errors import (
    CrossComponentSetDuringRender, HookInNormalPhase, RetryLimitExceeded,
    TypeMismatch,
)
from .syntax import (
    AppE, ArrayE, BinopE, BoolE, CompNameE, CondE, EffectE, Expr, FnE, IntE,
    LetE, PrintE, SeqE, StateBindE, StrE, UnitE, VarE,
)
from .trace import TraceSink

DEFAULT_RETRY_LIMIT = 25


class Runtime:
    """Mutable per-run services: definitions, trace sink, closure identity."""

    def __init__(self, defs: dict[str, tuple[str, Expr]], sink: TraceSink,
                 retry_limit: int = DEFAULT_RETRY_LIMIT):
        self.defs = defs
        self.sink = sink
        self.retry_limit = retry_limit
        self._clos_counter = 0

    def alloc_clos(self, param: str, body: Expr, env: Env) -> VClos:
        clos = VClos(param, body, env, self._clos_counter)
        self._clos_counter += 1
        return clos


@dataclass(frozen=True)
class Ctx:
    """Evaluation context: a local view (Init/Succ) or the whole memory (Normal)."""

    phase: Phase
    path: Optional[int]
    view: Optional[View] = None
    mem: Optional[TreeMemory] = None

    @staticmethod
    def local(phase: Phase, path: int, view: View) -> "Ctx":
        assert phase in (Phase.INIT, Phase.SUCC)
        return Ctx(phase=phase, path=path, view=view)

    @staticmethod
    def whole(mem: TreeMemory) -> "Ctx":
        return Ctx(phase=Phase.NORMAL, path=None, mem=mem)

    def with_view(self, view: View) -> "Ctx":
        return replace(self, view=view)

    def with_mem(self, mem: TreeMemory) -> "Ctx":
        return replace(self, mem=mem)


def _int_div(a: int, b: int, op: str) -> int:
    if b == 0:
        raise TypeMismatch(f"{op} by zero")
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    if op == "/":
        return q
    return a - b * q  # mod, sign follows the dividend


def _apply_binop(op: str, a: Value, b: Value) -> Value:
    if op in ("+", "-", "*", "/", "mod"):
        if not (isinstance(a, VInt) and isinstance(b, VInt)):
            raise TypeMismatch(f"operator {op} needs integers")
        x, y = a.value, b.value
        if op == "+":
            return VInt(x + y)
        if op == "-":
            return VInt(x - y)
        if op == "*":
            return VInt(x * y)
        return VInt(_int_div(x, y, op))
    if op in ("<", "<=", ">", ">="):
        if not (isinstance(a, VInt) and isinstance(b, VInt)):
            raise TypeMismatch(f"operator {op} needs integers")
        x, y = a.value, b.value
        result = {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]
        return TRUE if result else FALSE
    if op in ("=", "<>"):
        comparable = (
            (isinstance(a, VInt) and isinstance(b, VInt))
            or (isinstance(a, VBool) and isinstance(b, VBool))
            or (isinstance(a, VUnit) and isinstance(b, VUnit))
            or (isinstance(a, VStr) and isinstance(b, VStr))
        )
        if not comparable:
            raise TypeMismatch(f"operator {op} on incomparable values")
        eq = a == b
        return TRUE if (eq if op == "=" else not eq) else FALSE
    if op in ("&&", "||"):
        if not (isinstance(a, VBool) and isinstance(b, VBool)):
            raise TypeMismatch(f"operator {op} needs booleans")
        result = (a.value and b.value) if op == "&&" else (a.value or b.value)
        return TRUE if result else FALSE
    raise TypeMismatch(f"unknown operator {op}")


def _queue_update(view: View, label: int, updater: VClos) -> View:
    entry = view.state(label)
    queued = StateEntry(entry.val, entry.sttq + (updater,))
    return view.add_dec(Decision.CHECK).with_state(label, queued)


def eval_expr(rt: Runtime, ctx: Ctx, env: Env, e: Expr) -> tuple[Value, Ctx]:
    if isinstance(e, UnitE):
        return UNIT, ctx
    if isinstance(e, BoolE):
        return (TRUE if e.value else FALSE), ctx
    if isinstance(e, IntE):
        return VInt(e.value), ctx
    if isinstance(e, StrE):
        return VStr(e.value), ctx
    if isinstance(e, VarE):
        return env.lookup(e.name), ctx
    if isinstance(e, CompNameE):
        return VCompName(e.name), ctx
    if isinstance(e, BinopE):
        left, ctx = eval_expr(rt, ctx, env, e.left)
        right, ctx = eval_expr(rt, ctx, env, e.right)
        return _apply_binop(e.op, left, right), ctx
    if isinstance(e, CondE):
        cond, ctx = eval_expr(rt, ctx, env, e.cond)
        if not isinstance(cond, VBool):
            raise TypeMismatch("condition must be a boolean")
        branch = e.then if cond.value else e.other
        return eval_expr(rt, ctx, env, branch)
    if isinstance(e, FnE):
        return rt.alloc_clos(e.param, e.body, env), ctx
    if isinstance(e, SeqE):
        _, ctx = eval_expr(rt, ctx, env, e.first)
        return eval_expr(rt, ctx, env, e.second)
    if isinstance(e, LetE):
        value, ctx = eval_expr(rt, ctx, env, e.value)
        return eval_expr(rt, ctx, env.bind(e.name, value), e.body)
    if isinstance(e, ArrayE):
        items = []
        for item in e.items:
            value, ctx = eval_expr(rt, ctx, env, item)
            items.append(value)
        return VArray(tuple(items)), ctx
    if isinstance(e, AppE):
        fn, ctx = eval_expr(rt, ctx, env, e.fn)
        if isinstance(fn, VCompName):
            arg, ctx = eval_expr(rt, ctx, env, e.arg)
            rt.sink.rule("AppCom", path=ctx.path, detail=fn.name)
            return VComSpec(fn.name, arg), ctx
        if isinstance(fn, VClos):
            arg, ctx = eval_expr(rt, ctx, env, e.arg)
            return eval_expr(rt, ctx, fn.env.bind(fn.param, arg), fn.body)
        if isinstance(fn, VSetter):
            return _apply_setter(rt, ctx, env, fn, e.arg)
        raise TypeMismatch(f"cannot apply {format_value(fn)}")
    if isinstance(e, StateBindE):
        return _eval_state_bind(rt, ctx, env, e)
    if isinstance(e, EffectE):
        if ctx.phase not in (Phase.INIT, Phase.SUCC):
            raise HookInNormalPhase()
        thunk = rt.alloc_clos("_", e.body, env)
        view = ctx.view.with_effq(ctx.view.effq + (thunk,))
        rt.sink.rule("Eff", path=ctx.path, detail="queued effect")
        return UNIT, ctx.with_view(view)
    if isinstance(e, PrintE):
        value, ctx = eval_expr(rt, ctx, env, e.arg)
        rt.sink.console(format_value(value))
        return UNIT, ctx
    raise TypeError(f"not an expression node: {e!r}")


def _apply_setter(rt: Runtime, ctx: Ctx, env: Env, setter: VSetter,
                  arg_expr: Expr) -> tuple[Value, Ctx]:
    updater, ctx = eval_expr(rt, ctx, env, arg_expr)
    if not isinstance(updater, VClos):
        raise TypeMismatch("a setter expects an updater function")
    if ctx.phase in (Phase.INIT, Phase.SUCC):
        if setter.path != ctx.path:
            raise CrossComponentSetDuringRender(setter.path, ctx.path)
        view = _queue_update(ctx.view, setter.label, updater)
        rt.sink.rule("AppSetComp", path=ctx.path, label=setter.label,
                     detail="queued update during body evaluation")
        return UNIT, ctx.with_view(view)
    target = ctx.mem.get(setter.path)
    updated = _queue_update(target, setter.label, updater)
    rt.sink.rule("AppSetNormal", path=setter.path, label=setter.label,
                 detail="queued update from effect/handler")
    return UNIT, ctx.with_mem(ctx.mem.set(setter.path, updated))


def _eval_state_bind(rt: Runtime, ctx: Ctx, env: Env,
                     e: StateBindE) -> tuple[Value, Ctx]:
    if ctx.phase == Phase.INIT:
        init_val, ctx = eval_expr(rt, ctx, env, e.init)
        view = ctx.view.with_state(e.label, StateEntry(init_val, ()))
        rt.sink.rule("SttBind", path=ctx.path, label=e.label,
                     detail=f"initialized to {format_value(init_val)}")
        env2 = env.bind(e.var, init_val).bind(e.setter, VSetter(e.label, ctx.path))
        return eval_expr(rt, ctx.with_view(view), env2, e.body)
    if ctx.phase == Phase.SUCC:
        entry = ctx.view.state(e.label)
        initial = entry.val
        value = initial
        for updater in entry.sttq:
            value, ctx = eval_expr(rt, ctx, updater.env.bind(updater.param, value),
                                   updater.body)
        view = ctx.view
        if not value_equiv(value, initial):
            view = view.add_dec(Decision.EFFECT)
        view = view.with_state(e.label, StateEntry(value, ()))
        rt.sink.rule("SttReBind", path=ctx.path, label=e.label,
                     detail=f"{format_value(initial)} -> {format_value(value)} "
                            f"({len(entry.sttq)} queued)")
        env2 = env.bind(e.var, value).bind(e.setter, VSetter(e.label, ctx.path))
        return eval_expr(rt, ctx.with_view(view), env2, e.body)
    raise HookInNormalPhase()


def eval_body_retry(rt: Runtime, phase: Phase, path: int, view: View, env: Env,
                    body: Expr) -> tuple[Value, View]:
    """Evaluate a component body, retrying in Succ phase while it re-checks.

    Before each pass the Check decision is dropped and the effect queue is
    cleared, so the pass re-collects both from scratch.
    """
    passes = 0
    current = view
    current_phase = phase
    while True:
        if passes == rt.retry_limit:
            raise RetryLimitExceeded(path, passes)
        base = current.without_dec(Decision.CHECK).with_effq(())
        value, ctx = eval_expr(rt, Ctx.local(current_phase, path, base), env, body)
        passes += 1
        result = ctx.view
        if Decision.CHECK not in result.dec:
            rt.sink.rule("EvalOnce", path=path, detail=f"pass {passes}")
            return value, result
        rt.sink.rule("EvalMult", path=path, detail=f"pass {passes}")
        current = result
        current_phase = Phase.SUCC
