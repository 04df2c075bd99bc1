"""Expression evaluation across the three phases and the retrying body loop.

Expected view contents for the walkthrough cases were derived by hand from
the state-binding, setter, and effect rules and are asserted field by field.
"""

from __future__ import annotations

import pytest

from minireact import (
    Ctx, Decision, Env, Mode, Phase, Runtime, StateEntry, TraceSink,
    TreeMemory, UNIT, VComSpec, VInt, View, eval_body_retry, eval_expr,
)
from minireact.errors import (
    CrossComponentSetDuringRender, HookInNormalPhase, RetryLimitExceeded,
    TypeMismatch, UnboundVariable,
)
from minireact.syntax import build_def_table, parse_program


def _whole(mem=None):
    return Ctx.whole(mem if mem is not None else TreeMemory.empty())


def _eval_normal(src: str, env=None, rt=None, mem=None):
    rt = rt or Runtime({}, TraceSink())
    program = parse_program(src)
    return eval_expr(rt, _whole(mem), env or Env.empty(), program.main)


def test_arithmetic_in_normal_phase():
    value, ctx = _eval_normal("1 + 2")
    assert value == VInt(3)
    assert len(ctx.mem) == 0


@pytest.mark.parametrize("src,expected", [
    ("7 mod 2", VInt(1)), ("7 / 2", VInt(3)), ("0 - 7 / 2", VInt(-3)),
    ("2 < 3", True), ("3 <= 3", True), ("2 = 3", False), ("2 <> 3", True),
    ("true && false", False), ("true || false", True),
    ("() = ()", True), ("true = true", True),
])
def test_operators(src, expected):
    value, _ = _eval_normal(src)
    if isinstance(expected, bool):
        assert value.value is expected
    else:
        assert value == expected


@pytest.mark.parametrize("src,err", [
    ("1 + true", TypeMismatch),
    ("1 / 0", TypeMismatch),
    ("if 1 then 2 else 3", TypeMismatch),
    ("1 2", TypeMismatch),
    ("nope", UnboundVariable),
])
def test_evaluation_errors(src, err):
    with pytest.raises(err):
        _eval_normal(src)


def test_closures_and_let():
    value, _ = _eval_normal("let add = fun a -> fun b -> a + b in add 2 3")
    assert value == VInt(5)


def test_component_application_packs_without_invoking():
    # no definition table needed: application only pairs name and argument
    value, _ = _eval_normal("C (1 + 1)")
    assert isinstance(value, VComSpec)
    assert value.name == "C" and value.arg == VInt(2)


def _demo_parts(program_src):
    program = parse_program(program_src("demo"))
    defs, _ = build_def_table(program)
    return defs, defs["Demo"]


def test_demo_init_first_pass(program_src):
    """First Init pass over the Demo body: the top-level setter queues one
    updater and flags Check, the effect queues one thunk."""
    defs, (param, body) = _demo_parts(program_src)
    rt = Runtime(defs, TraceSink())
    view = View.empty(VComSpec("Demo", VInt(0)))
    _, ctx = eval_expr(rt, Ctx.local(Phase.INIT, 0, view),
                       Env.empty().bind(param, VInt(0)), body)
    result = ctx.view
    assert result.dec == {Decision.CHECK}
    entry = result.state(0)
    assert entry.val == VInt(0)
    assert len(entry.sttq) == 1
    assert len(result.effq) == 1
    assert result.child == UNIT


def test_demo_succ_rebind_applies_queue(program_src):
    """Succ pass with one queued increment: state becomes 1, Effect is on."""
    defs, (param, body) = _demo_parts(program_src)
    rt = Runtime(defs, TraceSink())
    view = View.empty(VComSpec("Demo", VInt(0)))
    _, ctx = eval_expr(rt, Ctx.local(Phase.INIT, 0, view),
                       Env.empty().bind(param, VInt(0)), body)
    after_init = ctx.view.without_dec(Decision.CHECK).with_effq(())
    _, ctx = eval_expr(rt, Ctx.local(Phase.SUCC, 0, after_init),
                       Env.empty().bind(param, VInt(0)), body)
    result = ctx.view
    assert result.state(0).val == VInt(1)
    assert result.state(0).sttq == ()
    assert Decision.EFFECT in result.dec
    assert Decision.CHECK not in result.dec  # s=1 skips the top-level setter


def test_normal_phase_setter_targets_memory(program_src):
    """A handler calling the setter twice queues two updaters on the view."""
    src = program_src("counter_plain")
    program = parse_program(src)
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    param, body = defs["Counter"]
    spec = VComSpec("Counter", VInt(0))
    value, ctx = eval_expr(rt, Ctx.local(Phase.INIT, 0, View.empty(spec)),
                           Env.empty().bind(param, VInt(0)), body)
    mem = TreeMemory.empty().set(0, ctx.view)
    clos = value.items[1]  # the handler closure in the returned spec array
    result, ctx2 = eval_expr(rt, _whole(mem), clos.env.bind(clos.param, UNIT),
                             clos.body)
    assert result == UNIT
    target = ctx2.mem.get(0)
    assert Decision.CHECK in target.dec
    assert len(target.state(0).sttq) == 2


def test_cross_component_set_during_body_eval():
    src = """let Grab f = f (fun s -> s + 1); 0;;
Grab 0
"""
    program = parse_program(src)
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    param, body = defs["Grab"]
    from minireact import VSetter
    view = View.empty(VComSpec("Grab", VSetter(0, 7)))
    with pytest.raises(CrossComponentSetDuringRender):
        eval_expr(rt, Ctx.local(Phase.INIT, 3, view),
                  Env.empty().bind(param, VSetter(0, 7)), body)


def test_hook_in_normal_phase_is_defensive_error():
    program = parse_program("let C x = let (s, t) = useState 0 in s;; C 1")
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    with pytest.raises(HookInNormalPhase):
        eval_expr(rt, _whole(), Env.empty(), defs["C"][1])


def test_retry_stable_body_single_pass():
    program = parse_program("let C x = let (s, t) = useState x in s + 1;; C 1")
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    value, view = eval_body_retry(rt, Phase.INIT, 0,
                                  View.empty(VComSpec("C", VInt(1))),
                                  Env.empty().bind("x", VInt(1)), defs["C"][1])
    assert value == VInt(2)
    assert Decision.CHECK not in view.dec
    passes = [r for s in rt.sink.steps for r in s.rules]  # no step open: empty
    assert passes == []
    assert view.state(0).val == VInt(1)


def test_demo_init_retries_once_then_settles(program_src):
    defs, (param, body) = _demo_parts(program_src)
    rt = Runtime(defs, TraceSink())
    value, view = eval_body_retry(rt, Phase.INIT, 0,
                                  View.empty(VComSpec("Demo", VInt(0))),
                                  Env.empty().bind(param, VInt(0)), body)
    assert value == UNIT            # s=1 <= 1 returns unit
    assert view.dec == {Decision.EFFECT}
    assert view.state(0).val == VInt(1)
    assert view.state(0).sttq == ()
    assert len(view.effq) == 1


def test_retry_limit_exact_pass_count(program_src):
    program = parse_program(program_src("inf2"))
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    param, body = defs["Inf2"]
    with pytest.raises(RetryLimitExceeded) as exc:
        eval_body_retry(rt, Phase.INIT, 0, View.empty(VComSpec("Inf2", VInt(0))),
                        Env.empty().bind(param, VInt(0)), body)
    assert exc.value.passes == 25
    assert exc.value.path == 0


def test_retry_budget_configurable(program_src):
    program = parse_program(program_src("inf2"))
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink(), retry_limit=3)
    param, body = defs["Inf2"]
    with pytest.raises(RetryLimitExceeded) as exc:
        eval_body_retry(rt, Phase.INIT, 0, View.empty(VComSpec("Inf2", VInt(0))),
                        Env.empty().bind(param, VInt(0)), body)
    assert exc.value.passes == 3


def test_print_emits_in_evaluation_order():
    rt = Runtime({}, TraceSink())
    rt.sink.begin_step("StepInit")
    _eval_normal('print "a"; print (1 + 1); print true', rt=rt)
    assert rt.sink.console_lines == ["a", "2", "true"]


def test_updater_prints_at_fold_time():
    """Queued impure updaters emit their prints when folded, in queue order."""
    program = parse_program("let C x = let (s, t) = useState x in s;; C 0")
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    view = View.empty(VComSpec("C", VInt(0)))
    upd_src = parse_program('fun s -> (print "u1"; s + 1)').main
    upd2_src = parse_program('fun s -> (print "u2"; s * 2)').main
    u1 = rt.alloc_clos(upd_src.param, upd_src.body, Env.empty())
    u2 = rt.alloc_clos(upd2_src.param, upd2_src.body, Env.empty())
    queued = view.with_state(0, StateEntry(VInt(0), (u1, u2)))
    _, ctx = eval_expr(rt, Ctx.local(Phase.SUCC, 0, queued),
                       Env.empty().bind("x", VInt(0)), defs["C"][1])
    assert rt.sink.console_lines == ["u1", "u2"]
    assert ctx.view.state(0).val == VInt(2)


def test_determinism_same_rule_sequence(program_src):
    def run():
        program = parse_program(program_src("demo"))
        defs, _ = build_def_table(program)
        param, body = defs["Demo"]
        rt = Runtime(defs, TraceSink())
        rt.sink.begin_step("StepInit")
        eval_body_retry(rt, Phase.INIT, 0, View.empty(VComSpec("Demo", VInt(0))),
                        Env.empty().bind(param, VInt(0)), body)
        return [(r.rule, r.path, r.label) for s in rt.sink.steps for r in s.rules]

    assert run() == run()


def test_body_evaluation_never_touches_child(program_src):
    """Body evaluation reads and writes state, decisions, and effect
    queues; the child tree is only ever replaced by check/reconcile."""
    from minireact import TPath

    program = parse_program(program_src("demo"))
    defs, _ = build_def_table(program)
    rt = Runtime(defs, TraceSink())
    param, body = defs["Demo"]
    marker = TPath(99)
    view = View.empty(VComSpec("Demo", VInt(0))).with_child(marker)
    _, result = eval_body_retry(rt, Phase.INIT, 0, view,
                                Env.empty().bind(param, VInt(0)), body)
    assert result.child is marker
