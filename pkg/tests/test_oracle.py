"""Meta-theory as code: purity, normalization, similarity, validity,
coherence, stability, and the theorem checkers."""

from __future__ import annotations

import pytest

from minireact import (
    Decision, Engine, Env, Mode, Runtime, StateEntry, TPath, TraceSink,
    TreeMemory, UNIT, VComSpec, VInt, View, check_coherence,
    check_similar_transition, check_stability, check_theorem_effect_condition,
    check_theorem_reeval, check_validity, is_pure, mems_similar,
    normalize_entry, normalize_view, parse_program, reachable, run_source,
    views_e_equivalent, views_equal, views_similar,
)
from minireact.corpus import generate_views
from minireact.errors import InapplicableImpureUpdates
from minireact.syntax import build_def_table


def _clos(rt, src):
    fn = parse_program(src).main
    return rt.alloc_clos(fn.param, fn.body, Env.empty())


@pytest.fixture
def rt():
    return Runtime({}, TraceSink())


# -- purity ----------------------------------------------------------------------

@pytest.mark.parametrize("src,expected", [
    ("fun s -> s + 1", True),
    ('fun s -> (print "a"; s)', False),
    ("fun s -> (fun x -> x) s", True),
    ("fun s -> if s < 3 then s else 0 - s", True),
    ("fun s -> f s", False),            # unknown application: conservative
    ("fun s -> fun t -> print t", True),  # lambda creation alone is pure
    ("fun _ -> [1, 2, 3]", True),
])
def test_is_pure(rt, src, expected):
    assert is_pure(_clos(rt, src)) is expected


# -- normalization ------------------------------------------------------------------

def test_normalize_entry_pure_changing(rt):
    entry = StateEntry(VInt(0), (_clos(rt, "fun s -> s + 1"),))
    ne = normalize_entry(entry)
    assert ne.val == VInt(1)
    assert ne.sttq == ()
    assert ne.decisions == {Decision.CHECK, Decision.EFFECT}


def test_normalize_entry_empty_queue(rt):
    ne = normalize_entry(StateEntry(VInt(7), ()))
    assert ne.val == VInt(7) and ne.sttq == () and ne.decisions == frozenset()


def test_normalize_entry_impure_head_blocks_prefix(rt):
    impure = _clos(rt, 'fun s -> (print "a"; s)')
    pure = _clos(rt, "fun s -> s + 1")
    ne = normalize_entry(StateEntry(VInt(0), (impure, pure)))
    assert ne.val == VInt(0)            # prefix length 0
    assert ne.sttq == (impure, pure)
    assert ne.decisions == {Decision.CHECK}


def test_normalize_entry_pure_composing_to_id(rt):
    inc = _clos(rt, "fun s -> s + 1")
    dec = _clos(rt, "fun s -> s - 1")
    ne = normalize_entry(StateEntry(VInt(5), (inc, dec)))
    assert ne.val == VInt(5) and ne.sttq == () and ne.decisions == frozenset()


def _view(rt, val, queue_srcs, dec=frozenset()):
    queue = tuple(_clos(rt, src) for src in queue_srcs)
    return View(spec=VComSpec("C", VInt(0)), dec=frozenset(dec),
                sttst=((0, StateEntry(val, queue)),), effq=(), child=UNIT)


def test_normalize_view_folds_and_installs_decisions(rt):
    view = _view(rt, VInt(0), ["fun s -> s + 1"], dec={Decision.CHECK})
    normalized = normalize_view(view)
    assert normalized.state(0).val == VInt(1)
    assert normalized.state(0).sttq == ()
    assert normalized.dec == {Decision.CHECK, Decision.EFFECT}


def test_normalize_view_drops_stale_check(rt):
    view = _view(rt, VInt(3), [], dec={Decision.CHECK})
    assert normalize_view(view).dec == frozenset()


def test_normalize_view_keeps_check_for_impure_suffix(rt):
    view = _view(rt, VInt(3), ['fun s -> (print "x"; s + 1)'],
                 dec={Decision.CHECK})
    normalized = normalize_view(view)
    assert normalized.dec == {Decision.CHECK}
    assert len(normalized.state(0).sttq) == 1


def test_normalize_view_idempotent_on_generated_views():
    for view in generate_views(seed=11, count=300):
        once = normalize_view(view)
        twice = normalize_view(once)
        assert views_equal(once, twice), view


# -- similarity -----------------------------------------------------------------------

def test_views_similar_reflexive(rt):
    view = _view(rt, VInt(0), ["fun s -> s + 1"], dec={Decision.CHECK})
    assert views_similar(view, view)


def test_view_similar_to_its_preapplied_form(rt):
    """A view with one pure update pre-applied and the Check/Effect
    contributions installed is similar to the original."""
    view = _view(rt, VInt(0), ["fun s -> s + 1"], dec={Decision.CHECK})
    preapplied = _view(rt, VInt(1), [],
                       dec={Decision.CHECK, Decision.EFFECT})
    assert views_similar(view, preapplied)
    assert views_similar(preapplied, view)


def test_views_differing_value_not_similar(rt):
    a = _view(rt, VInt(1), [])
    b = _view(rt, VInt(2), [])
    assert not views_similar(a, b)


def test_views_similar_equivalence_relation():
    views = generate_views(seed=23, count=60)
    for v in views:
        assert views_similar(v, v)
    for a in views[:25]:
        for b in views[:25]:
            assert views_similar(a, b) == views_similar(b, a)
    sims = [(a, b) for a in views[:25] for b in views[:25] if views_similar(a, b)]
    for a, b in sims:
        for c in views[:25]:
            if views_similar(b, c):
                assert views_similar(a, c)


# -- reachability and memory similarity ----------------------------------------------

def test_reachable_constant_tree_empty():
    assert reachable(TreeMemory.empty(), VInt(5)) == set()


def test_reachable_demo(program_src):
    eng = run_source(program_src("demo"))
    assert reachable(eng.cfg.mem, eng.cfg.root) == {0}


def test_reachable_after_unmount(program_src):
    eng = run_source(program_src("parent_child"))
    assert reachable(eng.cfg.mem, eng.cfg.root) == {0}
    assert set(eng.cfg.mem.paths()) == {0, 1}


def test_mems_similar_identity_and_normalized_image(program_src):
    eng = run_source(program_src("counter"))
    eng.dispatch(0)
    mem, root = eng.cfg.mem, eng.cfg.root
    assert mems_similar(mem, mem, root)
    folded = mem
    for path in reachable(mem, root):
        folded = folded.set(path, normalize_view(mem.get(path)))
    assert mems_similar(mem, folded, root)


def test_mems_differing_on_unreachable_path_not_similar(program_src):
    eng = run_source(program_src("parent_child"))
    mem, root = eng.cfg.mem, eng.cfg.root
    orphan = mem.get(1)
    tweaked = mem.set(1, orphan.with_child(VInt(9)))
    assert not mems_similar(mem, tweaked, root)


# -- validity, coherence, stability ---------------------------------------------------

def test_validity_on_fresh_and_running_views(program_src):
    eng = run_source(program_src("selfcounter"))
    assert check_validity(eng.cfg.mem, eng.defs)


def test_validity_fails_on_missing_label(program_src):
    eng = run_source(program_src("demo"))
    view = eng.cfg.mem.get(0)
    broken = eng.cfg.mem.set(0, View(spec=view.spec, dec=view.dec, sttst=(),
                                     effq=view.effq, child=view.child))
    assert not check_validity(broken, eng.defs)


def test_coherence_at_check_entries(program_src):
    src = program_src("demo")
    eng = Engine(parse_program(src), source=src)
    eng.boot()
    while eng.cfg.mode != Mode.EVENT_LOOP:
        eng.step()
        if eng.cfg.mode == Mode.CHECK:
            assert check_coherence(eng.cfg.mem, eng.cfg.root)


def test_demo_post_commit_view_is_coherent(program_src):
    src = program_src("demo")
    eng = Engine(parse_program(src), source=src)
    eng.boot()
    eng.step()  # commit: queues one update, flags Check
    view = eng.cfg.mem.get(0)
    assert Decision.CHECK in view.dec
    assert len(view.state(0).sttq) == 1
    assert check_coherence(eng.cfg.mem, eng.cfg.root)


def test_demo_final_view_stable(program_src):
    eng = run_source(program_src("demo"))
    assert check_stability(eng.cfg.mem.get(0), eng.defs, path=0)


def test_unsettled_view_not_stable(program_src):
    src = program_src("demo")
    eng = Engine(parse_program(src), source=src)
    eng.boot()
    eng.step()  # queued update pending: folding it changes the state
    assert not check_stability(eng.cfg.mem.get(0), eng.defs, path=0)


def test_stability_after_every_settled_body_evaluation(program_src):
    for name in ("selfcounter", "flicker", "parent_child", "counter"):
        eng = run_source(program_src(name))
        for path in reachable(eng.cfg.mem, eng.cfg.root):
            assert check_stability(eng.cfg.mem.get(path), eng.defs, path=path)


def test_e_equivalence_after_eval_from_similar_views(program_src):
    """Evaluating the body from a view and from its normalized image
    leaves the stores agreeing on every label in the body."""
    from minireact import eval_expr, Ctx, Phase

    src = program_src("counter")
    eng = Engine(parse_program(src), source=src)
    eng.run_until_idle()
    eng.dispatch(0)  # two queued updates, Check set
    view = eng.cfg.mem.get(0)
    param, body = eng.defs["Counter"]
    env = Env.empty().bind(param, view.spec.arg)

    def eval_from(v):
        base = v.without_dec(Decision.CHECK).with_effq(())
        _, ctx = eval_expr(eng.rt, Ctx.local(Phase.SUCC, 0, base), env, body)
        return ctx.view

    assert views_e_equivalent(eval_from(view), eval_from(normalize_view(view)),
                              body)


# -- theorem checkers ------------------------------------------------------------------

def test_theorem_reeval_on_traces(program_src):
    for name in ("demo", "selfcounter", "counter", "flicker"):
        eng = run_source(program_src(name))
        assert check_theorem_reeval(eng.trace_file())


def test_theorem_reeval_on_retry_divergence(program_src):
    src = program_src("inf2")
    eng = Engine(parse_program(src), source=src)
    with pytest.raises(Exception):
        eng.run_until_idle()
    assert check_theorem_reeval(eng.trace_file())


def test_theorem_reeval_detects_violation():
    trace = {"steps": [{"transition": "StepCheck", "console": [], "snapshot": None,
                        "rules": [{"rule": "StepCheck", "path": None},
                                  {"rule": "AppSetComp", "path": 0},
                                  {"rule": "EvalOnce", "path": 0}]}]}
    assert not check_theorem_reeval(trace)


def test_theorem_effect_condition_on_traces(program_src):
    for name, events in [("flicker", []), ("demo", []), ("selfcounter", []),
                         ("counter", [0]), ("parent_child", []),
                         ("nested", [])]:
        eng = run_source(program_src(name), events=events)
        assert check_theorem_effect_condition(eng.trace_file())


def test_theorem_effect_condition_vacuous_on_idle(program_src):
    eng = run_source("5")
    assert check_theorem_effect_condition(eng.trace_file())


def test_theorem_effect_condition_detects_violation(program_src):
    eng = run_source(program_src("flicker"))
    trace = eng.trace_file()
    # forge an Effect flag onto the final idle snapshot
    bad = trace["steps"][-1]["snapshot"]["views"]["0"]
    bad["dec"] = ["Effect"]
    assert not check_theorem_effect_condition(trace)


# -- similar transitions -----------------------------------------------------------------

def test_similar_transition_counter_one_click(program_src):
    assert check_similar_transition(program_src("counter_plain"), events=[0])


def test_similar_transition_trivial_empty_queues(program_src):
    assert check_similar_transition(program_src("nested"))


def test_similar_transition_effect_driven(program_src):
    assert check_similar_transition(program_src("flicker"))
    assert check_similar_transition(program_src("parent_child"))


def test_similar_transition_rejects_impure_updates(program_src):
    with pytest.raises(InapplicableImpureUpdates):
        check_similar_transition(program_src("updater_order"), events=[0])
