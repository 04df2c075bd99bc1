"""Conformance corpus: one program per documented runtime scenario, plus
seeded generators used by the property suites.

Scenario expectations (render counts, console output, terminal errors,
final state values) were derived by hand-stepping the render-loop rules
and are asserted exactly by the `conform` runner.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .domains import StateEntry, VComSpec, VInt, View
from .engine import Budgets, Engine
from .errors import EngineError
from .evaluator import Runtime
from .oracle import reachable
from .syntax import parse_program
from .trace import TraceSink, value_to_json


@dataclass(frozen=True)
class Expect:
    outcome: str                    # "idle" | "error"
    error_kind: Optional[str] = None
    renders: Optional[int] = None
    console: Optional[tuple] = None
    states: Optional[dict] = None   # (path, label) -> serialized value
    orphans: Optional[int] = None
    reachable_views: Optional[int] = None
    retry_passes: Optional[dict] = None  # path -> expected EvalMult count


@dataclass(frozen=True)
class Scenario:
    row: int
    name: str
    source: str
    expect: Expect
    events: tuple = ()


SCENARIOS: list[Scenario] = [
    Scenario(
        row=1, name="no re-render w/o a setter call",
        source="""let Static x =
  let (s, setS) = useState x in
  print s;
  [s, s + 1];;
Static 7
""",
        expect=Expect(outcome="idle", renders=1, console=("7",),
                      states={(0, 0): 7}),
    ),
    Scenario(
        row=2, name="retries (0<n<25) w/ setter call during body eval",
        source="""let Climb x =
  let (s, setS) = useState x in
  if s < 2 then setS (fun s -> s + 1);
  s;;
Climb 0
""",
        expect=Expect(outcome="idle", renders=1, console=(),
                      states={(0, 0): 2}, retry_passes={0: 2}),
    ),
    Scenario(
        row=3, name="infinite retries w/ setter call during body eval",
        source="""let Stuck x =
  let (s, setS) = useState x in
  setS (fun s -> s);
  s;;
Stuck 0
""",
        expect=Expect(outcome="error", error_kind="RetryLimitExceeded"),
    ),
    Scenario(
        row=4, name="no re-render w/o effects w/ setter call during body eval",
        source="""let Settle x =
  let (s, setS) = useState 0 in
  if s < 1 then setS (fun s -> s + 1);
  s;;
Settle 0
""",
        expect=Expect(outcome="idle", renders=1, console=(),
                      states={(0, 0): 1}),
    ),
    Scenario(
        row=5, name="no re-render w/ effect w/o setter call",
        source="""let Log x =
  let (s, setS) = useState x in
  useEffect (print "logged");
  s;;
Log 3
""",
        expect=Expect(outcome="idle", renders=1, console=("logged",)),
    ),
    Scenario(
        row=6, name="no re-render w/ effect w/ id setter call",
        source="""let Still x =
  let (s, setS) = useState x in
  useEffect (setS (fun s -> s));
  s;;
Still 5
""",
        expect=Expect(outcome="idle", renders=1, console=(),
                      states={(0, 0): 5}),
    ),
    Scenario(
        row=7, name="no re-render w/ effect w/ setter calls composing to id",
        source="""let Zigzag x =
  let (s, setS) = useState x in
  useEffect (setS (fun s -> s + 1); setS (fun s -> s - 1));
  s;;
Zigzag 0
""",
        expect=Expect(outcome="idle", renders=1, console=(),
                      states={(0, 0): 0}),
    ),
    Scenario(
        row=8, name="re-renders (0<n<100) w/ effect w/ setter call",
        source="""let SelfCounter x =
  let (s, setS) = useState x in
  print s;
  useEffect (
    print "Effect";
    if s < 3 then
      setS (fun s -> s + 1));
  print "Return";
  [s];;
SelfCounter 0
""",
        expect=Expect(outcome="idle", renders=4,
                      console=("0", "Return", "Effect", "1", "Return", "Effect",
                               "2", "Return", "Effect", "3", "Return", "Effect"),
                      states={(0, 0): 3}),
    ),
    Scenario(
        row=9, name="infinite re-renders w/ effect w/ diverging setter call",
        source="""let Inf x =
  let (s, setS) = useState 0 in
  useEffect (setS (fun s -> s+1));
  s;;
Inf 0
""",
        expect=Expect(outcome="error", error_kind="RerenderLimitExceeded"),
    ),
    Scenario(
        row=10, name="re-render w/ child updating parent during effect",
        source="""let Child setS =
  useEffect (setS (fun _ -> false));
  ();;
let Parent b =
  let (s, setS) = useState b in
  if s then Child setS else ();;
Parent true
""",
        expect=Expect(outcome="idle", renders=2, console=(),
                      states={(0, 0): False}, orphans=1),
    ),
    Scenario(
        row=11, name="re-render w/ sibling updating another during effect",
        source="""let Pusher f = useEffect (f (fun v -> 42)); 0;;
let Shower v = v;;
let Pair x =
  let (s, setS) = useState x in
  [Pusher setS, Shower s];;
Pair 0
""",
        expect=Expect(outcome="idle", renders=2, console=(),
                      states={(0, 0): 42}),
    ),
    Scenario(
        row=12, name="error w/ child updating parent during body eval",
        source="""let Grab f = f (fun s -> s + 1); 0;;
let Boss x =
  let (s, setS) = useState x in
  Grab setS;;
Boss 0
""",
        expect=Expect(outcome="error",
                      error_kind="CrossComponentSetDuringRender"),
    ),
    Scenario(
        row=13, name="non-trivial reconciliation",
        source="""let Blue v = print "blue"; v;;
let Red v = print "red"; v;;
let Swap x =
  let (s, setS) = useState x in
  useEffect (if s = 0 then setS (fun s -> s + 1));
  if s = 0 then Blue s else Red s;;
Swap 0
""",
        expect=Expect(outcome="idle", renders=2, console=("blue", "red"),
                      orphans=1),
    ),
    Scenario(
        row=14, name="no re-render w/ direct object update",
        source="""let Holder x =
  let (f, setF) = useState (fun z -> z) in
  useEffect (setF (fun g -> g));
  7;;
Holder 0
""",
        expect=Expect(outcome="idle", renders=1, console=()),
    ),
    Scenario(
        row=15, name="re-render w/ idle but parent updates",
        source="""let Label v = print "child"; v;;
let Wrap x =
  let (s, setS) = useState x in
  useEffect (if s = 0 then setS (fun s -> s + 1));
  Label s;;
Wrap 0
""",
        expect=Expect(outcome="idle", renders=2, console=("child", "child"),
                      states={(0, 0): 1}),
    ),
    Scenario(
        row=16, name="user event sequence",
        source="""let Counter x =
  print "Counter";
  let (s, setS) = useState x in
  print "Return";
  [s, button (fun _ ->
    setS (fun s -> s+1);
    setS (fun s -> print "Update"; s+1))];;
Counter 0
""",
        events=(0, 0),
        expect=Expect(outcome="idle", renders=3,
                      console=("Counter", "Return",
                               "Counter", "Update", "Return",
                               "Counter", "Update", "Return"),
                      states={(0, 0): 4}),
    ),
    Scenario(
        row=18, name="recursive view hierarchy",
        source="""let Nest n =
  if n = 0 then 0 else [n, Nest (n - 1)];;
Nest 2
""",
        expect=Expect(outcome="idle", renders=1, console=(),
                      reachable_views=3),
    ),
]


@dataclass
class ScenarioResult:
    scenario: Scenario
    passed: bool
    failures: list = field(default_factory=list)


def run_scenario(scenario: Scenario, budgets: Budgets = Budgets()) -> ScenarioResult:
    engine = Engine(parse_program(scenario.source), budgets=budgets,
                    source=scenario.source)
    error: Optional[EngineError] = None
    try:
        engine.run_events(list(scenario.events))
    except EngineError as err:
        error = err

    expect = scenario.expect
    failures: list[str] = []
    if expect.outcome == "idle":
        if error is not None:
            failures.append(f"expected idle, got {error.kind}")
    else:
        if error is None:
            failures.append(f"expected {expect.error_kind}, run idled")
        elif error.kind != expect.error_kind:
            failures.append(f"expected {expect.error_kind}, got {error.kind}")
    if expect.renders is not None and engine.renders != expect.renders:
        failures.append(f"renders: expected {expect.renders}, got {engine.renders}")
    if expect.console is not None and tuple(engine.console()) != expect.console:
        failures.append(f"console: expected {list(expect.console)}, "
                        f"got {engine.console()}")
    if expect.states is not None and error is None:
        for (path, label), want in expect.states.items():
            got = value_to_json(engine.cfg.mem.get(path).state(label).val)
            if got != want:
                failures.append(f"state {label}@{path}: expected {want!r}, "
                                f"got {got!r}")
    if expect.orphans is not None and error is None:
        live = reachable(engine.cfg.mem, engine.cfg.root)
        orphans = len(engine.cfg.mem) - len(live)
        if orphans != expect.orphans:
            failures.append(f"orphans: expected {expect.orphans}, got {orphans}")
    if expect.reachable_views is not None and error is None:
        live = reachable(engine.cfg.mem, engine.cfg.root)
        if len(live) != expect.reachable_views:
            failures.append(f"reachable views: expected {expect.reachable_views}, "
                            f"got {len(live)}")
    if expect.retry_passes is not None:
        for path, want in expect.retry_passes.items():
            got = sum(1 for step in engine.sink.steps for r in step.rules
                      if r.rule == "EvalMult" and r.path == path)
            if got != want:
                failures.append(f"retry passes at {path}: expected {want}, "
                                f"got {got}")
    return ScenarioResult(scenario, passed=not failures, failures=failures)


def run_all_scenarios(budgets: Budgets = Budgets()) -> list[ScenarioResult]:
    return [run_scenario(s, budgets) for s in SCENARIOS]


# -- seeded program generator -------------------------------------------------------

@dataclass(frozen=True)
class GeneratedProgram:
    source: str
    events: tuple
    all_pure: bool


_PURE_UPDATERS = ("fun s -> s + 1", "fun s -> s - 1", "fun s -> s",
                  "fun s -> 42", "fun s -> s * 2")
_IMPURE_UPDATER = 'fun s -> (print "u"; s + 1)'


def generate_program(seed: int) -> GeneratedProgram:
    """A small, terminating program with bounded hooks: at most 3 states,
    2 effects, and 2 children per component, integer state only."""
    rng = random.Random(seed)
    all_pure = True
    defs: list[str] = []

    n_states = rng.choice((1, 1, 2, 2, 3))
    binds = []
    for i in range(n_states):
        init = rng.choice(("x", "0", "1"))
        binds.append(f"  let (s{i}, set{i}) = useState {init} in")

    stmts: list[str] = []
    if rng.random() < 0.4:
        state = rng.randrange(n_states)
        guard = rng.choice((1, 2))
        stmts.append(f"  if s{state} < {guard} then set{state} (fun s -> s + 1);")
    if rng.random() < 0.3:
        stmts.append(f'  print s0;')

    n_effects = rng.choice((0, 1, 1, 2))
    for i in range(n_effects):
        state = rng.randrange(n_states)
        kind = rng.random()
        if kind < 0.35:
            guard = rng.choice((1, 2))
            if rng.random() < 0.2:
                all_pure = False
                updater = _IMPURE_UPDATER
            else:
                updater = "fun s -> s + 1"
            stmts.append(f"  useEffect (if s{state} < {guard} then "
                         f"set{state} ({updater}));")
        elif kind < 0.5:
            stmts.append(f"  useEffect (set{state} (fun s -> s));")
        elif kind < 0.65:
            stmts.append(f"  useEffect (set{state} (fun s -> s + 1); "
                         f"set{state} (fun s -> s - 1));")
        else:
            stmts.append(f'  useEffect (print "e{i}");')

    children: list[str] = []
    n_children = rng.choice((0, 0, 1, 1, 2))
    for i in range(n_children):
        kid = f"Kid{i}"
        kind = rng.random()
        if kind < 0.3:
            defs.append(f'let {kid} f = useEffect (f (fun v -> 42)); 0;;')
            children.append(f"{kid} set0")
        elif kind < 0.6:
            defs.append(f'let {kid} y = print "k{i}"; y;;')
            children.append(f"{kid} s0")
        else:
            defs.append(f"let {kid} y = [y, y + 1];;")
            children.append(f"{kid} (s0 + {i})")

    returns = ["s0", "[s0, 5]", f"if s0 = 0 then s0 else [s0]"]
    has_button = rng.random() < 0.45
    if has_button:
        inc = rng.choice((1, 2))
        returns = [f"[s0, button (fun _ -> set0 (fun s -> s + {inc}))]"]
    if children:
        returns = [f"[{', '.join(children)}, s0]"]
        if has_button:
            returns = [f"[{', '.join(children)}, "
                       f"button (fun _ -> set0 (fun s -> s + 1))]"]
    ret = rng.choice(returns)

    body_lines = binds + stmts + [f"  {ret};;"]
    defs.append("let Main x =\n" + "\n".join(body_lines))
    main_arg = rng.choice((0, 1))
    source = "\n".join(defs) + f"\nMain {main_arg}\n"

    events: tuple = ()
    if has_button:
        events = tuple(0 for _ in range(rng.choice((1, 1, 2))))
    return GeneratedProgram(source=source, events=events, all_pure=all_pure)


# -- seeded view generator -----------------------------------------------------------

_VIEW_UPDATER_SOURCES = _PURE_UPDATERS + (_IMPURE_UPDATER,)


def generate_views(seed: int, count: int) -> list[View]:
    """Valid standalone views with integer states and random update queues."""
    from .domains import Decision, Env, UNIT

    rng = random.Random(seed)
    rt = Runtime({}, TraceSink())
    lambdas = [parse_program(src).main for src in _VIEW_UPDATER_SOURCES]
    views: list[View] = []
    for _ in range(count):
        n_states = rng.choice((1, 1, 2, 3))
        sttst = []
        for label in range(n_states):
            queue = tuple(
                rt.alloc_clos(fn.param, fn.body, Env.empty())
                for fn in rng.choices(lambdas, k=rng.choice((0, 0, 1, 1, 2, 3)))
            )
            sttst.append((label, StateEntry(VInt(rng.randrange(0, 5)), queue)))
        dec = frozenset(
            d for d in (Decision.CHECK, Decision.EFFECT) if rng.random() < 0.4)
        views.append(View(spec=VComSpec("Gen", VInt(rng.randrange(0, 3))),
                          dec=dec, sttst=tuple(sttst), effq=(), child=UNIT))
    return views
