"""The render-loop state machine.

One `Engine` owns one run: boot evaluates the main expression and mounts
the root tree (mode Rendered); stepping then alternates committing effects
(Rendered -> Check) and checking for re-renders (Check -> Rendered or
EventLoop); an event dispatched in EventLoop runs a handler body and goes
back to Check.  Budgets bound both in-body retries and effect-driven
re-render loops.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .domains import Env, Mode, Tree, TreeMemory, UNIT, is_view_spec, format_value
from .errors import EngineError, NoSuchHandler, NotAViewSpec, RerenderLimitExceeded
from .evaluator import Ctx, DEFAULT_RETRY_LIMIT, Runtime, eval_expr
from .renderer import check, commit_effs, handlers, init
from .syntax import Program, build_def_table, parse_program
from .trace import TraceSink, build_snapshot, build_trace_file

DEFAULT_RERENDER_LIMIT = 100


@dataclass(frozen=True)
class Budgets:
    retry_limit: int = DEFAULT_RETRY_LIMIT
    rerender_limit: int = DEFAULT_RERENDER_LIMIT

    def to_json(self) -> dict:
        return {"retry_limit": self.retry_limit,
                "rerender_limit": self.rerender_limit}


@dataclass(frozen=True)
class EngineConfig:
    root: Tree
    mem: TreeMemory
    mode: Mode
    path_counter: int
    step_index: int


class Engine:
    """Single-threaded driver around one engine configuration."""

    def __init__(self, program: Program, budgets: Budgets = Budgets(),
                 sink: Optional[TraceSink] = None, source: str = ""):
        self.program = program
        self.source = source
        self.budgets = budgets
        self.sink = sink if sink is not None else TraceSink()
        defs, main = build_def_table(program)
        self.defs = defs
        self.main = main
        self.rt = Runtime(defs, self.sink, retry_limit=budgets.retry_limit)
        self.cfg: Optional[EngineConfig] = None
        self.renders = 0  # entries into Rendered mode
        self.error: Optional[EngineError] = None

    # -- transitions ------------------------------------------------------------

    def boot(self) -> EngineConfig:
        """StepInit: evaluate the main expression and mount the root tree."""
        assert self.cfg is None, "already booted"
        self.sink.begin_step("StepInit")
        try:
            value, _ = eval_expr(self.rt, Ctx.whole(TreeMemory.empty()),
                                 Env.empty(), self.main)
            if not is_view_spec(value):
                raise NotAViewSpec(
                    f"main evaluated to {format_value(value)}")
            root, mem, counter = init(self.rt, TreeMemory.empty(), value, 0)
        except EngineError as err:
            self._fail(err)
            raise
        self.cfg = EngineConfig(root=root, mem=mem, mode=Mode.RENDERED,
                                path_counter=counter, step_index=1)
        self.renders += 1
        self.sink.end_step(self.snapshot())
        return self.cfg

    def step(self, event: Optional[int] = None) -> EngineConfig:
        """One render-step transition; `event` is required in EventLoop."""
        if self.cfg is None:
            self.boot()
            return self.cfg
        self._ensure_alive()
        cfg = self.cfg
        if cfg.mode == Mode.RENDERED:
            assert event is None, "events are only handled in EventLoop"
            self.sink.begin_step("StepEffect")
            try:
                mem = commit_effs(self.rt, cfg.mem, cfg.root)
            except EngineError as err:
                self._fail(err)
                raise
            self.cfg = replace(cfg, mem=mem, mode=Mode.CHECK,
                               step_index=cfg.step_index + 1)
        elif cfg.mode == Mode.CHECK:
            assert event is None, "events are only handled in EventLoop"
            self.sink.begin_step("StepCheck")
            try:
                mode, mem, counter = check(self.rt, cfg.mem, cfg.root,
                                           cfg.path_counter)
            except EngineError as err:
                self._fail(err)
                raise
            if mode == Mode.RENDERED:
                self.renders += 1
            self.cfg = replace(cfg, mem=mem, mode=mode, path_counter=counter,
                               step_index=cfg.step_index + 1)
        else:
            available = handlers(cfg.mem, cfg.root)
            if event is None or not (0 <= event < len(available)):
                raise NoSuchHandler(-1 if event is None else event, len(available))
            _, clos = available[event]
            self.sink.begin_step("StepEvent")
            try:
                _, ctx = eval_expr(self.rt, Ctx.whole(cfg.mem),
                                   clos.env.bind(clos.param, UNIT), clos.body)
            except EngineError as err:
                self._fail(err)
                raise
            self.cfg = replace(cfg, mem=ctx.mem, mode=Mode.CHECK,
                               step_index=cfg.step_index + 1)
        self.sink.end_step(self.snapshot())
        return self.cfg

    def run_until_idle(self) -> EngineConfig:
        """Step (eventless) until EventLoop; bounded by the re-render budget."""
        if self.cfg is None:
            self.boot()
        self._ensure_alive()
        cycles = 0
        while self.cfg.mode != Mode.EVENT_LOOP:
            before = self.cfg.mode
            self.step()
            if before == Mode.CHECK and self.cfg.mode == Mode.RENDERED:
                cycles += 1
                if cycles >= self.budgets.rerender_limit:
                    err = RerenderLimitExceeded(cycles)
                    self._fail(err)
                    raise err
        return self.cfg

    def dispatch(self, handler: int) -> EngineConfig:
        """Deliver one user event; engine must be idle in EventLoop."""
        self._ensure_alive()
        if self.cfg is None or self.cfg.mode != Mode.EVENT_LOOP:
            raise NoSuchHandler(handler, 0)
        return self.step(event=handler)

    def run_events(self, events: list[int]) -> EngineConfig:
        """Run to idle, then deliver each event and run to idle again."""
        self.run_until_idle()
        for handler in events:
            self.dispatch(handler)
            self.run_until_idle()
        return self.cfg

    # -- inspection --------------------------------------------------------------

    def handlers(self) -> list:
        if self.cfg is None:
            return []
        return handlers(self.cfg.mem, self.cfg.root)

    def snapshot(self) -> dict:
        if self.cfg is None:
            return build_snapshot(UNIT, TreeMemory.empty(), None)
        return build_snapshot(self.cfg.root, self.cfg.mem, self.cfg.mode)

    def console(self) -> list[str]:
        return list(self.sink.console_lines)

    def outcome(self) -> dict:
        if self.error is not None:
            return {"error": self.error.record()}
        if self.cfg is not None and self.cfg.mode == Mode.EVENT_LOOP:
            return {"idle": True}
        return {"idle": False}

    def trace_file(self) -> dict:
        return build_trace_file(self.source, self.budgets.to_json(),
                                self.sink.steps, self.outcome())

    def _ensure_alive(self) -> None:
        if self.error is not None:
            raise self.error

    def _fail(self, err: EngineError) -> None:
        self.error = err
        self.sink.end_step(self.snapshot())


def boot(program: Program, budgets: Budgets = Budgets(),
         sink: Optional[TraceSink] = None, source: str = "") -> Engine:
    """Build an engine and perform the initial mount."""
    engine = Engine(program, budgets=budgets, sink=sink, source=source)
    engine.boot()
    return engine


def run_source(source: str, budgets: Budgets = Budgets(),
               events: Optional[list[int]] = None) -> Engine:
    """Parse and run a program to idle, dispatching scripted events."""
    engine = Engine(parse_program(source), budgets=budgets, source=source)
    engine.run_events(events or [])
    return engine
