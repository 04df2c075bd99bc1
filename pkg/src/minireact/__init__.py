"""A miniature React: an executable render model for function components
with state and effect hooks, plus a rule-level tracer and conformance
oracles.

The language is a small applicative calculus.  Components are functions
from an argument to a view spec; the engine mounts specs into a tree
memory and drives the render loop (Rendered -> Check -> Rendered/EventLoop)
while state updates queue on the owning view and effects run depth-first
post-order after each render.
"""

from .domains import (
    Decision, Env, Mode, Phase, StateEntry, TPath, TreeMemory, VArray, VBool,
    VClos, VComSpec, VCompName, VInt, VSetter, VStr, VUnit, View, UNIT, TRUE,
    FALSE, format_value, fresh_path, value_equiv,
)
from .engine import Budgets, Engine, EngineConfig, boot, run_source
from .errors import (
    CrossComponentSetDuringRender, DuplicateComponent, EngineError,
    HookInNormalPhase, HookPlacementError, InapplicableImpureUpdates,
    LangError, NoSuchHandler, NotAViewSpec, RerenderLimitExceeded,
    RetryLimitExceeded, TypeMismatch, UnboundVariable, UnknownComponent,
)
from .evaluator import Ctx, Runtime, eval_body_retry, eval_expr
from .oracle import (
    NormalizedEntry, check_coherence, check_similar_transition,
    check_stability, check_theorem_effect_condition, check_theorem_reeval,
    check_validity, is_pure, mems_similar, normalize_entry, normalize_view,
    reachable, views_e_equivalent, views_equal, views_similar,
)
from .renderer import check, commit_effs, handlers, init, reconcile
from .session import Session, serve
from .syntax import (
    ComponentDef, Program, build_def_table, collect_labels, parse_program,
    to_source, to_source_expr,
)
from .trace import (
    RuleFired, TraceSink, build_snapshot, build_trace_file, deserialize,
    is_empty_diff, serialize, snapshot_diff,
)

__version__ = "0.1.0"
