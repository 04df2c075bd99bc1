"""Semantic domains: values, environments, views, trees, and tree memory.

Everything here is treated as immutable.  Views and memories are updated
functionally (each update returns a fresh object), which lets the check
and reconcile judgments keep the pre-update memory around, and lets
snapshots alias live structures safely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Union

from .errors import UnboundVariable
from .syntax import Expr, to_source_expr


class Phase(enum.Enum):
    INIT = "Init"
    SUCC = "Succ"
    NORMAL = "Normal"


class Mode(enum.Enum):
    RENDERED = "Rendered"
    CHECK = "Check"
    EVENT_LOOP = "EventLoop"


class Decision(enum.Enum):
    CHECK = "Check"
    EFFECT = "Effect"


# -- values --------------------------------------------------------------------

@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True)
class VBool:
    value: bool


@dataclass(frozen=True)
class VInt:
    value: int


@dataclass(frozen=True)
class VStr:
    value: str


@dataclass(frozen=True, eq=False)
class VClos:
    """Closure; `clos_id` is its allocation identity within one run."""

    param: str
    body: Expr
    env: "Env"
    clos_id: int


@dataclass(frozen=True)
class VSetter:
    label: int
    path: int


@dataclass(frozen=True)
class VCompName:
    name: str


@dataclass(frozen=True, eq=False)
class VComSpec:
    name: str
    arg: "Value"


@dataclass(frozen=True, eq=False)
class VArray:
    items: tuple


@dataclass(frozen=True)
class TPath:
    path: int


UNIT = VUnit()
TRUE = VBool(True)
FALSE = VBool(False)

Const = (VUnit, VBool, VInt, VStr)
Value = Union[VUnit, VBool, VInt, VStr, VClos, VSetter, VCompName, VComSpec, VArray]
Tree = Union[VUnit, VBool, VInt, VStr, VClos, TPath, VArray]


def is_view_spec(v: Value) -> bool:
    if isinstance(v, Const) or isinstance(v, VClos):
        return True
    if isinstance(v, VComSpec):
        return True
    if isinstance(v, VArray):
        return all(is_view_spec(item) for item in v.items)
    return False


def value_equiv(a: Value, b: Value) -> bool:
    """The equivalence used by state rebinding: structural on constants,
    allocation identity on closures, (label, path) on setters."""
    if isinstance(a, Const) and isinstance(b, Const):
        return a == b
    if isinstance(a, VClos) and isinstance(b, VClos):
        return a.clos_id == b.clos_id
    if isinstance(a, VSetter) and isinstance(b, VSetter):
        return a == b
    if isinstance(a, VCompName) and isinstance(b, VCompName):
        return a == b
    if isinstance(a, VComSpec) and isinstance(b, VComSpec):
        return a.name == b.name and value_equiv(a.arg, b.arg)
    if isinstance(a, VArray) and isinstance(b, VArray):
        return len(a.items) == len(b.items) and all(
            value_equiv(x, y) for x, y in zip(a.items, b.items))
    return False


def format_value(v: Value) -> str:
    """Console rendering used by print."""
    if isinstance(v, VUnit):
        return "()"
    if isinstance(v, VBool):
        return "true" if v.value else "false"
    if isinstance(v, VInt):
        return str(v.value)
    if isinstance(v, VStr):
        return v.value
    if isinstance(v, VClos):
        return "<fun>"
    if isinstance(v, VSetter):
        return f"<setter {v.label}@{v.path}>"
    if isinstance(v, VCompName):
        return v.name
    if isinstance(v, VComSpec):
        return f"<{v.name} {format_value(v.arg)}>"
    if isinstance(v, VArray):
        return "[" + ", ".join(format_value(item) for item in v.items) + "]"
    raise TypeError(f"not a value: {v!r}")


def closure_src(cl: VClos) -> str:
    return f"fun {cl.param} -> {to_source_expr(cl.body)}"


# -- environments ----------------------------------------------------------------

class Env:
    """Ordered list of bindings; lookup returns the most recent one."""

    __slots__ = ("_name", "_value", "_parent")

    def __init__(self, name: Optional[str] = None, value: Optional[Value] = None,
                 parent: Optional["Env"] = None):
        self._name = name
        self._value = value
        self._parent = parent

    @staticmethod
    def empty() -> "Env":
        return _EMPTY_ENV

    def bind(self, name: str, value: Value) -> "Env":
        return Env(name, value, self)

    def lookup(self, name: str) -> Value:
        env: Optional[Env] = self
        while env is not None and env._name is not None:
            if env._name == name:
                return env._value  # type: ignore[return-value]
            env = env._parent
        raise UnboundVariable(name)

    def items(self) -> list[tuple[str, Value]]:
        """Bindings from oldest to newest (shadowed entries included)."""
        out: list[tuple[str, Value]] = []
        env: Optional[Env] = self
        while env is not None and env._name is not None:
            out.append((env._name, env._value))  # type: ignore[arg-type]
            env = env._parent
        out.reverse()
        return out


_EMPTY_ENV = Env()


# -- views and tree memory --------------------------------------------------------

@dataclass(frozen=True)
class StateEntry:
    val: Value
    sttq: tuple  # queued updater closures, FIFO


@dataclass(frozen=True, eq=False)
class View:
    spec: VComSpec
    dec: frozenset  # of Decision
    sttst: tuple    # ordered (label, StateEntry) pairs
    effq: tuple     # queued effect thunks (VClos), FIFO
    child: Tree

    @staticmethod
    def empty(spec: VComSpec) -> "View":
        return View(spec=spec, dec=frozenset(), sttst=(), effq=(), child=UNIT)

    def state(self, label: int) -> StateEntry:
        for lbl, entry in self.sttst:
            if lbl == label:
                return entry
        raise KeyError(label)

    def has_state(self, label: int) -> bool:
        return any(lbl == label for lbl, _ in self.sttst)

    def labels(self) -> list[int]:
        return [lbl for lbl, _ in self.sttst]

    def with_state(self, label: int, entry: StateEntry) -> "View":
        if self.has_state(label):
            sttst = tuple((lbl, entry if lbl == label else old)
                          for lbl, old in self.sttst)
        else:
            sttst = self.sttst + ((label, entry),)
        return replace(self, sttst=sttst)

    def with_dec(self, dec: frozenset) -> "View":
        return replace(self, dec=dec)

    def add_dec(self, d: Decision) -> "View":
        return replace(self, dec=self.dec | {d})

    def without_dec(self, d: Decision) -> "View":
        return replace(self, dec=self.dec - {d})

    def with_effq(self, effq: tuple) -> "View":
        return replace(self, effq=effq)

    def with_child(self, child: Tree) -> "View":
        return replace(self, child=child)

    def with_spec(self, spec: VComSpec) -> "View":
        return replace(self, spec=spec)


class TreeMemory:
    """Map from paths to views; copied on write, never deletes a key."""

    __slots__ = ("_views",)

    def __init__(self, views: Optional[dict[int, View]] = None):
        self._views = views if views is not None else {}

    @staticmethod
    def empty() -> "TreeMemory":
        return TreeMemory()

    def get(self, path: int) -> View:
        return self._views[path]

    def contains(self, path: int) -> bool:
        return path in self._views

    def set(self, path: int, view: View) -> "TreeMemory":
        views = dict(self._views)
        views[path] = view
        return TreeMemory(views)

    def paths(self) -> list[int]:
        return list(self._views.keys())

    def items(self) -> list[tuple[int, View]]:
        return list(self._views.items())

    def __len__(self) -> int:
        return len(self._views)


def fresh_path(counter: int) -> tuple[int, int]:
    """Allocate the next path: returns (path, next counter value)."""
    return counter, counter + 1


def tree_kind(t: Tree) -> str:
    if isinstance(t, VUnit):
        return "unit"
    if isinstance(t, (VBool, VInt, VStr)):
        return "const"
    if isinstance(t, VClos):
        return "closure"
    if isinstance(t, TPath):
        return "path"
    if isinstance(t, VArray):
        return "array"
    raise TypeError(f"not a tree: {t!r}")
