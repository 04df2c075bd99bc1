"""Error types raised by the parser, evaluator, and engine.

Engine errors are terminal for a run: once one is raised the engine
instance must not be stepped again.
"""

from __future__ import annotations


class LangError(Exception):
    """Base class for every error this package raises on purpose."""


# -- parse-time errors -------------------------------------------------------

class SyntaxError(LangError):  # noqa: A001 - deliberate, module-scoped
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class HookPlacementError(LangError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class DuplicateComponent(LangError):
    def __init__(self, name: str):
        super().__init__(f"component {name} is defined twice")
        self.name = name


# -- run-time errors ---------------------------------------------------------

class EngineError(LangError):
    """Terminal runtime failure; `kind` names the variant in messages."""

    kind = "EngineError"

    def record(self) -> dict:
        return {"kind": self.kind, "detail": str(self)}


class RetryLimitExceeded(EngineError):
    kind = "RetryLimitExceeded"

    def __init__(self, path: int, passes: int):
        super().__init__(
            f"RetryLimitExceeded: view at path {path} still requests a re-check "
            f"after {passes} body evaluation passes"
        )
        self.path = path
        self.passes = passes

    def record(self) -> dict:
        return {"kind": self.kind, "path": self.path, "passes": self.passes,
                "detail": str(self)}


class RerenderLimitExceeded(EngineError):
    kind = "RerenderLimitExceeded"

    def __init__(self, cycles: int):
        super().__init__(f"RerenderLimitExceeded: {cycles} render cycles without idling")
        self.cycles = cycles

    def record(self) -> dict:
        return {"kind": self.kind, "cycles": self.cycles, "detail": str(self)}


class CrossComponentSetDuringRender(EngineError):
    kind = "CrossComponentSetDuringRender"

    def __init__(self, target_path: int, current_path: int):
        super().__init__(
            f"CrossComponentSetDuringRender: body of view {current_path} called "
            f"the setter of view {target_path}"
        )
        self.target_path = target_path
        self.current_path = current_path

    def record(self) -> dict:
        return {"kind": self.kind, "path": self.current_path,
                "target": self.target_path, "detail": str(self)}


class UnknownComponent(EngineError):
    kind = "UnknownComponent"

    def __init__(self, name: str):
        super().__init__(f"UnknownComponent: {name} is not defined")
        self.name = name


class TypeMismatch(EngineError):
    kind = "TypeMismatch"

    def __init__(self, detail: str):
        super().__init__(f"TypeMismatch: {detail}")
        self.detail = detail


class UnboundVariable(EngineError):
    kind = "UnboundVariable"

    def __init__(self, name: str):
        super().__init__(f"UnboundVariable: {name}")
        self.name = name


class HookInNormalPhase(EngineError):
    """Defensive: the parser should make this unreachable."""

    kind = "HookInNormalPhase"

    def __init__(self) -> None:
        super().__init__("HookInNormalPhase: hook evaluated outside a component body")


class NoSuchHandler(EngineError):
    kind = "NoSuchHandler"

    def __init__(self, index: int, available: int):
        super().__init__(f"NoSuchHandler: index {index}, {available} handler(s) available")
        self.index = index
        self.available = available


class NotAViewSpec(EngineError):
    kind = "NotAViewSpec"

    def __init__(self, detail: str):
        super().__init__(f"NotAViewSpec: {detail}")
        self.detail = detail


# -- oracle-side errors ------------------------------------------------------

class InapplicableImpureUpdates(LangError):
    """The similar-transition check requires every queued updater to be pure."""
