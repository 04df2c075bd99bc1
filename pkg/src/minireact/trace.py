"""Structured run recording: rule firings, console lines, and snapshots.

A `TraceSink` is owned by one engine.  Each render-step transition opens a
step record; everything fired until the step closes (rules, console lines)
lands in that record, and the step closes with a snapshot of the machine.
The serialized form is stable: canonical JSON with sorted keys, so equal
traces are byte-equal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .domains import (
    Mode, TPath, Tree, Value, VArray, VBool, VClos, VComSpec, VCompName,
    VInt, VSetter, VStr, VUnit, View, closure_src,
)

TRACE_FORMAT = 1
TRACE_EXTENSION = ".rtrace.json"

TRANSITION_RULES = ("StepInit", "StepEffect", "StepCheck", "StepEvent")

RULE_TAGS = frozenset(TRANSITION_RULES) | frozenset({
    # expression evaluation (render-relevant rules)
    "AppCom", "AppSetComp", "AppSetNormal", "SttBind", "SttReBind", "Eff",
    # base-layer evaluation
    "Unit", "True", "False", "Int", "Str", "List", "Var", "Cond", "Func",
    "AppFunc", "LetBind", "Seq", "Bop", "Print",
    # retrying body evaluation
    "EvalOnce", "EvalMult",
    # view-spec initialization
    "InitConst", "InitClos", "InitArray", "InitCom",
    # effect commit
    "CommitEffsConst", "CommitEffsClos", "CommitEffsArray",
    "CommitEffsPathIdle", "CommitEffsPath",
    # re-render check
    "CheckConst", "CheckClos", "CheckArray", "CheckIdle",
    "CheckNoEffect", "CheckEffect",
    # reconciliation
    "ReconcileArray", "ReconcileComEffect", "ReconcileComNew", "ReconcileOther",
})


@dataclass(frozen=True)
class RuleFired:
    rule: str
    path: Optional[int] = None
    label: Optional[int] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"rule": self.rule, "path": self.path, "label": self.label,
                "detail": self.detail}

    @staticmethod
    def from_json(obj: dict) -> "RuleFired":
        return RuleFired(obj["rule"], obj.get("path"), obj.get("label"),
                         obj.get("detail", ""))


@dataclass
class StepRecord:
    transition: str
    console: list[str] = field(default_factory=list)
    rules: list[RuleFired] = field(default_factory=list)
    snapshot: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "transition": self.transition,
            "console": list(self.console),
            "rules": [r.to_json() for r in self.rules],
            "snapshot": self.snapshot,
        }


class TraceSink:
    """Order-preserving recorder for one engine run."""

    def __init__(self) -> None:
        self.steps: list[StepRecord] = []
        self.console_lines: list[str] = []
        self._current: Optional[StepRecord] = None

    def begin_step(self, transition: str) -> None:
        assert transition in TRANSITION_RULES, transition
        record = StepRecord(transition=transition)
        record.rules.append(RuleFired(transition))
        self._current = record
        self.steps.append(record)

    def rule(self, name: str, path: Optional[int] = None,
             label: Optional[int] = None, detail: str = "") -> None:
        assert name in RULE_TAGS, name
        if self._current is not None:
            self._current.rules.append(RuleFired(name, path, label, detail))

    def console(self, line: str) -> None:
        self.console_lines.append(line)
        if self._current is not None:
            self._current.console.append(line)

    def end_step(self, snapshot: dict) -> None:
        if self._current is not None:
            self._current.snapshot = snapshot
            self._current = None


# -- value / tree serialization ---------------------------------------------------

def value_to_json(v: Value):
    if isinstance(v, VUnit):
        return None
    if isinstance(v, VBool):
        return v.value
    if isinstance(v, VInt):
        return v.value
    if isinstance(v, VStr):
        return v.value
    if isinstance(v, VClos):
        return {"kind": "closure", "id": v.clos_id, "param": v.param,
                "body_src": closure_src(v)}
    if isinstance(v, VSetter):
        return {"kind": "setter", "label": v.label, "path": v.path}
    if isinstance(v, VCompName):
        return {"kind": "component", "name": v.name}
    if isinstance(v, VComSpec):
        return {"kind": "comspec", "name": v.name, "arg": value_to_json(v.arg)}
    if isinstance(v, VArray):
        return [value_to_json(item) for item in v.items]
    raise TypeError(f"not a serializable value: {v!r}")


def tree_to_json(t: Tree):
    if isinstance(t, TPath):
        return {"kind": "path", "path": t.path}
    if isinstance(t, VArray):
        return [tree_to_json(item) for item in t.items]
    return value_to_json(t)


def view_to_json(view: View) -> dict:
    sttst = {}
    for label, entry in view.sttst:
        sttst[str(label)] = {
            "val": value_to_json(entry.val),
            "sttq_len": len(entry.sttq),
            "sttq": [value_to_json(cl) for cl in entry.sttq],
        }
    return {
        "spec": {"name": view.spec.name, "arg": value_to_json(view.spec.arg)},
        "dec": sorted(d.value for d in view.dec),
        "sttst": sttst,
        "effq_len": len(view.effq),
        "child": tree_to_json(view.child),
    }


def build_snapshot(root: Tree, mem, mode: Optional[Mode]) -> dict:
    views = {str(path): view_to_json(view) for path, view in mem.items()}
    return {
        "root": tree_to_json(root),
        "views": views,
        "mode": mode.value if mode is not None else None,
    }


# -- trace files -------------------------------------------------------------------

def build_trace_file(program: str, budgets: dict, steps: list[StepRecord],
                     outcome: dict) -> dict:
    return {
        "format": TRACE_FORMAT,
        "program": program,
        "budgets": budgets,
        "steps": [s.to_json() for s in steps],
        "outcome": outcome,
    }


def serialize(trace: dict) -> bytes:
    return json.dumps(trace, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


class TraceFormatError(ValueError):
    pass


def deserialize(data: bytes) -> dict:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TraceFormatError(f"not a trace file: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("format") != TRACE_FORMAT:
        raise TraceFormatError("unsupported or missing trace format tag")
    for key in ("program", "budgets", "steps", "outcome"):
        if key not in obj:
            raise TraceFormatError(f"trace file is missing {key!r}")
    if not isinstance(obj["steps"], list):
        raise TraceFormatError("steps must be a list")
    for step in obj["steps"]:
        for key in ("transition", "console", "rules", "snapshot"):
            if key not in step:
                raise TraceFormatError(f"step record is missing {key!r}")
    return obj


# -- snapshot diffing ----------------------------------------------------------------

def _entry_changes(label: str, before: dict, after: dict) -> list[dict]:
    changes = []
    for fld in ("val", "sttq_len"):
        if before[fld] != after[fld]:
            changes.append({"field": f"sttst.{label}.{fld}",
                            "from": before[fld], "to": after[fld]})
    return changes


def snapshot_diff(a: dict, b: dict) -> dict:
    """Field-level changes from snapshot `a` to snapshot `b`."""
    diff: dict = {"added": [], "removed": [], "changed": {}}
    if a.get("mode") != b.get("mode"):
        diff["mode"] = {"from": a.get("mode"), "to": b.get("mode")}
    if a.get("root") != b.get("root"):
        diff["root"] = {"from": a.get("root"), "to": b.get("root")}
    views_a, views_b = a.get("views", {}), b.get("views", {})
    diff["added"] = sorted((p for p in views_b if p not in views_a), key=int)
    diff["removed"] = sorted((p for p in views_a if p not in views_b), key=int)
    for path in sorted((p for p in views_a if p in views_b), key=int):
        va, vb = views_a[path], views_b[path]
        changes: list[dict] = []
        for fld in ("spec", "dec", "effq_len", "child"):
            if va[fld] != vb[fld]:
                changes.append({"field": fld, "from": va[fld], "to": vb[fld]})
        for label in va["sttst"]:
            if label in vb["sttst"]:
                changes.extend(_entry_changes(label, va["sttst"][label],
                                              vb["sttst"][label]))
            else:
                changes.append({"field": f"sttst.{label}",
                                "from": va["sttst"][label], "to": None})
        for label in vb["sttst"]:
            if label not in va["sttst"]:
                changes.append({"field": f"sttst.{label}",
                                "from": None, "to": vb["sttst"][label]})
        if changes:
            diff["changed"][path] = changes
    return diff


def is_empty_diff(diff: dict) -> bool:
    return (not diff["added"] and not diff["removed"] and not diff["changed"]
            and "mode" not in diff and "root" not in diff)


def reachable_paths_of_snapshot(snapshot: dict) -> set[str]:
    """Paths reachable from the snapshot's root through child trees."""
    views = snapshot.get("views", {})
    seen: set[str] = set()

    def walk(node) -> None:
        if isinstance(node, list):
            for item in node:
                walk(item)
        elif isinstance(node, dict) and node.get("kind") == "path":
            key = str(node["path"])
            if key not in seen and key in views:
                seen.add(key)
                walk(views[key]["child"])

    walk(snapshot.get("root"))
    return seen
