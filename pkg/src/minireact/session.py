"""Newline-delimited JSON request/reply session over byte streams.

Requests: {"cmd":"load","program":...}, {"cmd":"step"},
{"cmd":"run_until_idle"}, {"cmd":"event","handler":n}, {"cmd":"snapshot"},
{"cmd":"reset"}.  Every reply carries the current mode, the console lines
and rule firings produced since the previous reply, the step records they
belong to, and a snapshot.  Protocol errors answer ok=false and leave the
session alive.
"""

from __future__ import annotations

import json
import sys
from typing import Optional, TextIO

from .engine import Budgets, Engine
from .errors import EngineError, LangError
from .syntax import parse_program


class Session:
    def __init__(self, budgets: Budgets = Budgets()):
        self.budgets = budgets
        self.source: Optional[str] = None
        self.engine: Optional[Engine] = None
        self._console_seen = 0
        self._steps_seen = 0

    # -- command handling ------------------------------------------------------

    def handle(self, request: dict) -> dict:
        if not isinstance(request, dict) or "cmd" not in request:
            return self._error("malformed request: missing cmd")
        cmd = request["cmd"]
        if cmd == "load":
            return self._load(request)
        if cmd == "reset":
            self.engine = None
            self._console_seen = 0
            self._steps_seen = 0
            return self._reply(ok=True)
        if cmd == "snapshot":
            if self.source is None:
                return self._error("no program loaded")
            return self._reply(ok=True)
        if cmd in ("step", "run_until_idle", "event"):
            if self.source is None:
                return self._error("no program loaded")
            if self.engine is None:
                self.engine = Engine(parse_program(self.source),
                                     budgets=self.budgets, source=self.source)
            try:
                if cmd == "step":
                    self.engine.step()
                elif cmd == "run_until_idle":
                    self.engine.run_until_idle()
                else:
                    handler = request.get("handler")
                    if not isinstance(handler, int):
                        return self._error("event requires an integer handler")
                    self.engine.dispatch(handler)
            except EngineError as err:
                return self._reply(ok=False, error=str(err))
            return self._reply(ok=True)
        return self._error(f"unknown command {cmd!r}")

    def _load(self, request: dict) -> dict:
        program = request.get("program")
        if not isinstance(program, str):
            return self._error("load requires a program string")
        try:
            parse_program(program)
        except LangError as err:
            return self._error(f"parse error: {err}")
        self.source = program
        self.engine = None
        self._console_seen = 0
        self._steps_seen = 0
        return self._reply(ok=True)

    # -- reply assembly -----------------------------------------------------------

    def _reply(self, ok: bool, error: Optional[str] = None) -> dict:
        mode = None
        snapshot = None
        console: list[str] = []
        rules: list[dict] = []
        steps: list[dict] = []
        if self.engine is not None:
            if self.engine.cfg is not None:
                mode = self.engine.cfg.mode.value
            snapshot = self.engine.snapshot()
            sink = self.engine.sink
            console = sink.console_lines[self._console_seen:]
            self._console_seen = len(sink.console_lines)
            new_steps = sink.steps[self._steps_seen:]
            self._steps_seen = len(sink.steps)
            steps = [s.to_json() for s in new_steps]
            rules = [r.to_json() for s in new_steps for r in s.rules]
        reply = {
            "ok": ok,
            "mode": mode,
            "console": console,
            "rules": rules,
            "snapshot": snapshot,
            "steps": steps,
        }
        if error is not None:
            reply["error"] = error
        return reply

    def _error(self, message: str) -> dict:
        return self._reply(ok=False, error=message)


def serve(stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None,
          budgets: Budgets = Budgets()) -> None:
    """Serve the protocol until EOF on the input stream."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = Session(budgets=budgets)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            reply = session._error(f"malformed request: {exc}")
        else:
            reply = session.handle(request)
        stdout.write(json.dumps(reply, sort_keys=True, separators=(",", ":"),
                                ensure_ascii=False) + "\n")
        stdout.flush()
