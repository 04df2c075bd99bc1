"""Concrete syntax for the hook language.

Source files (`.rtr`, UTF-8, `(* ... *)` comments) hold a sequence of
component definitions terminated by `;;`, followed by one main expression:

    let Counter x =
      let (s, setS) = useState x in
      [s, button (fun _ -> setS (fun s -> s+1))];;
    Counter 0

The parser is a hand-written recursive descent with OCaml-like precedence.
`button e` desugars to `e`, and `if e1 then e2` gets a unit else branch.
After parsing, hook placement is enforced (hooks only on the statement
spine of a component body) and every state binding receives a label,
assigned in pre-order so that labels are stable across reparses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import DuplicateComponent, HookPlacementError, SyntaxError


# -- AST ----------------------------------------------------------------------

@dataclass(eq=True)
class Expr:
    pass


@dataclass(eq=True)
class UnitE(Expr):
    pass


@dataclass(eq=True)
class BoolE(Expr):
    value: bool


@dataclass(eq=True)
class IntE(Expr):
    value: int


@dataclass(eq=True)
class StrE(Expr):
    value: str


@dataclass(eq=True)
class VarE(Expr):
    name: str


@dataclass(eq=True)
class CompNameE(Expr):
    name: str


@dataclass(eq=True)
class BinopE(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(eq=True)
class CondE(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass(eq=True)
class FnE(Expr):
    param: str
    body: Expr


@dataclass(eq=True)
class AppE(Expr):
    fn: Expr
    arg: Expr


@dataclass(eq=True)
class SeqE(Expr):
    first: Expr
    second: Expr


@dataclass(eq=True)
class LetE(Expr):
    name: str
    value: Expr
    body: Expr


@dataclass(eq=True)
class ArrayE(Expr):
    items: list[Expr]


@dataclass(eq=True)
class StateBindE(Expr):
    """`let (var, setter) = useState init in body`, labelled post-parse."""

    var: str
    setter: str
    init: Expr
    body: Expr
    label: int = field(default=-1)


@dataclass(eq=True)
class EffectE(Expr):
    body: Expr


@dataclass(eq=True)
class PrintE(Expr):
    arg: Expr


@dataclass(eq=True)
class ComponentDef:
    name: str
    param: str
    body: Expr


@dataclass(eq=True)
class Program:
    defs: list[ComponentDef]
    main: Expr


# -- lexer ---------------------------------------------------------------------

KEYWORDS = {
    "let", "in", "fun", "if", "then", "else", "true", "false",
    "useState", "useEffect", "print", "button", "mod",
}

SYMBOLS = [
    ";;", "->", "<=", ">=", "<>", "&&", "||",
    "(", ")", "[", "]", ",", ";", "=", "<", ">", "+", "-", "*", "/",
]


@dataclass
class Token:
    kind: str  # INT STRING IDENT CAPIDENT keyword or symbol text, EOF
    text: str
    line: int
    col: int


def _lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg: str) -> SyntaxError:
        return SyntaxError(msg, line, col)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("(*", i):
            depth, start_line, start_col = 1, line, col
            i += 2
            col += 2
            while i < n and depth > 0:
                if source.startswith("(*", i):
                    depth += 1
                    i += 2
                    col += 2
                elif source.startswith("*)", i):
                    depth -= 1
                    i += 2
                    col += 2
                elif source[i] == "\n":
                    i += 1
                    line += 1
                    col = 1
                else:
                    i += 1
                    col += 1
            if depth > 0:
                raise SyntaxError("unterminated comment", start_line, start_col)
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            chars: list[str] = []
            while i < n and source[i] != '"':
                c = source[i]
                if c == "\n":
                    raise SyntaxError("unterminated string literal", start_line, start_col)
                if c == "\\":
                    if i + 1 >= n:
                        raise SyntaxError("unterminated escape", line, col)
                    esc = source[i + 1]
                    chars.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    i += 2
                    col += 2
                else:
                    chars.append(c)
                    i += 1
                    col += 1
            if i >= n:
                raise SyntaxError("unterminated string literal", start_line, start_col)
            i += 1
            col += 1
            tokens.append(Token("STRING", "".join(chars), start_line, start_col))
            continue
        if ch.isdigit():
            start_col = col
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", source[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            start_col = col
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_" or source[j] == "'"):
                j += 1
            word = source[i:j]
            if word in KEYWORDS:
                kind = word
            elif word[0].isupper():
                kind = "CAPIDENT"
            else:
                kind = "IDENT"
            tokens.append(Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token(sym, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise err(f"unexpected character {ch!r}")
    tokens.append(Token("EOF", "", line, col))
    return tokens


# -- parser --------------------------------------------------------------------

_CMP_OPS = ("=", "<>", "<", "<=", ">", ">=")
_ATOM_STARTS = {"(", "[", "INT", "STRING", "IDENT", "CAPIDENT", "true", "false"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise SyntaxError(f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                              tok.line, tok.col)
        return self.advance()

    # program := (let CAPIDENT IDENT = expr ;;)* expr (;;)? EOF
    def program(self) -> Program:
        defs: list[ComponentDef] = []
        while self.at("let") and self.peek(1).kind == "CAPIDENT":
            self.advance()
            name = self.advance().text
            param = self.expect("IDENT").text
            self.expect("=")
            body = self.expr()
            self.expect(";;")
            defs.append(ComponentDef(name, param, body))
        main = self.expr()
        if self.at(";;"):
            self.advance()
        tok = self.peek()
        if tok.kind != "EOF":
            raise SyntaxError(f"unexpected {tok.text!r} after main expression",
                              tok.line, tok.col)
        return Program(defs, main)

    # expr := nonseq (';' expr)?
    def expr(self) -> Expr:
        first = self.nonseq()
        if self.at(";"):
            self.advance()
            return SeqE(first, self.expr())
        return first

    def nonseq(self) -> Expr:
        tok = self.peek()
        if tok.kind == "let":
            return self.let_form()
        if tok.kind == "fun":
            self.advance()
            param = self.expect("IDENT").text
            self.expect("->")
            return FnE(param, self.expr())
        if tok.kind == "if":
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.nonseq()
            if self.at("else"):
                self.advance()
                other = self.nonseq()
            else:
                other = UnitE()
            return CondE(cond, then, other)
        return self.or_level()

    def let_form(self) -> Expr:
        tok = self.advance()  # let
        if self.at("("):
            self.advance()
            var = self.expect("IDENT").text
            self.expect(",")
            setter = self.expect("IDENT").text
            self.expect(")")
            self.expect("=")
            use = self.peek()
            if use.kind != "useState":
                raise SyntaxError("expected useState after a pair binder",
                                  use.line, use.col)
            self.advance()
            init = self.atom()
            self.expect("in")
            body = self.expr()
            node = StateBindE(var, setter, init, body)
            node.line, node.col = tok.line, tok.col  # type: ignore[attr-defined]
            return node
        name_tok = self.peek()
        if name_tok.kind == "CAPIDENT":
            raise SyntaxError("component definitions must appear before the main expression",
                              name_tok.line, name_tok.col)
        name = self.expect("IDENT").text
        self.expect("=")
        value = self.nonseq()
        self.expect("in")
        return LetE(name, value, self.expr())

    def or_level(self) -> Expr:
        left = self.and_level()
        while self.at("||"):
            self.advance()
            left = BinopE("||", left, self.and_level())
        return left

    def and_level(self) -> Expr:
        left = self.cmp_level()
        while self.at("&&"):
            self.advance()
            left = BinopE("&&", left, self.cmp_level())
        return left

    def cmp_level(self) -> Expr:
        left = self.add_level()
        while self.peek().kind in _CMP_OPS:
            op = self.advance().text
            left = BinopE(op, left, self.add_level())
        return left

    def add_level(self) -> Expr:
        left = self.mul_level()
        while self.peek().kind in ("+", "-"):
            op = self.advance().text
            left = BinopE(op, left, self.mul_level())
        return left

    def mul_level(self) -> Expr:
        left = self.app_level()
        while self.peek().kind in ("*", "/", "mod"):
            op = self.advance().text
            left = BinopE(op, left, self.app_level())
        return left

    def app_level(self) -> Expr:
        tok = self.peek()
        if tok.kind == "print":
            self.advance()
            return PrintE(self.atom())
        if tok.kind == "useEffect":
            self.advance()
            node = EffectE(self.atom())
            node.line, node.col = tok.line, tok.col  # type: ignore[attr-defined]
            return node
        if tok.kind == "button":
            self.advance()
            return self.atom()  # button e desugars to e
        if tok.kind == "useState":
            raise SyntaxError("useState is only legal as let (x, xSet) = useState e in ...",
                              tok.line, tok.col)
        expr = self.atom()
        while self.peek().kind in _ATOM_STARTS:
            expr = AppE(expr, self.atom())
        return expr

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            if self.at(")"):
                self.advance()
                return UnitE()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "[":
            self.advance()
            items: list[Expr] = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
            self.expect("]")
            return ArrayE(items)
        if tok.kind == "INT":
            self.advance()
            return IntE(int(tok.text))
        if tok.kind == "STRING":
            self.advance()
            return StrE(tok.text)
        if tok.kind == "true":
            self.advance()
            return BoolE(True)
        if tok.kind == "false":
            self.advance()
            return BoolE(False)
        if tok.kind == "IDENT":
            self.advance()
            return VarE(tok.text)
        if tok.kind == "CAPIDENT":
            self.advance()
            return CompNameE(tok.text)
        raise SyntaxError(f"expected an expression, found {tok.text or 'end of input'!r}",
                          tok.line, tok.col)


# -- hook placement -----------------------------------------------------------

# Positions on the statement spine of a component body.  SPINE admits state
# bindings and effects; STMT (a sequenced statement that still runs
# unconditionally) admits effects only; INNER admits no hooks.
_SPINE, _STMT, _INNER = 0, 1, 2


def _node_pos(e: Expr) -> tuple[int, int]:
    return getattr(e, "line", 0), getattr(e, "col", 0)


def _check_hooks(e: Expr, pos: int, where: str) -> None:
    if isinstance(e, StateBindE):
        if pos != _SPINE:
            line, col = _node_pos(e)
            raise HookPlacementError(
                f"useState outside the top level of {where}", line, col)
        _check_hooks(e.init, _INNER, where)
        _check_hooks(e.body, pos, where)
    elif isinstance(e, EffectE):
        if pos == _INNER:
            line, col = _node_pos(e)
            raise HookPlacementError(
                f"useEffect outside the top level of {where}", line, col)
        _check_hooks(e.body, _INNER, where)
    elif isinstance(e, SeqE):
        if pos == _INNER:
            _check_hooks(e.first, _INNER, where)
            _check_hooks(e.second, _INNER, where)
        else:
            _check_hooks(e.first, _STMT, where)
            _check_hooks(e.second, pos, where)
    elif isinstance(e, LetE):
        _check_hooks(e.value, _INNER, where)
        _check_hooks(e.body, pos if pos != _INNER else _INNER, where)
    elif isinstance(e, CondE):
        _check_hooks(e.cond, _INNER, where)
        _check_hooks(e.then, _INNER, where)
        _check_hooks(e.other, _INNER, where)
    elif isinstance(e, FnE):
        _check_hooks(e.body, _INNER, where)
    elif isinstance(e, AppE):
        _check_hooks(e.fn, _INNER, where)
        _check_hooks(e.arg, _INNER, where)
    elif isinstance(e, BinopE):
        _check_hooks(e.left, _INNER, where)
        _check_hooks(e.right, _INNER, where)
    elif isinstance(e, ArrayE):
        for item in e.items:
            _check_hooks(item, _INNER, where)
    elif isinstance(e, PrintE):
        _check_hooks(e.arg, _INNER, where)
    # leaves: nothing to do


def _assign_labels(e: Expr, counter: Iterator[int]) -> None:
    """Pre-order traversal; gives each state binding the next label."""
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, StateBindE):
            node.label = next(counter)
            stack.append(node.body)
            stack.append(node.init)
        elif isinstance(node, SeqE):
            stack.append(node.second)
            stack.append(node.first)
        elif isinstance(node, LetE):
            stack.append(node.body)
            stack.append(node.value)
        elif isinstance(node, CondE):
            stack.append(node.other)
            stack.append(node.then)
            stack.append(node.cond)
        elif isinstance(node, FnE):
            stack.append(node.body)
        elif isinstance(node, AppE):
            stack.append(node.arg)
            stack.append(node.fn)
        elif isinstance(node, BinopE):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, ArrayE):
            stack.extend(reversed(node.items))
        elif isinstance(node, (EffectE,)):
            stack.append(node.body)
        elif isinstance(node, PrintE):
            stack.append(node.arg)


def collect_labels(e: Expr) -> list[int]:
    """Labels of every state binding under `e`, pre-order."""
    out: list[int] = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, StateBindE):
            out.append(node.label)
            stack.append(node.body)
            stack.append(node.init)
        elif isinstance(node, SeqE):
            stack.append(node.second)
            stack.append(node.first)
        elif isinstance(node, LetE):
            stack.append(node.body)
            stack.append(node.value)
        elif isinstance(node, CondE):
            stack.append(node.other)
            stack.append(node.then)
            stack.append(node.cond)
        elif isinstance(node, FnE):
            stack.append(node.body)
        elif isinstance(node, AppE):
            stack.append(node.arg)
            stack.append(node.fn)
        elif isinstance(node, BinopE):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, ArrayE):
            stack.extend(reversed(node.items))
        elif isinstance(node, EffectE):
            stack.append(node.body)
        elif isinstance(node, PrintE):
            stack.append(node.arg)
    return out


def parse_program(source: str) -> Program:
    """Parse, enforce hook placement, and label every useState occurrence."""
    program = _Parser(_lex(source)).program()
    seen: set[str] = set()
    for comp in program.defs:
        if comp.name in seen:
            raise DuplicateComponent(comp.name)
        seen.add(comp.name)
        _check_hooks(comp.body, _SPINE, f"component {comp.name}")
    _check_hooks(program.main, _INNER, "the main expression")

    counter = iter(range(10 ** 9))
    for comp in program.defs:
        _assign_labels(comp.body, counter)
    _assign_labels(program.main, counter)
    return program


def build_def_table(program: Program) -> tuple[dict[str, tuple[str, Expr]], Expr]:
    """Definition table mapping each component name to (param, body)."""
    return {c.name: (c.param, c.body) for c in program.defs}, program.main


# -- pretty printer -------------------------------------------------------------

def _needs_parens_arg(e: Expr) -> bool:
    return not isinstance(e, (UnitE, BoolE, IntE, StrE, VarE, CompNameE, ArrayE))


def to_source_expr(e: Expr) -> str:
    if isinstance(e, UnitE):
        return "()"
    if isinstance(e, BoolE):
        return "true" if e.value else "false"
    if isinstance(e, IntE):
        return str(e.value)
    if isinstance(e, StrE):
        escaped = e.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(e, VarE):
        return e.name
    if isinstance(e, CompNameE):
        return e.name
    if isinstance(e, BinopE):
        return f"({to_source_expr(e.left)} {e.op} {to_source_expr(e.right)})"
    if isinstance(e, CondE):
        return (f"(if {to_source_expr(e.cond)} then {to_source_expr(e.then)} "
                f"else {to_source_expr(e.other)})")
    if isinstance(e, FnE):
        return f"(fun {e.param} -> {to_source_expr(e.body)})"
    if isinstance(e, AppE):
        fn = to_source_expr(e.fn)
        if _needs_parens_arg(e.fn) and not isinstance(e.fn, AppE):
            fn = f"({fn})" if not fn.startswith("(") else fn
        arg = to_source_expr(e.arg)
        if _needs_parens_arg(e.arg) and not arg.startswith("("):
            arg = f"({arg})"
        return f"{fn} {arg}"
    if isinstance(e, SeqE):
        return f"({to_source_expr(e.first)}; {to_source_expr(e.second)})"
    if isinstance(e, LetE):
        return f"(let {e.name} = {to_source_expr(e.value)} in {to_source_expr(e.body)})"
    if isinstance(e, ArrayE):
        return "[" + ", ".join(to_source_expr(item) for item in e.items) + "]"
    if isinstance(e, StateBindE):
        return (f"(let ({e.var}, {e.setter}) = useState {_atomized(e.init)} "
                f"in {to_source_expr(e.body)})")
    if isinstance(e, EffectE):
        return f"useEffect {_atomized(e.body)}"
    if isinstance(e, PrintE):
        return f"print {_atomized(e.arg)}"
    raise TypeError(f"not an expression node: {e!r}")


def _atomized(e: Expr) -> str:
    text = to_source_expr(e)
    if text.startswith(("(", "[")) or not _needs_parens_arg(e):
        return text
    return f"({text})"


def to_source(program: Program) -> str:
    parts = [
        f"let {c.name} {c.param} = {to_source_expr(c.body)};;"
        for c in program.defs
    ]
    parts.append(to_source_expr(program.main))
    return "\n".join(parts) + "\n"
