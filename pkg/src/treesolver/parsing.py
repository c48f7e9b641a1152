"""Text syntax for formulas: a recursive-descent parser and a printer.

    formula := "true" | "false" | term "=" term | "finite" "(" term ")"
             | "~" formula | formula "&" formula | formula "|" formula
             | formula "->" formula | formula "<->" formula
             | ("ex" | "all") ident ("," ident)* "." formula | "(" formula ")"
    term    := ident | ident "(" [term ("," term)*] ")"

Binding strength, tightest first: ~, &, |, ->, <->.  -> and <-> group to
the right, a quantifier body extends as far right as possible.

A bare identifier is a variable unless it starts with a digit or the same
name is applied to arguments somewhere in the text; those are constants.
Write ``a()`` to force a constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .syntax import (
    FALSE,
    TRUE,
    And,
    App,
    Eq,
    Exists,
    FalseF,
    Finite,
    Forall,
    FunctionSymbol,
    Iff,
    Implies,
    Not,
    Or,
    TrueF,
    Variable,
    free_vars,
    rename,
)

KEYWORDS = {"true", "false", "finite", "ex", "all"}


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ArityError(Exception):
    def __init__(self, symbol: str, first: int, second: int):
        super().__init__(f"symbol {symbol!r} used with arity {first} and {second}")
        self.symbol = symbol


@dataclass(slots=True)
class Token:
    kind: str  # ident, op, eof
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"\s+|#[^\n]*|<->|->|[A-Za-z0-9_][A-Za-z0-9_']*|[()~&|=.,]")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        chunk = m.group()
        if not chunk[0].isspace() and chunk[0] != "#":
            kind = "ident" if chunk[0].isalnum() or chunk[0] == "_" else "op"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: dict | None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.symbols: dict[str, FunctionSymbol] = {}
        self.given = dict(variables or {})
        # names applied to arguments anywhere are function symbols
        self.applied = {
            t.text
            for t, nxt in zip(self.tokens, self.tokens[1:])
            if t.kind == "ident" and nxt.text == "(" and t.text not in KEYWORDS
        }
        self.free: dict[str, Variable] = {}
        self.binders: list[Variable] = []
        keys = [v.key for v in self.given.values()]
        self.base = max(keys, default=Fraction(0))
        self.low = min(keys, default=Fraction(0))
        self.scope: list[tuple[str, Variable]] = []

    # -- token helpers
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            self.fail(f"expected {text!r}", tok)
        return tok

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", tok.line, tok.col)

    # -- grammar
    def parse(self):
        f = self.iff()
        if self.peek().kind != "eof":
            self.fail("expected end of input")
        return f

    def iff(self):
        left = self.implies()
        if self.peek().text == "<->":
            self.next()
            return Iff(left, self.iff())
        return left

    def implies(self):
        left = self.disj()
        if self.peek().text == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.peek().text == "|":
            self.next()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek().text == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok.text == "~":
            self.next()
            return Not(self.unary())
        if tok.kind == "ident" and tok.text in ("ex", "all"):
            return self.quantified()
        return self.primary()

    def quantified(self):
        kind = self.next().text
        names = [self.ident()]
        while self.peek().text == ",":
            self.next()
            names.append(self.ident())
        if len(set(names)) != len(names):
            self.fail("repeated variable in quantifier")
        self.expect(".")
        vs = []
        for n in names:
            v = self.given.get(n)
            if v is None:
                # placeholder below every pinned key, renumbered at the end
                v = Variable(n, self.low - 1 - len(self.binders))
                self.binders.append(v)
            vs.append(v)
        self.scope.extend(zip(names, vs))
        body = self.iff()
        del self.scope[len(self.scope) - len(names):]
        return (Exists if kind == "ex" else Forall)(tuple(vs), body)

    def ident(self) -> str:
        tok = self.next()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail("expected identifier", tok)
        return tok.text

    def primary(self):
        tok = self.peek()
        if tok.text == "true":
            self.next()
            return TRUE
        if tok.text == "false":
            self.next()
            return FALSE
        if tok.text == "finite":
            self.next()
            self.expect("(")
            t = self.term()
            self.expect(")")
            return Finite(t)
        if tok.text == "(":
            self.next()
            f = self.iff()
            self.expect(")")
            return f
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail("expected formula")
        lhs = self.term()
        self.expect("=")
        return Eq(lhs, self.term())

    def symbol(self, name: str, arity: int) -> FunctionSymbol:
        sym = self.symbols.get(name)
        if sym is None:
            sym = self.symbols[name] = FunctionSymbol(name, arity)
        elif sym.arity != arity:
            raise ArityError(name, sym.arity, arity)
        return sym

    def term(self):
        name = self.ident()
        if self.peek().text == "(":
            self.next()
            args = []
            if self.peek().text != ")":
                args.append(self.term())
                while self.peek().text == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
            return App(self.symbol(name, len(args)), tuple(args))
        for bound_name, v in reversed(self.scope):
            if bound_name == name:
                return v
        if name[0].isdigit() or name in self.applied:
            return App(self.symbol(name, 0), ())
        v = self.free.get(name)
        if v is None:
            v = self.given.get(name)
            if v is None:
                v = Variable(name, self.base + len(self.free) + 1)
            self.free[name] = v
        return v


def parse(text: str, variables: dict | None = None):
    """Parse a formula.

    Free variables get keys 1, 2, ... in order of first appearance and
    binders get keys above them in binder order, so the result already
    satisfies the variable discipline.  ``variables`` pins chosen names
    (free or bound) to given variables; the rest are placed above them.
    """
    p = _Parser(text, variables)
    f = p.parse()
    top = max((v.key for v in p.free.values()), default=p.base)
    top = max(top, p.base)
    env = {v: Variable(v.name, top + 1 + i) for i, v in enumerate(p.binders)}
    return rename(f, env) if env else f


def parse_term(text: str, variables: dict | None = None):
    p = _Parser(text, variables)
    t = p.term()
    if p.peek().kind != "eof":
        p.fail("expected end of input")
    return t


# ---------------------------------------------------------------- printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_RIGHT_ASSOC = (Iff, Implies)


class _Names:
    """Display names, disambiguated when distinct variables share a name."""

    def __init__(self, taken: set[str]):
        self.taken = set(taken)
        self.by_key: dict = {}
        self.owner: dict[str, Fraction] = {}

    def __call__(self, v: Variable) -> str:
        name = self.by_key.get(v.key)
        if name is not None:
            return name
        name = v.name
        if self.owner.get(name, v.key) != v.key:
            i = 1
            while f"{v.name}_{i}" in self.taken or f"{v.name}_{i}" in self.owner:
                i += 1
            name = f"{v.name}_{i}"
        self.owner[name] = v.key
        self.by_key[v.key] = name
        return name


def _all_names(f) -> set[str]:
    from .syntax import all_vars

    return {v.name for v in all_vars(f)}


def print_term(t, names=None) -> str:
    names = names or (lambda v: v.name)
    if isinstance(t, Variable):
        return names(t)
    if not t.args:
        return t.sym.name if t.sym.name[0].isdigit() else f"{t.sym.name}()"
    return f"{t.sym.name}({', '.join(print_term(a, names) for a in t.args)})"


def print_formula(f, names=None) -> str:
    if names is None:
        names = _Names(_all_names(f))
        # free variables keep their own names when a binder clashes
        for v in sorted(free_vars(f)):
            names(v)
    out: list[str] = []

    def go(g, ctx: int, tail: bool):
        # ctx: precedence required by the surrounding operator
        # tail: nothing follows g before the enclosing bracket closes
        match g:
            case TrueF():
                out.append("true")
            case FalseF():
                out.append("false")
            case Eq(lhs, rhs):
                out.append(f"{print_term(lhs, names)} = {print_term(rhs, names)}")
            case Finite(arg):
                out.append(f"finite({print_term(arg, names)})")
            case Not(body):
                out.append("~")
                if isinstance(body, (Eq, Exists, Forall)):
                    out.append("(")
                    go(body, 0, True)
                    out.append(")")
                else:
                    go(body, 5, tail)
            case Exists(vs, body) | Forall(vs, body):
                paren = not tail
                if paren:
                    out.append("(")
                kw = "ex" if isinstance(g, Exists) else "all"
                out.append(f"{kw} {', '.join(names(v) for v in vs)}. ")
                go(body, 0, True)
                if paren:
                    out.append(")")
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                prec = _PREC[type(g)]
                paren = prec < ctx
                if paren:
                    out.append("(")
                    tail = True
                right_assoc = isinstance(g, _RIGHT_ASSOC)
                go(l, prec + 1 if right_assoc else prec, False)
                out.append(f" {_OPS[type(g)]} ")
                go(r, prec if right_assoc else prec + 1, tail)
                if paren:
                    out.append(")")
            case _:
                raise TypeError(f"not a formula: {g!r}")

    go(f, 0, True)
    return "".join(out)
