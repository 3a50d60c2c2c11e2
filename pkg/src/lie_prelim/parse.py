"""Recursive-descent parser for the ASCII expression grammar.

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-'? factor
    factor := base ('^' unary)?
    base   := NUMBER | IDENT | IDENT '(' args ')'
            | 'Diff' '(' IDENT (',' IDENT)+ ')' ['(' args ')']
            | '(' expr ')'

Reserved jet identifiers u_t, u_x, u_xx, u_tx, u_xxx (plus the order-<=3
companions u_tt, u_txx and index permutations, canonicalized t-before-x).
Built-ins exp and ln.  Declared function names used bare denote the identity
application; Diff(...) builds inert derivatives.  Whitespace insignificant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import (Env, Expr, ExprError, Rat, Sym, exp, func, jet, ln, mul,
                   power, add)


class ParseError(ExprError):
    def __init__(self, message: str, pos: int, text: str):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))")

_JET_RE = re.compile(r"^u_[tx]+$")


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            if text[i:].strip():
                raise ParseError("unexpected character", i, text)
            break
        if m.group("num"):
            toks.append(_Tok("num", m.group("num"), m.start("num")))
        elif m.group("ident"):
            toks.append(_Tok("ident", m.group("ident"), m.start("ident")))
        else:
            toks.append(_Tok("op", m.group("op"), m.start("op")))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, env: Env):
        self.text = text
        self.env = env
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str) -> None:
        t = self.next()
        if t.kind != "op" or t.value != op:
            raise ParseError(f"expected {op!r}", t.pos, self.text)

    def at_op(self, *ops: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.value in ops

    # grammar ---------------------------------------------------------------
    def parse(self) -> Expr:
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError("trailing input", t.pos, self.text)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.at_op("+", "-"):
            op = self.next().value
            t = self.term()
            terms.append(t if op == "+" else mul(Rat(-1), t))
        return add(*terms)

    def term(self) -> Expr:
        factors = [self.unary()]
        while self.at_op("*", "/"):
            op = self.next().value
            f = self.unary()
            factors.append(f if op == "*" else power(f, Rat(-1)))
        return mul(*factors)

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.next()
            return mul(Rat(-1), self.unary())
        return self.factor()

    def factor(self) -> Expr:
        b = self.base()
        if self.at_op("^"):
            self.next()
            return power(b, self.unary())
        return b

    def args(self) -> list[Expr]:
        self.expect("(")
        out = [self.expr()]
        while self.at_op(","):
            self.next()
            out.append(self.expr())
        self.expect(")")
        return out

    def base(self) -> Expr:
        t = self.next()
        if t.kind == "num":
            return Rat(int(t.value))
        if t.kind == "op" and t.value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "ident":
            raise ParseError("expected a number, name or '('", t.pos, self.text)
        name = t.value
        if name == "Diff":
            return self.diff_node(t.pos)
        if name in ("exp", "ln"):
            a = self.args()
            if len(a) != 1:
                raise ParseError(f"{name} takes one argument", t.pos, self.text)
            return exp(a[0]) if name == "exp" else ln(a[0])
        if self.at_op("("):
            sig = self.env.get(name)
            if sig is None:
                raise ParseError(f"undeclared function {name!r}", t.pos, self.text)
            a = self.args()
            if len(a) != len(sig.args):
                raise ParseError(
                    f"{name} takes {len(sig.args)} argument(s), got {len(a)}", t.pos, self.text)
            return func(sig, (), tuple(a))
        if name in self.env:
            return func(self.env[name])
        if _JET_RE.match(name) or name == "u":
            try:
                return jet(name) if name != "u" else Sym("u")
            except ExprError as err:
                raise ParseError(str(err), t.pos, self.text) from None
        return Sym(name)

    def diff_node(self, pos: int) -> Expr:
        self.expect("(")
        t = self.next()
        if t.kind != "ident":
            raise ParseError("Diff expects a function name", t.pos, self.text)
        sig = self.env.get(t.value)
        if sig is None:
            raise ParseError(f"undeclared function {t.value!r}", t.pos, self.text)
        dvars = []
        while self.at_op(","):
            self.next()
            d = self.next()
            if d.kind != "ident":
                raise ParseError("Diff expects argument names", d.pos, self.text)
            if d.value not in sig.args:
                raise ParseError(
                    f"{d.value!r} is not an argument of {sig.name}", d.pos, self.text)
            dvars.append(d.value)
        self.expect(")")
        if not dvars:
            raise ParseError("Diff needs at least one differentiation argument", pos, self.text)
        if self.at_op("("):
            a = self.args()
            if len(a) != len(sig.args):
                raise ParseError(
                    f"{sig.name} takes {len(sig.args)} argument(s), got {len(a)}", pos, self.text)
            return func(sig, tuple(dvars), tuple(a))
        return func(sig, tuple(dvars))


def parse(text: str, env: Env | None = None) -> Expr:
    """Parse a grammar string into a normalized expression."""
    return _Parser(text, env or {}).parse()
