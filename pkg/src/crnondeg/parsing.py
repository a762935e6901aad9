"""Recursive-descent parser for polynomial expressions in z, conj(z) and real variables.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := base ('^' nat)?
    base    := '(' expr ')' | 'conj' '(' expr ')' | '-' base | literal | var
    literal := int | int '/' int | 'i' | 'sqrt' '(' ('2' | '3') ')'

Note that ``-`` in ``base`` binds tighter than ``^``: ``-z^2`` is ``(-z)^2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, UnsupportedRadicalError
from .jets import Jet, VarSpace
from .scalars import ONE, ComplexScalar, I, Rational, SQRT2, SQRT3, as_scalar

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.)", re.S)


@dataclass(frozen=True)
class Expr:
    pos: int


@dataclass(frozen=True)
class Num(Expr):
    value: ComplexScalar


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Conj(Expr):
    arg: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple  # ((sign, Expr), ...) with sign in {+1, -1}


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), pos))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), pos))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", pos, text)
            tokens.append(("op", ch, pos))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, pos=None):
        if pos is None:
            pos = self.peek()[2]
        return ParseError(msg, pos, self.text)

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            raise self.error(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise self.error(f"unexpected {val!r}", pos)
        return e

    def expr(self) -> Expr:
        pos = self.peek()[2]
        terms = [(1, self.term())]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            sign = 1 if self.take()[1] == "+" else -1
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Add(pos, tuple(terms))

    def term(self) -> Expr:
        pos = self.peek()[2]
        factors = [self.factor()]
        while self.peek()[:2] == ("op", "*"):
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Mul(pos, tuple(factors))

    def factor(self) -> Expr:
        pos = self.peek()[2]
        b = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, p = self.take()
            if kind != "int":
                raise self.error("exponent must be a nonnegative integer literal", p)
            return Pow(pos, b, int(val))
        return b

    def base(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "op" and val == "-":
            return Neg(pos, self.base())
        if kind == "int":
            if self.peek()[:2] == ("op", "/"):
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "int":
                    raise self.error("expected integer denominator after '/'", p2)
                if int(v2) == 0:
                    raise self.error("zero denominator", p2)
                return Num(pos, as_scalar(Rational(int(val), int(v2))))
            return Num(pos, as_scalar(int(val)))
        if kind == "name":
            if val == "i":
                return Num(pos, I)
            if val == "conj":
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return Conj(pos, e)
            if val == "sqrt":
                self.expect("(")
                k2, v2, p2 = self.take()
                if k2 != "int" or v2 not in ("2", "3") or self.peek()[:2] != ("op", ")"):
                    raise UnsupportedRadicalError(
                        "only sqrt(2) and sqrt(3) are supported; coefficients live in Q(sqrt2, sqrt3)(i)",
                        p2,
                        self.text,
                    )
                self.expect(")")
                return Num(pos, SQRT2 if v2 == "2" else SQRT3)
            return Var(pos, val)
        if kind == "end":
            raise self.error("unexpected end of input", pos)
        raise self.error(f"unexpected {val!r}", pos)


def parse_expr(text: str, space: VarSpace | None = None) -> Expr:
    """Parse text into an expression tree; with ``space`` given, check every variable is declared."""
    e = _Parser(text).parse()
    if space is not None:
        for name, pos in variables(e):
            if name not in space.holo and name not in space.real:
                declared = ", ".join(space.holo + space.real) or "none"
                raise ParseError(f"unknown variable {name!r} (declared: {declared})", pos, text)
    return e


def variables(e: Expr) -> list[tuple[str, int]]:
    if isinstance(e, Var):
        return [(e.name, e.pos)]
    if isinstance(e, (Conj, Neg)):
        return variables(e.arg)
    if isinstance(e, Pow):
        return variables(e.base)
    if isinstance(e, Add):
        return [v for _, t in e.terms for v in variables(t)]
    if isinstance(e, Mul):
        return [v for f in e.factors for v in variables(f)]
    return []


def degree(e: Expr) -> int:
    """Upper bound for the total degree of the polynomial e denotes."""
    if isinstance(e, Var):
        return 1
    if isinstance(e, Num):
        return 0
    if isinstance(e, (Conj, Neg)):
        return degree(e.arg)
    if isinstance(e, Pow):
        return degree(e.base) * e.exp
    if isinstance(e, Add):
        return max(degree(t) for _, t in e.terms)
    if isinstance(e, Mul):
        return sum(degree(f) for f in e.factors)
    raise TypeError(e)


def to_jet(e: Expr, space: VarSpace, order: int) -> Jet:
    if isinstance(e, Num):
        return Jet.constant(space, e.value, order)
    if isinstance(e, Var):
        if e.name not in space.holo and e.name not in space.real:
            raise ParseError(f"unknown variable {e.name!r}", e.pos)
        return Jet.variable(space, e.name, order)
    if isinstance(e, Conj):
        return to_jet(e.arg, space, order).conj_swap()
    if isinstance(e, Neg):
        return -to_jet(e.arg, space, order)
    if isinstance(e, Pow):
        return to_jet(e.base, space, order) ** e.exp
    if isinstance(e, Add):
        acc = None
        for sign, t in e.terms:
            j = to_jet(t, space, order)
            j = j if sign > 0 else -j
            acc = j if acc is None else acc + j
        return acc
    if isinstance(e, Mul):
        acc = Jet.constant(space, ONE, order)
        for f in e.factors:
            acc = acc * to_jet(f, space, order)
        return acc
    raise TypeError(e)


def parse(text: str, space: VarSpace, order: int) -> Jet:
    """Parse text straight to a jet over ``space`` truncated at ``order``."""
    return to_jet(parse_expr(text, space), space, order)


def parse_scalar(text: str) -> ComplexScalar:
    """Parse a constant expression such as ``1``, ``-1/2*i`` or ``sqrt(2)``."""
    e = parse_expr(str(text), VarSpace())
    j = to_jet(e, VarSpace(), 0)
    return j.eval0()
