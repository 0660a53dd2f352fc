"""A tiny expression language for complexity bounds f(n).

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom (("^" | "**") unary)?        # right associative
    atom    := number | "n" | func "(" expr ("," expr)* ")" | "(" expr ")"
    func    := ceil | floor | exp | log | max | min
    number  := digits ["." digits] [("e"|"E") ["+"|"-"] digits]

Numbers are read exactly (``0.3`` is ``3/10``).  Evaluation keeps exact
rationals as long as the operations allow it and falls back to lazily refined
interval enclosures otherwise; see :mod:`wordentropy.bounds.reals`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from mpmath import iv
from mpmath.libmp import mpf_gt, mpf_lt

from .reals import (
    LazyReal,
    Real,
    UndecidableError,
    compare,
    exact_ceil,
    exact_floor,
    exact_rational_power,
    iv_make,
    to_interval,
)

FUNCTIONS = {"ceil": 1, "floor": 1, "exp": 1, "log": 1, "max": None, "min": None}


class BoundSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnknownIdentifier(BoundSyntaxError):
    pass


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str = "n"


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


Node = Union[Num, Var, Neg, Bin, Call]

# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokens(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise BoundSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        val = m.group(kind)
        if val == "**":
            val = "^"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, names=()):
        self.toks = _tokens(text)
        self.names = frozenset(names)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val: str):
        kind, v, pos = self.take()
        if v != val or kind == "end":
            raise BoundSyntaxError(f"expected {val!r}, found {v or 'end of input'!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise BoundSyntaxError(f"unexpected {v!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, v, pos = self.take()
        if kind == "num":
            return Num(Fraction(Decimal(v)))
        if kind == "id":
            if v == "n":
                return Var()
            if v in self.names:
                return Var(v)
            if v not in FUNCTIONS:
                raise UnknownIdentifier(f"unknown identifier {v!r}", pos)
            self.expect("(")
            args = [self.expr()]
            while self.peek()[:2] == ("op", ","):
                self.take()
                args.append(self.expr())
            self.expect(")")
            arity = FUNCTIONS[v]
            if arity is not None and len(args) != arity:
                raise BoundSyntaxError(f"{v} takes {arity} argument(s), got {len(args)}", pos)
            return Call(v, tuple(args))
        if (kind, v) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise BoundSyntaxError(f"unexpected {v or 'end of input'!r}", pos)


def parse_expr(text: str, names=()) -> Node:
    """Parse ``text``; ``names`` are extra placeholder identifiers."""
    return _Parser(text, names).parse()


# -- printer ------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM = 5


def _prec(node: Node) -> int:
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM


def _is_decimal(x: Fraction) -> bool:
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def _num_text(x: Fraction) -> str:
    if x < 0:
        return "(-" + _num_text(-x) + ")"
    if x.denominator == 1:
        return str(x.numerator)
    if not _is_decimal(x):
        return f"({x.numerator}/{x.denominator})"
    with localcontext() as ctx:
        ctx.prec = max(28, len(str(x.numerator)) + len(str(x.denominator)) + 4)
        s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    return s


def to_text(node: Node) -> str:
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        if _prec(node.arg) < _NEG_PREC:
            inner = f"({inner})"
        return "-" + inner
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _NEG_PREC:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# -- evaluation ---------------------------------------------------------------


class LogOf(LazyReal):
    """``coef * log(base)`` with exact rationals, ``base > 0``.

    Rational multiples stay in this form and ``exp`` maps it back to the
    exact power ``base ** coef``, so ``exp(n * log(3) / 2)`` is ``3^(n/2)``.
    """

    __slots__ = ("base", "coef")

    def __init__(self, base: Fraction, coef: Fraction = Fraction(1)):
        self.base = base
        self.coef = coef
        b, c = base, coef
        super().__init__(lambda prec: iv.log(to_interval(b, prec)) * to_interval(c, prec))

    @property
    def symbolic_key(self):
        return ("log", self.base, self.coef)

    def scaled(self, c: Fraction) -> Real:
        if c == 0:
            return Fraction(0)
        return LogOf(self.base, self.coef * c)


class ExpOf(LazyReal):
    """``exp(arg)`` for an exact rational ``arg``; products stay symbolic."""

    __slots__ = ("exp_arg",)

    def __init__(self, arg: Fraction):
        self.exp_arg = arg
        a = arg
        super().__init__(lambda prec: iv.exp(to_interval(a, prec)))


def _lazy(fn) -> LazyReal:
    return LazyReal(fn)


def r_add(a: Real, b: Real) -> Real:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _lazy(lambda p: to_interval(a, p) + to_interval(b, p))


def r_neg(a: Real) -> Real:
    if isinstance(a, Fraction):
        return -a
    if isinstance(a, LogOf):
        return a.scaled(Fraction(-1))
    return _lazy(lambda p: -to_interval(a, p))


def r_sub(a: Real, b: Real) -> Real:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a - b
    return _lazy(lambda p: to_interval(a, p) - to_interval(b, p))


def r_mul(a: Real, b: Real) -> Real:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if isinstance(a, ExpOf) and isinstance(b, ExpOf):
        return r_exp(a.exp_arg + b.exp_arg)
    for x, y in ((a, b), (b, a)):
        if isinstance(x, LogOf) and isinstance(y, Fraction):
            return x.scaled(y)
        if isinstance(y, Fraction) and y == 0:
            return Fraction(0)
    return _lazy(lambda p: to_interval(a, p) * to_interval(b, p))


def r_div(a: Real, b: Real) -> Real:
    if isinstance(b, Fraction) and b == 0:
        raise ZeroDivisionError("division by zero in bound expression")
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    if isinstance(a, LogOf) and isinstance(b, Fraction):
        return a.scaled(1 / b)
    return _lazy(lambda p: to_interval(a, p) / to_interval(b, p))


def r_exp(a: Real) -> Real:
    if isinstance(a, Fraction) and a == 0:
        return Fraction(1)
    if isinstance(a, LogOf):
        return exact_rational_power(a.base, a.coef)
    if isinstance(a, Fraction):
        return ExpOf(a)
    return _lazy(lambda p: iv.exp(to_interval(a, p)))


def r_log(a: Real) -> Real:
    if isinstance(a, Fraction):
        if a <= 0:
            raise ValueError("log of a non-positive number")
        if a == 1:
            return Fraction(0)
        return LogOf(a)
    return _lazy(lambda p: iv.log(to_interval(a, p)))


def r_pow(a: Real, b: Real) -> Real:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return exact_rational_power(a, b)
    if isinstance(a, ExpOf) and isinstance(b, Fraction):
        return r_exp(a.exp_arg * b)
    if isinstance(b, Fraction) and b.denominator == 1:
        k = int(b)
        return _lazy(lambda p: to_interval(a, p) ** k)
    return _lazy(lambda p: iv.exp(to_interval(b, p) * iv.log(to_interval(a, p))))


def r_floor(a: Real) -> Fraction:
    return Fraction(exact_floor(a))


def r_ceil(a: Real) -> Fraction:
    return Fraction(exact_ceil(a))


def _hull(vals: List[Real], pick_max: bool) -> LazyReal:
    pick = mpf_gt if pick_max else mpf_lt

    def fn(p):
        ends = [to_interval(v, p)._mpi_ for v in vals]
        lo, hi = ends[0]
        for a, b in ends[1:]:
            lo = a if pick(a, lo) else lo
            hi = b if pick(b, hi) else hi
        return iv_make(lo, hi)

    return _lazy(fn)


def r_extreme(vals: List[Real], pick_max: bool) -> Real:
    best = vals[0]
    rest: List[Real] = []
    for v in vals[1:]:
        try:
            c = compare(v, best)
        except UndecidableError:
            rest.append(v)
            continue
        if (c > 0) == pick_max and c != 0:
            best = v
    if rest:
        return _hull([best] + rest, pick_max)
    return best


_BIN = {"+": r_add, "-": r_sub, "*": r_mul, "/": r_div, "^": r_pow}


def evaluate(node: Node, n: Optional[int] = None) -> Real:
    """Value of ``node`` at ``n`` (``None`` for constant expressions)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name != "n":
            raise ValueError(f"unbound placeholder {node.name!r}")
        if n is None:
            raise ValueError("expression depends on n but no n was given")
        return Fraction(n)
    if isinstance(node, Neg):
        return r_neg(evaluate(node.arg, n))
    if isinstance(node, Bin):
        return _BIN[node.op](evaluate(node.left, n), evaluate(node.right, n))
    args = [evaluate(a, n) for a in node.args]
    name = node.name
    if name == "ceil":
        return r_ceil(args[0])
    if name == "floor":
        return r_floor(args[0])
    if name == "exp":
        return r_exp(args[0])
    if name == "log":
        return r_log(args[0])
    return r_extreme(args, name == "max")


def depends_on_n(node: Node) -> bool:
    if isinstance(node, Var):
        return node.name == "n"
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return depends_on_n(node.arg)
    if isinstance(node, Bin):
        return depends_on_n(node.left) or depends_on_n(node.right)
    return any(depends_on_n(a) for a in node.args)


def parse_constant(text: str) -> Tuple[Node, Real]:
    """Parse a closed expression (a parameter such as ``log(3/2)``)."""
    node = parse_expr(text)
    if depends_on_n(node):
        raise BoundSyntaxError("parameter must not depend on n", 0)
    return node, evaluate(node)


def const_node(x: Union[int, Fraction, str, Node]) -> Node:
    if isinstance(x, (Num, Var, Neg, Bin, Call)):
        return x
    if isinstance(x, str):
        return parse_constant(x)[0]
    x = Fraction(x)
    return Num(x) if x >= 0 else Neg(Num(-x))
