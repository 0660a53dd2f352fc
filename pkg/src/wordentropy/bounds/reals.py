"""Exact rationals and lazily refined interval enclosures.

Values are either :class:`fractions.Fraction` (exact) or :class:`LazyReal`,
a closure returning an mpmath interval at a requested binary precision.
Decisions (floor, comparisons) refine the precision until the enclosure
settles them and raise :class:`UndecidableError` past ``MAX_PREC``.

mpmath's interval context keeps its precision in a global; the helpers here
save and restore it, which makes them unsafe to call from several threads at
once.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Tuple, Union

from mpmath import iv

START_PREC = 64
MAX_PREC = 1 << 12


class UndecidableError(ArithmeticError):
    """An enclosure still straddles the decision point at maximum precision."""


@contextmanager
def ivprec(prec: int) -> Iterator[None]:
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _mpf_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    if man == 0:
        return Fraction(0)
    v = Fraction(int(man)) * (Fraction(2) ** exp) if exp < 0 else Fraction(int(man) << exp)
    return -v if sign else v


def iv_bounds(x) -> Tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return _mpf_to_fraction(a), _mpf_to_fraction(b)


def iv_make(lo_raw, hi_raw):
    """Interval from raw mpf endpoint tuples."""
    x = iv.mpf.__new__(iv.mpf)
    x._mpi_ = (lo_raw, hi_raw)
    return x


def iv_from_fraction(x: Fraction):
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


class LazyReal:
    """A real number known through enclosures of any requested precision."""

    __slots__ = ("_fn", "_cache")

    def __init__(self, fn: Callable[[int], object]):
        self._fn = fn
        self._cache: dict = {}

    def interval(self, prec: int):
        got = self._cache.get(prec)
        if got is None:
            with ivprec(prec):
                got = self._fn(prec)
            self._cache[prec] = got
        return got

    def bounds(self, prec: int = START_PREC) -> Tuple[Fraction, Fraction]:
        return iv_bounds(self.interval(prec))

    def __float__(self) -> float:
        lo, hi = self.bounds(START_PREC)
        return float((lo + hi) / 2)


Real = Union[Fraction, LazyReal]


def to_interval(x: Real, prec: int):
    if isinstance(x, LazyReal):
        return x.interval(prec)
    return iv_from_fraction(x)


def precisions() -> Iterator[int]:
    p = START_PREC
    while p <= MAX_PREC:
        yield p
        p *= 2


def exact_floor(x: Real) -> int:
    if isinstance(x, Fraction):
        return math.floor(x)
    floor = getattr(x, "exact_floor", None)
    if floor is not None:
        return floor()
    for prec in precisions():
        lo, hi = x.bounds(prec)
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
    raise UndecidableError("floor undecided at maximum precision")


def exact_ceil(x: Real) -> int:
    if isinstance(x, Fraction):
        return math.ceil(x)
    ceil = getattr(x, "exact_ceil", None)
    if ceil is not None:
        return ceil()
    for prec in precisions():
        lo, hi = x.bounds(prec)
        if math.ceil(lo) == math.ceil(hi):
            return math.ceil(lo)
    raise UndecidableError("ceiling undecided at maximum precision")


def compare(x: Real, y: Real) -> int:
    """Sign of ``x - y``; raises if they cannot be separated."""
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return (x > y) - (x < y)
    if x is y:
        return 0
    kx = getattr(x, "symbolic_key", None)
    if kx is not None and kx == getattr(y, "symbolic_key", None):
        return 0
    ex, ey = getattr(x, "exp_arg", None), getattr(y, "exp_arg", None)
    if ex is not None and ey is not None:  # exp is increasing
        return (ex > ey) - (ex < ey)
    for prec in precisions():
        xl, xh = bounds_of(x, prec)
        yl, yh = bounds_of(y, prec)
        if xh < yl:
            return -1
        if xl > yh:
            return 1
    raise UndecidableError("comparison undecided at maximum precision")


def bounds_of(x: Real, prec: int = START_PREC) -> Tuple[Fraction, Fraction]:
    if isinstance(x, Fraction):
        return x, x
    return x.bounds(prec)


def iroot(a: int, k: int) -> int:
    """``floor(a ** (1/k))`` for integers ``a >= 0``, ``k >= 1``."""
    if a < 0 or k < 1:
        raise ValueError("iroot needs a >= 0 and k >= 1")
    if a < 2 or k == 1:
        return a
    if k == 2:
        return math.isqrt(a)
    x = 1 << ((a.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + a // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > a:
        x -= 1
    while (x + 1) ** k <= a:
        x += 1
    return x


class RationalPower(LazyReal):
    """``base ** exponent`` with rational data whose value is irrational."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Fraction, exponent: Fraction):
        self.base = base
        self.exponent = exponent
        b, e = base, exponent
        super().__init__(lambda prec: iv.exp(iv.log(iv_from_fraction(b)) * iv_from_fraction(e)))

    def exact_floor(self) -> int:
        e = self.exponent
        y = self.base ** e.numerator  # exponent denominator > 1, base > 0
        r = iroot(math.floor(y), e.denominator)
        return r

    def exact_ceil(self) -> int:
        return self.exact_floor() + 1  # the value is irrational


def exact_rational_power(base: Fraction, exponent: Fraction) -> Real:
    if exponent.denominator == 1:
        if base == 0 and exponent < 0:
            raise ZeroDivisionError("0 to a negative power")
        return base ** int(exponent)
    if base < 0:
        raise ValueError("negative base with fractional exponent")
    if base == 0:
        return Fraction(0)
    y = base ** exponent.numerator
    k = exponent.denominator
    rn, rd = iroot(y.numerator, k), iroot(y.denominator, k)
    if rn ** k == y.numerator and rd ** k == y.denominator:
        return Fraction(rn, rd)
    return RationalPower(base, exponent)


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __str__(self) -> str:
        return f"[{float(self.lo)!r},{float(self.hi)!r}]"

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi


def log_bounds(x: Fraction, prec: int = 128) -> Tuple[float, float]:
    """Floats ``lo <= log(x) <= hi`` for a positive rational ``x``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of non-positive number")
    with ivprec(prec):
        v = iv.log(iv_from_fraction(x))
    lo, hi = iv_bounds(v)
    return down(float(lo)), up(float(hi))


def down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def up(x: float) -> float:
    return math.nextafter(x, math.inf)


def float_lower(x: Real) -> float:
    lo, _ = bounds_of(x, 128)
    return down(float(lo))


def float_upper(x: Real) -> float:
    _, hi = bounds_of(x, 128)
    return up(float(hi))


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def fmt_fraction(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
