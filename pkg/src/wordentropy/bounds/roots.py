"""Certified real roots of integer polynomials by exact rational bisection."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple, Union

Number = Union[int, float, str, Fraction]


class NoSignChange(ValueError):
    pass


@dataclass(frozen=True)
class RootEnclosure:
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __str__(self) -> str:
        return f"[{float(self.lo)!r},{float(self.hi)!r}]"


def poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    """Horner evaluation; ``coeffs`` from the highest degree down."""
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _dyadic_mid(lo: Fraction, hi: Fraction) -> Fraction:
    # the coarsest dyadic rational strictly inside (lo, hi) keeps numbers short
    w = hi - lo
    k = 0
    while Fraction(1, 1 << k) > w / 2:
        k += 1
    scale = 1 << k
    m = Fraction(int((lo + hi) / 2 * scale), scale)
    if lo < m < hi:
        return m
    return (lo + hi) / 2


def real_root(
    coeffs: Sequence[int], interval: Tuple[Number, Number], tol: Number = Fraction(1, 10**9)
) -> RootEnclosure:
    """Enclose a root of ``coeffs`` in ``interval`` to width ``<= tol``.

    The endpoints of the result are exact rationals with the polynomial
    taking opposite signs (or zero) on them, so the enclosure is certified.
    """
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if lo > hi:
        lo, hi = hi, lo
    s_lo, s_hi = _sign(poly_eval(coeffs, lo)), _sign(poly_eval(coeffs, hi))
    if s_lo == 0:
        return RootEnclosure(lo, lo)
    if s_hi == 0:
        return RootEnclosure(hi, hi)
    if s_lo == s_hi:
        raise NoSignChange(f"polynomial has the same sign at {lo} and {hi}")
    while hi - lo > tol:
        m = _dyadic_mid(lo, hi)
        s = _sign(poly_eval(coeffs, m))
        if s == 0:
            return RootEnclosure(m, m)
        if s == s_lo:
            lo = m
        else:
            hi = m
    return RootEnclosure(lo, hi)


def recurrence_polynomial(coeffs: Sequence[int]) -> Tuple[int, ...]:
    """``x^d - c1 x^(d-1) - ... - cd`` for ``f(n) = sum c_i f(n-i)``."""
    return (1,) + tuple(-int(c) for c in coeffs)


def dominant_root(coeffs: Sequence[int], tol: Number = Fraction(1, 2**80)) -> RootEnclosure:
    """Positive root of the characteristic polynomial of a nonnegative recurrence.

    For nonnegative ``c_i`` (not all zero) ``1 - sum c_i x^-i`` is increasing
    on ``x > 0``, so the positive root is unique and dominates every other root
    in modulus.
    """
    if any(c < 0 for c in coeffs) or not any(coeffs):
        raise ValueError("need nonnegative coefficients, not all zero")
    coeffs = list(coeffs)
    while coeffs[-1] == 0:  # x^j factors do not move the positive root
        coeffs.pop()
    poly = recurrence_polynomial(coeffs)
    return real_root(poly, (0, 1 + max(coeffs)), tol)
