"""Digits of reals, box counts, Moran-equation roots and dimension reports.

A real ``x`` in ``[0, 1]`` is identified with its base-``q`` digit stream,
choosing the expansion that ends in ``0^inf`` for ``q``-adic rationals (and
``(q-1)^inf`` for ``x = 1``).  The set of reals whose stream lies in ``W(f)``
is covered at depth ``n`` by the block intervals of the words of ``S_n``,
so box counts are slice sizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mpmath import iv

from .bounds import expr as E
from .bounds.effective import as_real
from .bounds.reals import MAX_PREC, START_PREC, Real, UndecidableError, compare, down, iv_bounds, ivprec, log_bounds, up
from .bounds.spec import BoundSpec
from .words.stream import WordLike, WordStream, as_word, check_alphabet, format_word

# -- digits ---------------------------------------------------------------------


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def digits_of(x, q: int, n: int) -> str:
    """First ``n`` base-``q`` digits of ``x`` in ``[0, 1]``."""
    q = check_alphabet(q)
    x = _as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("need 0 <= x <= 1")
    if x == 1:
        return format_word([q - 1] * n)
    out = []
    for _ in range(n):
        x *= q
        d = math.floor(x)
        out.append(d)
        x -= d
    return format_word(out)


def expansion(x, q: int) -> Tuple[str, str]:
    """Exact ``(preperiod, period)`` of the base-``q`` expansion of a rational."""
    q = check_alphabet(q)
    x = _as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("need 0 <= x <= 1")
    if x == 1:
        return "", format_word([q - 1])
    seen: Dict[Fraction, int] = {}
    digits: List[int] = []
    while x not in seen:
        seen[x] = len(digits)
        x *= q
        d = math.floor(x)
        digits.append(d)
        x -= d
    start = seen[x]
    return format_word(digits[:start]), format_word(digits[start:])


def from_expansion(pre: WordLike, period: WordLike, q: int) -> Fraction:
    """Exact value of ``pre period period ...`` in base ``q``."""
    q = check_alphabet(q)
    a = as_word(pre, q).tolist()
    b = as_word(period, q).tolist()
    head = Fraction(sum(d * q ** (len(a) - 1 - i) for i, d in enumerate(a)), q ** len(a))
    if not b:
        return head
    p = len(b)
    per = Fraction(sum(d * q ** (p - 1 - i) for i, d in enumerate(b)), q ** p - 1)
    return head + per / q ** len(a)


@dataclass(frozen=True)
class DigitInterval:
    """``[lo, hi]`` of all reals whose stream starts with the given digits."""

    lo: Fraction
    hi: Fraction
    q: int
    n: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __str__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def value_of(digits: Union[WordLike, WordStream], q: int, n: Optional[int] = None) -> DigitInterval:
    """Truncation enclosure of the value of a digit word or stream prefix."""
    q = check_alphabet(q)
    if isinstance(digits, WordStream):
        if n is None:
            raise ValueError("need n for a stream")
        arr = digits.prefix(n).tolist()
    else:
        arr = as_word(digits, q).tolist()
        if n is not None:
            arr = arr[:n]
    k = len(arr)
    num = 0
    for d in arr:
        if d >= q:
            raise ValueError(f"digit {d} outside base {q}")
        num = num * q + d
    lo = Fraction(num, q ** k)
    return DigitInterval(lo, lo + Fraction(1, q ** k), q, k)


def digit_maps(obj, q: int, n: int):
    """Digits of a real (``n`` of them) or the value enclosure of a digit word/stream."""
    if isinstance(obj, (WordStream, bytes, list, tuple)) or hasattr(obj, "dtype"):
        return value_of(obj, q, n)
    if isinstance(obj, str) and "/" not in obj and "." not in obj:
        return value_of(obj, q, n)
    return digits_of(obj, q, n)


def shift_apply(x, q: int = 2) -> Fraction:
    """``{q x}``: the value of the stream with its first digit removed."""
    x = _as_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("need 0 <= x <= 1")
    if x == 1:
        return Fraction(1)
    y = q * x
    return y - math.floor(y)


# -- box counts and dimensions --------------------------------------------------


def _slice(f: BoundSpec, n: int, s=None, **kwargs):
    from .engine.slice import enumerate_slice

    if s is None or s.N < n:
        s = enumerate_slice(f, n, **kwargs)
    if s.N < n:
        raise ValueError(f"slice stops at {s.N} < {n} ({s.reason})")
    return s


def box_count(f: BoundSpec, n: int, s=None, **kwargs) -> int:
    """Depth-``n`` block intervals meeting a superset of the digit set: ``|S_n|``.

    This over-counts the minimal cover whenever ``S_n`` is strictly larger
    than the language of ``W(f)``."""
    return _slice(f, n, s, **kwargs).sizes[n]


@dataclass
class DimensionReport:
    q: int
    dim_lower: float
    dim_upper: float
    lower_certified: bool
    ew_lower: float
    ew_upper: float
    note: str = ("Hausdorff and upper box dimension of the digit set coincide, "
                 "so one bracket serves both")

    def as_dict(self) -> dict:
        return {"q": self.q, "lower": self.dim_lower, "upper": self.dim_upper,
                "lower_certified": self.lower_certified, "note": self.note}


def dimension_report(f: BoundSpec, opts=None, *, bracket=None, **kwargs) -> DimensionReport:
    """Dimension bounds ``E_W(f) / log q`` from an entropy bracket."""
    from .engine.bracket import ew_bracket

    br = bracket if bracket is not None else ew_bracket(f, opts, **kwargs)
    q = br.slice.q
    lq_lo, lq_hi = log_bounds(Fraction(q))
    lo = max(0.0, down(br.lower / lq_hi)) if br.lower > 0 else 0.0
    hi = min(1.0, up(br.upper / lq_lo))
    return DimensionReport(q, min(lo, 1.0), max(hi, 0.0), br.certified, br.lower, br.upper)


# -- Moran equation -------------------------------------------------------------


@dataclass(frozen=True)
class MoranRoot:
    lo: Fraction
    hi: Fraction
    note: str = ""

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __str__(self) -> str:
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def _moran_sign(depths: Sequence[int], q: int, lam: Fraction) -> int:
    """Sign of ``sum_j q^(-r_j lam) - 1``."""
    if all((r * lam).denominator == 1 for r in depths):
        s = sum(Fraction(1, q ** int(r * lam)) for r in depths)
        return (s > 1) - (s < 1)
    prec = START_PREC
    while prec <= MAX_PREC:
        with ivprec(prec):
            lq = iv.log(iv.mpf(q))
            lamv = iv.mpf(lam.numerator) / lam.denominator
            tot = iv.mpf(0)
            for r in depths:
                tot += iv.exp(-r * lamv * lq)
            lo, hi = iv_bounds(tot - 1)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        prec *= 2
    raise UndecidableError(f"cannot decide the Moran sum at lambda = {lam}")


def moran_root(cover: Sequence[int], q: int, tol: float = 1e-12) -> MoranRoot:
    """Root ``lambda`` of ``sum_j (q^-r_j)^lambda = 1`` by exact-sign bisection."""
    q = check_alphabet(q)
    depths = [int(r) for r in cover]
    if not depths:
        raise ValueError("empty cover")
    if any(r < 0 for r in depths):
        raise ValueError("depths must be >= 0")
    if 0 in depths:
        if len(depths) == 1:
            return MoranRoot(Fraction(1), Fraction(1), "single depth-0 interval: the map is the identity "
                                                       "and the invariant set is the whole interval")
        raise ValueError("a depth-0 interval is the whole interval and overlaps every other one")
    if len(depths) == 1:
        return MoranRoot(Fraction(0), Fraction(0), "single interval: the invariant set is a point")
    tol_f = Fraction(tol)
    # sum <= J q^(-r_min lam) < 1 once lam > log J / (r_min log q)
    hi = Fraction(math.floor(math.log(len(depths)) / (min(depths) * math.log(q))) + 1)
    lo = Fraction(0)
    while hi - lo > tol_f:
        mid = (lo + hi) / 2
        s = _moran_sign(depths, q, mid)
        if s == 0:
            return MoranRoot(mid, mid)
        if s > 0:
            lo = mid
        else:
            hi = mid
    return MoranRoot(lo, hi)


# -- cover audit ------------------------------------------------------------------


@dataclass
class CoverAudit:
    s: float
    depth: int
    rows: List[Tuple[int, int, bool]]  # (n, |S_n|, holds)
    expected_pass: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.rows)

    @property
    def first_failure(self) -> Optional[int]:
        for n, _, ok in self.rows:
            if not ok:
                return n
        return None

    def as_dict(self) -> dict:
        return {"s": self.s, "depth": self.depth, "passed": self.passed,
                "first_failure": self.first_failure, "expected_pass": self.expected_pass,
                "rows": [{"n": n, "count": c, "holds": ok} for n, c, ok in self.rows]}


def cover_audit(f: BoundSpec, s, depth: int, slice=None, *, dim_lower: Optional[float] = None,
                **kwargs) -> CoverAudit:
    """Check ``|S_n| q^(-n s) >= q^(-s) / 2`` on the canonical depth-``n``
    covers for ``n = 1..depth`` (exactly: ``2 |S_n| >= q^((n-1) s)``)."""
    sl = _slice(f, depth, slice, **kwargs)
    q = sl.q
    sr = as_real(s)
    rows = []
    for n in range(1, depth + 1):
        c = sl.sizes[n]
        rhs = E.r_exp(E.r_mul(E.r_mul(Fraction(n - 1), sr), E.r_log(Fraction(q))))
        ok = compare(Fraction(2 * c), rhs) >= 0
        rows.append((n, c, ok))
    exp = None if dim_lower is None else float(sr) <= dim_lower
    return CoverAudit(float(sr), depth, rows, exp)
