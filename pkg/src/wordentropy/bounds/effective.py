"""Effective lengths for finding factor-rich windows in words of entropy > c.

For ``0 < c <= log q`` and ``n >= 1``::

    g(n)      = n * ceil( (n log 2 + e^{cn} (1 + n (log q - c))) / (c n - log(ceil(e^{cn}) - 1)) )
    f(N)      = max_{1 <= n <= N} g(n)
    tilde(n)  = n * ceil( (n log 2 + e^{cn} (1 + n (log q - c))) / log 2 )

A word with entropy above ``c`` has a factor of length ``f(N)`` whose prefix
of length ``g(n)`` holds at least ``ceil(e^{cn})`` distinct length-``n``
factors for every ``n <= N``.  :func:`rich_factor_search` looks for one.

Every ceiling is settled by interval arithmetic with growing precision; an
enclosure that still straddles an integer at the precision cap raises
:class:`UndecidableCeiling` instead of rounding silently.  Passing ``c`` as
``log(B)`` for a rational ``B`` keeps ``e^{cn} = B^n`` exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from .. import _kernels
from ..words.factors import window_ids
from ..words.stream import BudgetExceeded, WordStream, format_word
from . import expr as E
from .reals import Real, UndecidableError, compare, exact_ceil

CLike = Union[str, int, Fraction, Real]


class UndecidableCeiling(UndecidableError):
    pass


def as_real(c: CLike) -> Real:
    if isinstance(c, str):
        return E.parse_constant(c)[1]
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(repr(c))
    return c


def _check_c(q: int, c: Real) -> None:
    if compare(c, Fraction(0)) <= 0:
        raise ValueError("need c > 0")
    try:
        above = compare(c, E.r_log(Fraction(q))) > 0
    except UndecidableError:
        above = False  # c equal to log q; allowed
    if above:
        raise ValueError("need c <= log q")


def _ceil(x: Real, what: str) -> int:
    try:
        return exact_ceil(x)
    except UndecidableError as exc:
        raise UndecidableCeiling(f"ceiling of {what} is undecidable at maximum precision") from exc


def growth_count(c: Real, n: int) -> int:
    """``ceil(e^{cn})``."""
    return _ceil(E.r_exp(E.r_mul(c, Fraction(n))), f"e^(c*{n})")


def _numerator(q: int, c: Real, n: int) -> Real:
    F = Fraction
    ecn = E.r_exp(E.r_mul(c, F(n)))
    log2 = E.r_log(F(2))
    inner = E.r_add(F(1), E.r_mul(F(n), E.r_sub(E.r_log(F(q)), c)))
    return E.r_add(E.r_mul(F(n), log2), E.r_mul(ecn, inner))


def g_value(q: int, c: Real, n: int) -> int:
    m = growth_count(c, n)
    denom = E.r_sub(E.r_mul(c, Fraction(n)), E.r_log(Fraction(m - 1)))
    return n * _ceil(E.r_div(_numerator(q, c, n), denom), f"the g ratio at n={n}")


def tilde_value(q: int, c: Real, n: int) -> int:
    ratio = E.r_div(_numerator(q, c, n), E.r_log(Fraction(2)))
    return n * _ceil(ratio, f"the tilde ratio at n={n}")


def g_qc_family(q: int, c: CLike, n: int, which: str = "g") -> int:
    """``g_(q,c)(n)``, ``f_(q,c)(n)`` (max of g up to n) or ``tilde f_(q,c)(n)``."""
    if n < 1:
        raise ValueError("need n >= 1")
    cr = as_real(c)
    _check_c(q, cr)
    if which == "g":
        return g_value(q, cr, n)
    if which == "f":
        return max(g_value(q, cr, m) for m in range(1, n + 1))
    if which == "tilde":
        return tilde_value(q, cr, n)
    raise ValueError(f"which must be g, f or tilde, not {which!r}")


@dataclass(frozen=True)
class RichFactor:
    found: bool
    position: Optional[int]
    factor: Optional[str]
    length: int
    #: (n, g(n), ceil(e^{cn})) for n = 1..N
    requirements: Tuple[Tuple[int, int, int], ...]
    #: distinct-factor counts of the prefixes at the returned position
    counts: Tuple[int, ...] = ()
    reason: str = ""


def rich_factor_search(
    w: WordStream, q: int, c: CLike, N: int, search_window: int
) -> RichFactor:
    """First factor of ``w[0:search_window]`` of length ``f_(q,c)(N)`` whose
    length-``g(n)`` prefix has ``>= ceil(e^{cn})`` distinct length-``n``
    factors for every ``1 <= n <= N``."""
    if N < 1:
        raise ValueError("need N >= 1")
    cr = as_real(c)
    _check_c(q, cr)
    gs = [g_value(q, cr, n) for n in range(1, N + 1)]
    need = [growth_count(cr, n) for n in range(1, N + 1)]
    L = max(gs)
    reqs = tuple((n, gs[n - 1], need[n - 1]) for n in range(1, N + 1))
    if search_window < L:
        return RichFactor(False, None, None, L, reqs, reason="window shorter than the factor length")
    if search_window > w.max_letters:
        raise BudgetExceeded(f"search window {search_window} exceeds cap {w.max_letters}")
    u = w.prefix(search_window)
    starts = search_window - L + 1
    ok = np.ones(starts, dtype=bool)
    per_n: List[np.ndarray] = []
    for n in range(1, N + 1):
        g = gs[n - 1]
        if need[n - 1] > g - n + 1:  # too few windows to ever reach the count
            ok[:] = False
            per_n.append(np.zeros(starts, dtype=np.int64))
            continue
        ids = window_ids(u, n, q)
        ids = np.unique(ids, return_inverse=True)[1].reshape(-1).astype(np.int64)
        cnt = _kernels.sliding_distinct(ids, int(ids.max()) + 1, g - n + 1)[:starts]
        per_n.append(cnt)
        ok &= cnt >= need[n - 1]
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return RichFactor(False, None, None, L, reqs,
                          reason="no rich factor in the window: entropy below c or window too small")
    i = int(hits[0])
    counts = tuple(int(per_n[k][i]) for k in range(N))
    return RichFactor(True, i, format_word(u[i : i + L]), L, reqs, counts, "found")
