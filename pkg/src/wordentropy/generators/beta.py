"""beta-shift factor sets, the padding maps g and g_r, and the exponential-order word.

``alpha`` is the quasi-greedy expansion of 1 in base ``beta = e^h``:
``r_0 = 1``, ``d_i = ceil(beta r_{i-1}) - 1``, ``r_i = beta r_{i-1} - d_i``.
It is lexicographically maximal among its shifts and never ends in ``0^inf``,
and the shift space ``{theta : every shift of theta <= alpha}`` has entropy
``h``.  A finite word is a factor of that space iff every suffix ``s`` satisfies
``s <= alpha[:len(s)]`` (``u 0^inf`` is then admissible), which is how
``Lambda_n`` is built.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from mpmath import iv

from ..bounds import expr as E
from ..bounds.effective import as_real
from ..bounds.reals import (
    MAX_PREC,
    START_PREC,
    Real,
    compare,
    exact_ceil,
    iv_bounds,
    ivprec,
    to_interval,
)
from ..words.stream import WordLike, WordStream, as_word, check_alphabet, format_word

#: codes and tight-suffix masks live in 64-bit integers
MAX_LENGTH = 62


def _beta(h: Real) -> Real:
    return E.r_exp(h)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


class BetaShift:
    """``W_alpha`` for the quasi-greedy ``alpha`` of ``beta = e^h``, with lazily
    extended ``alpha`` and cached factor levels."""

    def __init__(self, h):
        self.h = as_real(h)
        if compare(self.h, Fraction(0)) <= 0:
            raise ValueError("need h > 0")
        self.beta = _beta(self.h)
        self.q = int(exact_ceil(self.beta))
        self.digits: List[int] = []
        #: when alpha is known to be purely periodic, its period
        self.period: Optional[int] = None
        # exact state for rational beta
        self._r = Fraction(1) if isinstance(self.beta, Fraction) else None
        self._codes: List[np.ndarray] = [np.zeros(1, dtype=np.int64)]
        self._masks: List[np.ndarray] = [np.ones(1, dtype=np.uint64)]

    # -- alpha ---------------------------------------------------------------

    def alpha(self, n: int) -> Tuple[int, ...]:
        """First ``n`` digits of ``alpha``."""
        if self.period is None and len(self.digits) < n:
            if self._r is not None:
                self._extend_exact(n)
            else:
                self._extend_interval(n)
        if self.period is not None:
            p = self.period
            return tuple(self.digits[i % p] for i in range(n))
        return tuple(self.digits[:n])

    def _extend_exact(self, n: int) -> None:
        beta = self.beta
        while len(self.digits) < n and self.period is None:
            x = beta * self._r
            d = _ceil_frac(x) - 1
            self.digits.append(d)
            self._r = x - d
            if self._r == 1:
                self.period = len(self.digits)

    def _extend_interval(self, n: int) -> None:
        # recomputed from scratch at each precision: error grows like beta^i
        prec = START_PREC
        while True:
            digits, periodic = self._run(n, prec, prec >= MAX_PREC)
            if digits is not None:
                self.digits = digits
                if periodic:
                    self.period = len(digits)
                return
            prec *= 2

    def _run(self, n: int, prec: int, snap: bool):
        with ivprec(prec):
            b = to_interval(self.beta, prec)
            r = iv.mpf(1)
            out: List[int] = []
            for _ in range(n):
                x = b * r
                lo, hi = iv_bounds(x)
                clo, chi = _ceil_frac(lo), _ceil_frac(hi)
                if clo == chi:
                    d = clo - 1
                    out.append(d)
                    r = x - d
                    continue
                if chi - clo > 1 or not snap:
                    return None, False
                # beta r is an integer to 4096 bits: taken as exact; alpha
                # then repeats the digits found so far.
                out.append(clo - 1)
                return out, True
        return out, False

    def r_filler(self) -> int:
        """Smallest ``r >= 1`` with ``alpha > 1 0^(r-1) 1 0^inf`` (binary case)."""
        if self.q != 2:
            raise ValueError("the filler length is defined for q = 2")
        n = 8
        while True:
            a = self.alpha(n)
            for j in range(1, n):
                if a[j]:
                    return j
            n *= 2

    # -- factors -------------------------------------------------------------

    def _level(self, n: int) -> None:
        if n > MAX_LENGTH:
            raise ValueError(f"factor lengths above {MAX_LENGTH} are not supported")
        if self.q ** n >= 1 << 63:
            raise ValueError("q^n must fit in 63 bits")
        alpha = self.alpha(n)
        q = self.q
        while len(self._codes) <= n:
            k = len(self._codes) - 1
            codes, masks = self._codes[k], self._masks[k]
            new_c, new_m = [], []
            for a in range(q):
                gt = sum(1 << l for l in range(k + 1) if alpha[l] < a)
                eq = sum(1 << l for l in range(k + 1) if alpha[l] == a)
                ok = (masks & np.uint64(gt)) == 0
                new_c.append(codes[ok] * q + a)
                new_m.append(((masks[ok] & np.uint64(eq)) << np.uint64(1)) | np.uint64(1))
            c = np.concatenate(new_c)
            m = np.concatenate(new_m)
            order = np.argsort(c, kind="stable")
            self._codes.append(c[order])
            self._masks.append(m[order])

    def factor_codes(self, n: int) -> np.ndarray:
        """Sorted base-``q`` codes of ``Lambda_n`` (lexicographic order)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        self._level(n)
        return self._codes[n]

    def count(self, n: int) -> int:
        return int(self.factor_codes(n).size)

    def factor_rows(self, n: int) -> np.ndarray:
        codes = self.factor_codes(n)
        out = np.empty((codes.size, n), dtype=np.uint8)
        c = codes.copy()
        for j in range(n - 1, -1, -1):
            c, out[:, j] = np.divmod(c, self.q)
        return out

    def factors(self, n: int) -> List[str]:
        return [format_word(row) for row in self.factor_rows(n)]

    def contains(self, u: WordLike) -> bool:
        arr = tuple(int(x) for x in as_word(u, self.q))
        a = self.alpha(len(arr))
        return all(arr[i:] <= a[: len(arr) - i] for i in range(len(arr)))

    def describe(self, n: int = 24) -> dict:
        return {"q": self.q, "alpha_prefix": format_word(self.alpha(n)),
                "alpha_period": self.period}


def beta_factors(h, n: int) -> frozenset:
    """``Lambda_n(h)`` as a set of digit strings."""
    return frozenset(BetaShift(h).factors(n))


# -- padding maps --------------------------------------------------------------


def pad_map(v: WordLike, q: int, r: int = 1) -> str:
    """``g`` (``q = 2``) or ``g_r`` (``q >= 3``); both map length ``n`` to ``n+1``.

    With ``i*`` the position of the last non-zero letter, ``g`` inserts a 0
    just before it, while ``g_r`` lowers it by one and writes ``r`` after it.
    Zero words map to one more zero.
    """
    q = check_alphabet(q)
    if q >= 3 and not 1 <= r <= q - 2:
        raise ValueError(f"need 1 <= r <= q-2, got r={r}")
    arr = as_word(v, q)
    return format_word(_pad_rows(arr.reshape(1, -1), q, r)[0])


def _pad_rows(D: np.ndarray, q: int, r: int) -> np.ndarray:
    rows, n = D.shape
    out = np.zeros((rows, n + 1), dtype=np.uint8)
    if n == 0:
        return out
    nz = D != 0
    last = np.where(nz.any(axis=1), n - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
    cols = np.arange(n)
    out[:, :n] = np.where(cols[None, :] < last[:, None], D, 0)
    idx = np.nonzero(last >= 0)[0]
    li = last[idx]
    if q == 2:
        out[idx, li] = 0
        out[idx, li + 1] = D[idx, li]
    else:
        out[idx, li] = D[idx, li] - 1
        out[idx, li + 1] = r
    return out


# -- exponential-order word ----------------------------------------------------


def growth_constant(shift: BetaShift) -> Fraction:
    if shift.q == 2:
        return Fraction(2 ** (shift.r_filler() + 1))
    return Fraction(shift.q + 1, shift.q - 2)


def exp_order_word(h) -> WordStream:
    """Blocks ``g(gamma) 0^r`` (``q = 2``) or ``g_1(gamma)`` (``q >= 3``) over
    ``gamma`` in ``Lambda_1, Lambda_2, ...``, each level in lexicographic order.

    Every factor stays in the admissible language.  A word of ``Lambda_N``
    shows up inside the padded image of some longer admissible word
    ``gamma 0^k 1``, so saturation is located by scanning for the last
    first-occurrence rather than assumed at the end of level ``N``.
    """
    shift = BetaShift(h)
    q = shift.q
    r = shift.r_filler() if q == 2 else 1
    tail = bytes(r) if q == 2 else b""

    def level_bytes(n: int) -> bytes:
        P = _pad_rows(shift.factor_rows(n), q, r)
        if tail:
            P = np.hstack([P, np.zeros((P.shape[0], len(tail)), dtype=np.uint8)])
        return P.tobytes()

    def factory():
        n = 1
        while True:
            yield level_bytes(n)
            n += 1

    sat: Dict[int, int] = {0: 0}

    def saturation(N: int) -> int:
        if N in sat:
            return sat[N]
        need = shift.factor_codes(N)
        buf = bytearray()
        n = 1
        while True:
            buf += level_bytes(n)
            n += 1
            if n <= N:
                continue
            arr = np.frombuffer(bytes(buf), dtype=np.uint8)
            codes = _window_codes(arr, N, q)
            uniq, first = np.unique(codes, return_index=True)
            hit = np.isin(need, uniq)
            if hit.all():
                pos = first[np.searchsorted(uniq, need)]
                sat[N] = int(pos.max()) + N
                return sat[N]

    C = growth_constant(shift)
    return WordStream(
        q,
        factory,
        f"exp-order(h={_h_text(h)})",
        saturation=saturation,
        language_size=shift.count,
        meta={"word": "exp-order", "q": q, "r": r, "C": str(C), **shift.describe()},
    )


def _window_codes(arr: np.ndarray, n: int, q: int) -> np.ndarray:
    m = arr.size - n + 1
    if m <= 0:
        return np.zeros(0, dtype=np.int64)
    c = np.zeros(m, dtype=np.int64)
    for j in range(n):
        c = c * q + arr[j : j + m]
    return c


def _h_text(h) -> str:
    return h if isinstance(h, str) else str(h)
