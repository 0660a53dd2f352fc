"""Distinct-factor counting and special factors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .. import _kernels
from .stream import WordLike, as_word, format_word


class FactorIndex:
    """Incremental index of the distinct factors of a growing word.

    With numba available this wraps an online suffix automaton, so appending
    is amortised constant time per letter and one pass yields the number of
    distinct factors of every length.  Without numba it keeps the letters and
    counts by rank refinement on demand.
    """

    def __init__(self, letters: WordLike = (), q: Optional[int] = None):
        arr = as_word(letters, q)
        if q is None:
            q = max(int(arr.max()) + 1, 2) if arr.size else 2
        self.q = int(q)
        self._letters = bytearray(arr.tobytes())
        self._sam = _kernels.SuffixAutomaton(self.q, len(arr)) if _kernels.NUMBA_ENABLED else None
        if self._sam is not None and arr.size:
            self._sam.extend(arr)
        self._cache: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self._letters)

    def append(self, letters: WordLike) -> None:
        arr = as_word(letters, self.q)
        self._letters.extend(arr.tobytes())
        if self._sam is not None:
            self._sam.extend(arr)
        self._cache = None

    @property
    def letters(self) -> np.ndarray:
        return np.frombuffer(bytes(self._letters), dtype=np.uint8)

    def counts(self, n_max: Optional[int] = None) -> List[int]:
        """``[p(0), ..., p(n_max)]`` for the current word (exact ints)."""
        L = len(self)
        n_max = L if n_max is None else min(n_max, L)
        cached = self._cache
        if cached is None or cached.shape[0] <= n_max:
            if self._sam is not None:
                cached = self._sam.length_counts()
            else:
                cached = _kernels.factor_counts_numpy(self.letters, self.q, n_max)
            self._cache = cached
        return [int(x) for x in cached[: n_max + 1]]

    def count(self, n: int) -> int:
        if not 0 <= n <= len(self):
            raise ValueError(f"need 0 <= n <= |u| = {len(self)}, got n={n}")
        return self.counts(n)[n]


def factor_count(u: WordLike, n: int, q: Optional[int] = None) -> int:
    """Number of distinct length-``n`` factors of the finite word ``u``."""
    return FactorIndex(u, q).count(n)


def window_ids(u: np.ndarray, n: int, q: int) -> np.ndarray:
    """Dense ids of the length-``n`` windows of ``u`` (equal ids = equal factors)."""
    u = np.asarray(u, dtype=np.int64)
    if n == 0:
        return np.zeros(len(u) + 1, dtype=np.int64)
    _, ids = np.unique(u, return_inverse=True)
    ids = ids.reshape(-1).astype(np.int64)
    for k in range(1, n):
        ids = _kernels.refine_ids(ids, u, k, q)
    return ids


@dataclass(frozen=True)
class SpecialFactorStats:
    n: int
    p_n: int
    p_next: int
    #: sum of (d+ - 1) over length-n factors that do have a right extension
    s: int
    #: p(n+1) - p(n); equals ``s`` unless some factor is dangling
    difference: int
    #: length-n factors with no right extension inside the finite word
    dangling: Tuple[str, ...]
    #: (factor, d+) for every factor with d+ >= 2
    special: Tuple[Tuple[str, int], ...] = field(default=())


def special_factor_stats(u: WordLike, n: int, q: Optional[int] = None) -> SpecialFactorStats:
    arr = as_word(u, q)
    if n + 1 > len(arr):
        raise ValueError("need n + 1 <= |u|")
    q = int(q or max(int(arr.max()) + 1, 2))
    ids = window_ids(arr, n, q)
    n_ids = int(ids.max()) + 1
    _, first = np.unique(ids, return_index=True)

    nxt = arr[n:].astype(np.int64)
    pair = np.unique(ids[:-1] * q + nxt)
    owner = pair // q
    d_plus = np.bincount(owner, minlength=n_ids)

    def word_of(i: int) -> str:
        pos = int(first[i])
        return format_word(arr[pos : pos + n])

    extended = d_plus > 0
    s = int((d_plus[extended] - 1).sum())
    dangling = tuple(word_of(i) for i in np.flatnonzero(~extended))
    special = tuple((word_of(i), int(d_plus[i])) for i in np.flatnonzero(d_plus >= 2))
    p_n, p_next = n_ids, int(pair.size)
    return SpecialFactorStats(
        n=n,
        p_n=p_n,
        p_next=p_next,
        s=s,
        difference=p_next - p_n,
        dangling=dangling,
        special=tuple(sorted(special)),
    )
