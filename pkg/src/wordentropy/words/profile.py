"""Complexity profiles and the checks every language profile must pass."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .factors import FactorIndex
from .stream import BudgetExceeded, WordStream

EXACT = "exact-for-language"
LOWER = "prefix-lower-bound"


@dataclass(frozen=True)
class ComplexityProfile:
    """Counts ``p(0..n_max)``; ``kind`` says whether they are exact for the
    infinite word or only lower bounds read off a prefix."""

    counts: Tuple[int, ...]
    kind: str = LOWER
    q: int = 2
    prefix_len: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (EXACT, LOWER):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if not self.counts or self.counts[0] != 1:
            raise ValueError("a profile starts with p(0) = 1")

    @property
    def n_max(self) -> int:
        return len(self.counts) - 1

    def differences(self) -> List[int]:
        """``s(n) = p(n+1) - p(n)`` for ``n < n_max``."""
        c = self.counts
        return [c[i + 1] - c[i] for i in range(len(c) - 1)]

    def rates(self) -> List[Optional[float]]:
        """``(1/n) log p(n)``; ``None`` at ``n = 0``."""
        return [None] + [math.log(c) / n for n, c in enumerate(self.counts) if n > 0]


def profile(w: WordStream, N: int, prefix_len: int) -> ComplexityProfile:
    if N > prefix_len:
        raise ValueError("need N <= prefix_len")
    if prefix_len > w.max_letters:
        raise BudgetExceeded(f"prefix of {prefix_len} letters exceeds cap {w.max_letters}")
    counts = FactorIndex(w.prefix(prefix_len), w.q).counts(N)
    exact = False
    sat = w.saturating_length(N)
    if sat is not None and sat <= prefix_len:
        exact = True
    elif w.language_size is not None:
        exact = all(counts[n] == w.language_size(n) for n in range(N + 1))
    return ComplexityProfile(tuple(counts), EXACT if exact else LOWER, w.q, prefix_len)


@dataclass(frozen=True)
class EnvelopeReport:
    ok: bool
    #: first (n, n', p(n+n')) with p(n+n') > p(n) p(n')
    submultiplicative_violation: Optional[Tuple[int, int, int]]
    #: first (n, n0, p(n)) with p(n) > p(n0)^ceil(n/n0)
    claim_violation: Optional[Tuple[int, int, int]]
    #: running minimum of (1/k) log p(k), k = 1..n_max
    running_min: Tuple[float, ...]
    argmin: Optional[int]


def envelope_checks(pr: ComplexityProfile, *, require_exact: bool = True) -> EnvelopeReport:
    if require_exact and pr.kind != EXACT:
        raise ValueError("envelope checks need an exact language profile")
    p = pr.counts
    N = pr.n_max
    sub = None
    for total in range(2, N + 1):
        for n in range(1, total // 2 + 1):
            if p[total] > p[n] * p[total - n]:
                sub = (n, total - n, p[total])
                break
        if sub:
            break

    claim = None
    for n in range(1, N + 1):
        for n0 in range(1, N + 1):
            if p[n] > p[n0] ** (-(-n // n0)):
                claim = (n, n0, p[n])
                break
        if claim:
            break

    running: List[float] = []
    best = math.inf
    argmin = None
    for k in range(1, N + 1):
        r = math.log(p[k]) / k
        if r < best:
            best, argmin = r, k
        running.append(best)
    return EnvelopeReport(sub is None and claim is None, sub, claim, tuple(running), argmin)


def profile_from_counts(counts: Sequence[int], kind: str = EXACT, q: int = 2) -> ComplexityProfile:
    return ComplexityProfile(tuple(int(c) for c in counts), kind, q)
