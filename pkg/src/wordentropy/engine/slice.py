"""Finite-horizon survivor sets ``S_n`` and the counting upper bound.

``S_n`` holds the length-``n`` words whose own factor counts respect ``f`` at
every length.  Every factor of a word of ``W(f)`` passes that test, so
``S_n`` contains the length-``n`` language of ``W(f)`` and
``min_n (1/n) log |S_n|`` bounds the word entropy from above.

The survivor trie is stored level by level: level ``n`` keeps, for each node,
the index of its parent in level ``n-1`` and its last letter.  Levels come
out in lexicographic order because parents are processed in order and
letters in increasing order.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .. import _kernels
from ..bounds.reals import log_bounds, up
from ..bounds.spec import BoundSpec
from ..generators.sft import EmptyLanguage, SftSystem
from ..words.stream import BudgetExceeded, WordLike, as_word, check_alphabet

#: survivors per level; the arrays cost roughly 5 (n + 2) bytes per survivor
DEFAULT_BUDGET = 4_000_000
# counts of a length-L word never exceed L, so caps can be clipped for int16
_CAP_CLIP = 32000
_SHARD_MIN = 1 << 14


@dataclass
class Slice:
    f: BoundSpec
    q: int
    N: int
    requested: int
    #: |S_n| for n = 0..N
    sizes: Tuple[int, ...]
    parents: List[np.ndarray] = field(repr=False)
    letters: List[np.ndarray] = field(repr=False)
    truncated: bool = False
    reason: str = ""
    seconds: float = 0.0

    def count(self, n: int) -> int:
        return self.sizes[n]

    def words(self, n: int) -> np.ndarray:
        """Survivors of length ``n`` as a ``(|S_n|, n)`` letter array, lex order."""
        if not 0 <= n <= self.N:
            raise ValueError(f"level {n} not in slice (N = {self.N})")
        out = np.empty((self.sizes[n], n), dtype=np.uint8)
        idx = np.arange(self.sizes[n])
        for j in range(n, 0, -1):
            out[:, j - 1] = self.letters[j][idx]
            idx = self.parents[j][idx]
        return out

    def contains(self, u: WordLike) -> bool:
        arr = as_word(u, self.q)
        if arr.size > self.N:
            raise ValueError("word longer than the slice horizon")
        node = 0
        for j, a in enumerate(arr.tolist(), start=1):
            par, let = self.parents[j], self.letters[j]
            lo = np.searchsorted(par, node, side="left")
            hi = np.searchsorted(par, node, side="right")
            hit = np.nonzero(let[lo:hi] == a)[0]
            if hit.size == 0:
                return False
            node = int(lo + hit[0])
        return True

    def child_masks(self, n: int) -> np.ndarray:
        """Trie view: bit ``a`` of entry ``i`` is set when node ``i`` of level
        ``n`` has child letter ``a``."""
        masks = np.zeros(self.sizes[n], dtype=np.int64)
        if n < self.N:
            np.bitwise_or.at(masks, self.parents[n + 1], np.int64(1) << self.letters[n + 1].astype(np.int64))
        return masks

    def summary(self) -> dict:
        return {"N": self.N, "requested": self.requested, "q": self.q,
                "sizes": list(self.sizes), "truncated": self.truncated, "reason": self.reason}


def _caps(f: BoundSpec, N: int, q: int) -> np.ndarray:
    caps = np.empty(N + 2, dtype=np.int64)
    floors = f.floors(N + 1)
    for k in range(N + 2):
        caps[k] = min(int(floors[k]), _CAP_CLIP)
    caps[0] = max(caps[0], 1)
    caps[1] = min(caps[1], q)
    return caps


def _extend_sharded(words, lcs, counts, caps, q, workers):
    c = words.shape[0]
    if workers <= 1 or c < 2 * _SHARD_MIN:
        return _kernels.extend_level(words, lcs, counts, caps, q)
    bounds = np.linspace(0, c, workers + 1).astype(np.int64)
    jobs = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda ab: _kernels.extend_level(
            words[ab[0]:ab[1]], lcs[ab[0]:ab[1]], counts[ab[0]:ab[1]], caps, q), jobs))
    # shards are contiguous, so concatenation keeps the serial order
    parent = np.concatenate([p[0] + a for p, (a, _) in zip(parts, jobs)])
    return (parent,) + tuple(np.concatenate([p[i] for p in parts]) for i in range(1, 5))


def enumerate_slice(f: BoundSpec, N: int, budget: int = DEFAULT_BUDGET, *, q: Optional[int] = None,
                    workers: int = 1, strict: bool = False) -> Slice:
    """Survivor sets up to ``N`` by level-wise extension with pruning.

    A child is kept only if its factor counts stay within ``floor f(k)``;
    since counts only grow under extension, discarding a word discards its
    whole subtree.  If a level would exceed ``budget`` survivors the slice
    stops at the last complete level (``truncated``), or ``BudgetExceeded``
    is raised with ``strict=True``.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    if N + 2 > _CAP_CLIP:
        raise ValueError("horizon too large")
    q = check_alphabet(f.q if q is None else q)
    t0 = time.time()
    caps = _caps(f, N, q)
    words = np.zeros((1, 0), dtype=np.uint8)
    lcs = np.zeros((1, 0), dtype=np.int16)
    counts = np.ones((1, 1), dtype=np.int16)
    sizes = [1]
    parents = [np.zeros(0, dtype=np.int64)]
    letters = [np.zeros(0, dtype=np.uint8)]
    truncated, reason = False, ""
    for L in range(N):
        parent, letter, words_n, lcs_n, counts_n = _extend_sharded(words, lcs, counts, caps, q, workers)
        if parent.size > budget:
            truncated, reason = True, f"level {L + 1} has {parent.size} survivors > budget {budget}"
            break
        words, lcs, counts = words_n, lcs_n, counts_n
        parents.append(parent)
        letters.append(letter)
        sizes.append(int(parent.size))
    s = Slice(f, q, len(sizes) - 1, N, tuple(sizes), parents, letters, truncated, reason, time.time() - t0)
    if truncated and strict:
        err = BudgetExceeded(reason)
        err.partial = s
        raise err
    return s


def naive_slice_sizes(f: BoundSpec, N: int, q: Optional[int] = None) -> List[int]:
    """Exhaustive filter over all ``q^n`` words (oracle for small ``n``)."""
    from ..words.factors import factor_count

    q = f.q if q is None else q
    floors = f.floors(N)
    out = []
    for n in range(N + 1):
        total = 0
        for code in range(q ** n):
            w = np.base_repr(code, q).zfill(n) if n else ""
            if all(factor_count(w, k) <= floors[k] for k in range(1, n + 1)):
                total += 1
        out.append(total)
    return out


@dataclass(frozen=True)
class UpperBound:
    value: float
    n_star: int
    count: int
    #: outward-rounded (1/n) log |S_n| for n = 1..N
    rates: Tuple[float, ...]

    def as_dict(self) -> dict:
        return {"value": self.value, "n_star": self.n_star, "count": self.count}


def upper_bound(f: BoundSpec, N: int, s: Optional[Slice] = None, **kwargs) -> UpperBound:
    """``min_{1<=n<=N} (1/n) log |S_n|``, rounded upwards."""
    if s is None or s.N < N:
        s = enumerate_slice(f, N, **kwargs)
    N = min(N, s.N)
    rates = []
    for n in range(1, N + 1):
        c = s.sizes[n]
        if c == 0:
            rates.append(-math.inf)
            continue
        rates.append(up(log_bounds(c)[1] / n) if c > 1 else 0.0)
    n_star = min(range(1, N + 1), key=lambda n: (rates[n - 1], n))
    v = rates[n_star - 1]
    return UpperBound(max(v, 0.0), n_star, s.sizes[n_star], tuple(rates))


@dataclass
class FollowerGraph:
    m: int
    system: SftSystem
    component_sizes: Tuple[int, ...]

    def largest(self) -> SftSystem:
        comp = self.system.components()[0]
        return self.system.restrict(comp)

    def as_dict(self) -> dict:
        return {"memory": self.m, "vertices": self.system.vertex_words(),
                "edges": self.system.allowed_words(), "components": list(self.component_sizes)}


def build_pruned_graph(s: Slice, m: int) -> FollowerGraph:
    """Follower graph on the ``m``-words of ``S_N`` whose edges are the
    ``(m+1)``-factors occurring in ``S_N``, pruned to in/out degree >= 1."""
    if not 1 <= m < s.N:
        raise ValueError(f"need 1 <= m < N = {s.N}")
    W = s.words(s.N).astype(np.int64)
    if W.shape[0] == 0:
        raise EmptyLanguage("the slice is empty")
    q = s.q
    codes = []
    width = W.shape[1] - m
    for i in range(width):
        c = np.zeros(W.shape[0], dtype=np.int64)
        for j in range(m + 1):
            c = c * q + W[:, i + j]
        codes.append(np.unique(c))
    edges = np.unique(np.concatenate(codes))
    X = SftSystem.from_allowed(q, m, edges.tolist())
    sizes = tuple(len(c) for c in X.components())
    return FollowerGraph(m, X, sizes)
