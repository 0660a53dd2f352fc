"""Subshifts of finite type: follower graphs, exact complexity, transitive words.

Vertices are the allowed words of length ``m`` encoded as base-``q``
integers (so numeric order is lexicographic order); an edge ``u -> v``
labelled ``a`` exists when the ``(m+1)``-word ``u a`` is allowed and ``v`` is
its length-``m`` suffix.  After pruning vertices without predecessors or
successors, the language of the system is the set of labels of finite paths,
that is, the factors of its bi-infinite points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..words.stream import WordLike, WordStream, as_word, check_alphabet, format_word


class EmptyLanguage(ValueError):
    pass


def _code(word: Sequence[int], q: int) -> int:
    c = 0
    for a in word:
        c = c * q + int(a)
    return c


def _decode(c: int, length: int, q: int) -> Tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        c, out[i] = divmod(c, q)
    return tuple(out)


@dataclass
class SftSystem:
    q: int
    m: int
    #: allowed (m+1)-words as codes, after pruning
    allowed: Tuple[int, ...]
    vertices: Tuple[int, ...]
    forbidden: Tuple[str, ...] = ()
    #: strongly connected component label per vertex (index-aligned)
    scc: Tuple[int, ...] = ()
    succ: Dict[int, Tuple[Tuple[int, int], ...]] = field(default_factory=dict, repr=False)

    # -- construction --------------------------------------------------------

    @classmethod
    def from_allowed(cls, q: int, m: int, allowed: Iterable[int], forbidden: Sequence[str] = ()) -> "SftSystem":
        q = check_alphabet(q)
        if m < 1:
            raise ValueError("memory must be >= 1")
        top = q ** m
        edges = set(int(w) for w in allowed)
        verts = {w // q for w in edges} | {w % top for w in edges}
        while True:
            outs = {w // q for w in edges}
            ins = {w % top for w in edges}
            keep = outs & ins
            new_edges = {w for w in edges if w // q in keep and w % top in keep}
            if new_edges == edges and keep == verts:
                break
            edges, verts = new_edges, keep
        if not verts:
            raise EmptyLanguage("no bi-infinite path survives: the language is empty")
        vs = tuple(sorted(verts))
        succ: Dict[int, List[Tuple[int, int]]] = {v: [] for v in vs}
        for w in sorted(edges):
            succ[w // q].append((w % q, w % top))
        X = cls(q, m, tuple(sorted(edges)), vs, tuple(forbidden), (), {v: tuple(s) for v, s in succ.items()})
        X.scc = X._components()
        return X

    def _components(self) -> Tuple[int, ...]:
        idx = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        rows, cols = [], []
        for v, s in self.succ.items():
            for _, t in s:
                rows.append(idx[v])
                cols.append(idx[t])
        A = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        _, labels = connected_components(A, directed=True, connection="strong")
        # relabel by first vertex so labels are deterministic
        order: Dict[int, int] = {}
        return tuple(order.setdefault(int(l), len(order)) for l in labels)

    # -- structure -----------------------------------------------------------

    @property
    def strongly_connected(self) -> bool:
        return len(set(self.scc)) == 1

    def matrix(self) -> np.ndarray:
        idx = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        M = np.zeros((n, n), dtype=np.int64)
        for v, s in self.succ.items():
            for _, t in s:
                M[idx[v], idx[t]] += 1
        return M

    def vertex_words(self) -> List[str]:
        return [format_word(_decode(v, self.m, self.q)) for v in self.vertices]

    def allowed_words(self) -> List[str]:
        return [format_word(_decode(w, self.m + 1, self.q)) for w in self.allowed]

    def components(self) -> List[Tuple[int, ...]]:
        """Vertex codes grouped by strongly connected component, largest first."""
        groups: Dict[int, List[int]] = {}
        for v, c in zip(self.vertices, self.scc):
            groups.setdefault(c, []).append(v)
        return sorted((tuple(g) for g in groups.values()), key=lambda g: (-len(g), g))

    def restrict(self, keep: Iterable[int]) -> "SftSystem":
        keep = set(keep)
        top = self.q ** self.m
        edges = [w for w in self.allowed if w // self.q in keep and w % top in keep]
        return SftSystem.from_allowed(self.q, self.m, edges)

    def contains(self, u: WordLike) -> bool:
        """Whether ``u`` is a word of the language."""
        arr = as_word(u, self.q)
        n, m, q = len(arr), self.m, self.q
        if n <= m:
            return any(_decode(v, m, q)[:n] == tuple(int(a) for a in arr) for v in self.vertices)
        allowed = set(self.allowed)
        codes = [_code(arr[i : i + m + 1], q) for i in range(n - m)]
        return all(c in allowed for c in codes)

    def describe(self) -> dict:
        return {
            "q": self.q,
            "memory": self.m,
            "vertices": self.vertex_words(),
            "allowed": self.allowed_words(),
            "forbidden": list(self.forbidden),
            "strongly_connected": self.strongly_connected,
        }

    # -- counting ------------------------------------------------------------

    def complexity_series(self, N: int) -> List[int]:
        """Exact ``[p_X(0), ..., p_X(N)]`` with Python integers."""
        q, m = self.q, self.m
        out = [1]
        for n in range(1, min(N, m - 1) + 1):
            out.append(len({v // q ** (m - n) for v in self.vertices}))
        if N < m:
            return out[: N + 1]
        idx = {v: i for i, v in enumerate(self.vertices)}
        preds: List[List[int]] = [[] for _ in self.vertices]
        for v, s in self.succ.items():
            for _, t in s:
                preds[idx[t]].append(idx[v])
        c = [1] * len(self.vertices)
        out.append(len(c))
        for _ in range(m + 1, N + 1):
            c = [sum(c[j] for j in p) for p in preds]
            out.append(sum(c))
        return out


def sft_from_forbidden(q: int, forbidden: Iterable[WordLike]) -> SftSystem:
    q = check_alphabet(q)
    words = [tuple(int(a) for a in as_word(f, q)) for f in forbidden]
    if not words or any(len(w) == 0 for w in words):
        raise ValueError("need a non-empty set of non-empty forbidden words")
    m = max(1, max(len(w) for w in words) - 1)
    bad = set(words)
    allowed = []
    for w in itertools.product(range(q), repeat=m + 1):
        if not any(w[i : i + len(b)] == b for b in bad for i in range(m + 2 - len(b))):
            allowed.append(_code(w, q))
    return SftSystem.from_allowed(q, m, allowed, tuple(sorted(format_word(w) for w in words)))


def full_shift(q: int, m: int = 1) -> SftSystem:
    return SftSystem.from_allowed(q, m, range(q ** (m + 1)))


def sft_complexity(X: SftSystem, n: int) -> int:
    if n < 0:
        raise ValueError("n must be >= 0")
    return X.complexity_series(n)[n]


def sft_entropy(X: SftSystem, tol: float = 1e-9):
    """Certified enclosure of ``log rho(M)`` as ``(lo, hi, SpectralEnclosure)``."""
    from ..engine.spectral import ReducibleMatrix, spectral_radius

    if not X.strongly_connected:
        raise ReducibleMatrix("follower graph is not strongly connected")
    enc = spectral_radius(X.matrix(), tol)
    lo, hi = enc.log_bounds()
    return lo, hi, enc


# -- transitive words ---------------------------------------------------------


class _Connector:
    """Shortest, then lexicographically least, joins between m-word states."""

    def __init__(self, X: SftSystem):
        self.X = X
        self.top = X.q ** X.m
        self.preds: Dict[int, List[int]] = {v: [] for v in X.vertices}
        for v, s in X.succ.items():
            for _, t in s:
                self.preds[t].append(v)
        self._layers: Dict[int, List[Set[int]]] = {}
        self._cache: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        self.limit = X.m + len(X.vertices) ** 2 + 1

    def _layer(self, t: int, j: int) -> Set[int]:
        layers = self._layers.setdefault(t, [{t}])
        while len(layers) <= j:
            prev = layers[-1]
            layers.append({u for v in prev for u in self.preds[v]})
        return layers[j]

    def join(self, s: int, t: int) -> Tuple[int, ...]:
        key = (s, t)
        got = self._cache.get(key)
        if got is not None:
            return got
        m = self.X.m
        L = m
        while s not in self._layer(t, L):
            L += 1
            if L > self.limit:
                raise ValueError("no connecting path: graph is not strongly connected")
        cur, letters = s, []
        for step in range(L):
            need = self._layer(t, L - step - 1)
            for a, nxt in self.X.succ[cur]:
                if nxt in need:
                    letters.append(a)
                    cur = nxt
                    break
        out = tuple(letters[: L - m])
        self._cache[key] = out
        return out


def language_words(X: SftSystem, k: int) -> Iterator[Tuple[int, ...]]:
    """Words of length ``k >= m`` of the language in lexicographic order."""
    m, q = X.m, X.q
    if k < m:
        raise ValueError("k must be >= the memory")

    # vertices and successor lists are sorted, so DFS order is lexicographic
    def rec(state, word):
        if len(word) == k:
            yield word
            return
        for a, nxt in X.succ[state]:
            yield from rec(nxt, word + (a,))

    for v in X.vertices:
        yield from rec(v, _decode(v, m, q))


def _blocks(X: SftSystem) -> Iterator[Tuple[int, bytes]]:
    """``(k, piece)`` pairs: connector plus word, block by block."""
    conn = _Connector(X)
    m, q = X.m, X.q
    state: Optional[int] = None
    k = max(1, m)
    while True:
        for word in language_words(X, k):
            head = _code(word[:m], q)
            piece = word if state is None else conn.join(state, head) + word
            state = _code(word[-m:], q)
            yield k, bytes(piece)
        k += 1


def transitive_word(X: SftSystem) -> WordStream:
    """All words of length ``max(1, m)``, ``max(1, m)+1``, ... of the language in
    lexicographic order, joined by the shortest (then lexicographically
    least) connecting paths.  Every factor is a language word, and once the
    block of length-``N`` words is written every language word of length
    ``<= N`` has appeared."""
    if not X.strongly_connected:
        raise ValueError("transitive_word needs a strongly connected system")
    k0 = max(1, X.m)
    ends: Dict[int, int] = {}

    def factory():
        for _, piece in _blocks(X):
            yield piece

    def saturation(N: int) -> int:
        target = max(N, k0)
        if target not in ends:
            pos = 0
            for k, piece in _blocks(X):
                if k > target:
                    break
                pos += len(piece)
                ends[k] = pos
        return ends[target]

    series_cache: Dict[str, List[int]] = {"s": [1]}

    def language_size(n: int) -> int:
        s = series_cache["s"]
        if len(s) <= n:
            s = X.complexity_series(max(n, 2 * len(s)))
            series_cache["s"] = s
        return s[n]

    return WordStream(
        X.q,
        factory,
        f"transitive({','.join(X.forbidden) or 'sft'})",
        saturation=saturation,
        language_size=language_size,
        meta={"word": "sft", "system": X.describe()},
    )
