"""Hot inner loops.

Each kernel exists in two forms: a numba ``@njit`` loop and a vectorised
numpy equivalent.  The public dispatch functions at the bottom pick one
according to :data:`NUMBA_ENABLED`, which is on whenever numba imports and
the environment variable ``WORDENTROPY_DISABLE_NUMBA`` is unset (or ``0``).

Both forms are importable directly (``*_numba`` / ``*_numpy``) so tests and
the benchmark can compare them.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLED = os.environ.get("WORDENTROPY_DISABLE_NUMBA", "").strip() not in ("", "0")
NUMBA_ENABLED = numba is not None and not _DISABLED


def _njit(func):
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# Slice extension: append every letter to every surviving word and keep the
# children whose factor counts stay under the caps.
#
# words  (c, L)   uint8   surviving words of length L
# lcs    (c, L-1) int16   lcs[i, j] = longest common suffix of words[i, :j+1]
#                         and words[i] (j < L-1)
# counts (c, L+1) int16   counts[i, k] = distinct length-k factors of words[i]
# caps   (>= L+2) int64   caps[k] = floor(f(k)), clipped to something small
# ---------------------------------------------------------------------------


def _child_ell(words, lcs, i, a, L, out_row):
    ell = 0
    for j in range(L):
        if words[i, j] == a:
            v = lcs[i, j - 1] + 1 if j > 0 else 1
        else:
            v = 0
        out_row[j] = v
        if v > ell:
            ell = v
    return ell


def _extend_level_py(words, lcs, counts, caps, q):
    c = words.shape[0]
    L = words.shape[1]
    scratch = np.empty(max(L, 1), dtype=np.int16)
    keep = np.zeros(c * q, dtype=np.bool_)
    total = 0
    for i in range(c):
        for a in range(q):
            ell = _child_ell_nb(words, lcs, i, a, L, scratch)
            ok = True
            for k in range(ell + 1, L + 2):
                newc = counts[i, k] + 1 if k <= L else 1
                if newc > caps[k]:
                    ok = False
                    break
            if ok:
                keep[i * q + a] = True
                total += 1

    parent = np.empty(total, dtype=np.int64)
    letter = np.empty(total, dtype=np.uint8)
    new_words = np.empty((total, L + 1), dtype=np.uint8)
    new_lcs = np.empty((total, L), dtype=np.int16)
    new_counts = np.empty((total, L + 2), dtype=np.int16)
    m = 0
    for i in range(c):
        for a in range(q):
            if not keep[i * q + a]:
                continue
            ell = _child_ell_nb(words, lcs, i, a, L, scratch)
            for j in range(L):
                new_lcs[m, j] = scratch[j]
                new_words[m, j] = words[i, j]
            new_words[m, L] = a
            for k in range(L + 1):
                new_counts[m, k] = counts[i, k] + (1 if k > ell else 0)
            new_counts[m, L + 1] = 1
            parent[m] = i
            letter[m] = a
            m += 1
    return parent, letter, new_words, new_lcs, new_counts


_child_ell_nb = _njit(_child_ell)
extend_level_numba = _njit(_extend_level_py)


def extend_level_numpy(words, lcs, counts, caps, q):
    c, L = words.shape
    n = c * q
    parent = np.repeat(np.arange(c, dtype=np.int64), q)
    letter = np.tile(np.arange(q, dtype=np.uint8), c)
    if L:
        prev = np.zeros((c, L), dtype=np.int16)
        prev[:, 1:] = lcs
        eq = words[parent] == letter[:, None]
        new_lcs = np.where(eq, prev[parent] + 1, 0).astype(np.int16)
        ell = new_lcs.max(axis=1)
    else:
        new_lcs = np.zeros((n, 0), dtype=np.int16)
        ell = np.zeros(n, dtype=np.int16)
    new_counts = np.zeros((n, L + 2), dtype=np.int16)
    new_counts[:, : L + 1] = counts[parent]
    ks = np.arange(L + 2)
    new_counts += (ks[None, :] > ell[:, None]).astype(np.int16)
    ok = (new_counts <= caps[None, : L + 2]).all(axis=1)
    parent = parent[ok]
    letter = letter[ok]
    new_words = np.empty((parent.size, L + 1), dtype=np.uint8)
    new_words[:, :L] = words[parent]
    new_words[:, L] = letter
    return parent, letter, new_words, new_lcs[ok], new_counts[ok]


# ---------------------------------------------------------------------------
# Suffix automaton (resumable).  state = [size, last].
# ---------------------------------------------------------------------------


def _sam_extend_py(letters, q, nxt, link, length, state):
    size = state[0]
    last = state[1]
    for t in range(letters.shape[0]):
        ch = letters[t]
        cur = size
        size += 1
        length[cur] = length[last] + 1
        for a in range(q):
            nxt[cur, a] = -1
        p = last
        while p != -1 and nxt[p, ch] == -1:
            nxt[p, ch] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            r = nxt[p, ch]
            if length[p] + 1 == length[r]:
                link[cur] = r
            else:
                clone = size
                size += 1
                length[clone] = length[p] + 1
                for a in range(q):
                    nxt[clone, a] = nxt[r, a]
                link[clone] = link[r]
                while p != -1 and nxt[p, ch] == r:
                    nxt[p, ch] = clone
                    p = link[p]
                link[r] = clone
                link[cur] = clone
        last = cur
    state[0] = size
    state[1] = last


def _sam_length_counts_py(link, length, size, total_len):
    diff = np.zeros(total_len + 2, dtype=np.int64)
    for v in range(1, size):
        diff[length[link[v]] + 1] += 1
        diff[length[v] + 1] -= 1
    out = np.empty(total_len + 1, dtype=np.int64)
    out[0] = 1
    run = 0
    for n in range(1, total_len + 1):
        run += diff[n]
        out[n] = run
    return out


sam_extend_numba = _njit(_sam_extend_py)
sam_length_counts_numba = _njit(_sam_length_counts_py)


class SuffixAutomaton:
    """Online suffix automaton over letters ``0..q-1`` (numba backed)."""

    def __init__(self, q: int, capacity: int = 16):
        self.q = q
        cap = max(2 * capacity + 2, 4)
        self.nxt = np.full((cap, q), -1, dtype=np.int64)
        self.link = np.full(cap, -1, dtype=np.int64)
        self.length = np.zeros(cap, dtype=np.int64)
        self.state = np.array([1, 0], dtype=np.int64)
        self.n = 0

    def _reserve(self, extra: int) -> None:
        need = 2 * (self.n + extra) + 2
        cap = self.link.shape[0]
        if need <= cap:
            return
        new_cap = max(need, 2 * cap)
        nxt = np.full((new_cap, self.q), -1, dtype=np.int64)
        nxt[:cap] = self.nxt
        link = np.full(new_cap, -1, dtype=np.int64)
        link[:cap] = self.link
        length = np.zeros(new_cap, dtype=np.int64)
        length[:cap] = self.length
        self.nxt, self.link, self.length = nxt, link, length

    def extend(self, letters: np.ndarray) -> None:
        letters = np.ascontiguousarray(letters, dtype=np.int64)
        self._reserve(letters.shape[0])
        sam_extend_numba(letters, self.q, self.nxt, self.link, self.length, self.state)
        self.n += letters.shape[0]

    def length_counts(self) -> np.ndarray:
        return sam_length_counts_numba(self.link, self.length, int(self.state[0]), self.n)


# ---------------------------------------------------------------------------
# Distinct factors by rank refinement (numpy).
# ---------------------------------------------------------------------------


def refine_ids(ids: np.ndarray, letters: np.ndarray, n: int, q: int) -> np.ndarray:
    """Ids of length-(n+1) windows from ids of length-n windows."""
    key = ids[:-1].astype(np.int64) * q + letters[n:].astype(np.int64)
    _, inv = np.unique(key, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def factor_counts_numpy(letters: np.ndarray, q: int, n_max: int) -> np.ndarray:
    letters = np.asarray(letters, dtype=np.int64)
    L = letters.shape[0]
    n_max = min(n_max, L)
    out = np.zeros(n_max + 1, dtype=np.int64)
    out[0] = 1
    if n_max == 0:
        return out
    _, ids = np.unique(letters, return_inverse=True)
    ids = ids.reshape(-1).astype(np.int64)
    for n in range(1, n_max + 1):
        out[n] = int(ids.max()) + 1 if ids.size else 0
        if n < n_max:
            ids = refine_ids(ids, letters, n, q)
    return out


def factor_counts_numba(letters: np.ndarray, q: int, n_max: int) -> np.ndarray:
    sam = SuffixAutomaton(q, capacity=len(letters))
    sam.extend(np.asarray(letters))
    return sam.length_counts()[: min(n_max, len(letters)) + 1]


# ---------------------------------------------------------------------------
# Sliding-window distinct counts: for ids[i] (window codes), count distinct
# ids among ids[s : s+width] for every start s.
# ---------------------------------------------------------------------------


def _sliding_distinct_py(ids, n_ids, width):
    m = ids.shape[0]
    out = np.zeros(max(m - width + 1, 0), dtype=np.int64)
    occ = np.zeros(n_ids, dtype=np.int64)
    distinct = 0
    for i in range(m):
        a = ids[i]
        if occ[a] == 0:
            distinct += 1
        occ[a] += 1
        if i >= width:
            b = ids[i - width]
            occ[b] -= 1
            if occ[b] == 0:
                distinct -= 1
        if i >= width - 1:
            out[i - width + 1] = distinct
    return out


sliding_distinct_numba = _njit(_sliding_distinct_py)


def sliding_distinct_numpy(ids, n_ids, width):
    ids = np.asarray(ids, dtype=np.int64)
    m = ids.shape[0]
    n_out = m - width + 1
    if n_out <= 0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(ids, kind="stable")
    prev = np.full(m, -1, dtype=np.int64)
    same = ids[order[1:]] == ids[order[:-1]]
    prev[order[1:][same]] = order[:-1][same]
    # position i with prev p >= 0 is a repeat for starts s in [i-width+1, p]
    idx = np.arange(m)
    lo = np.maximum(idx - width + 1, 0)
    hi = np.minimum(prev, n_out - 1)
    valid = (prev >= 0) & (hi >= lo)
    diff = np.zeros(n_out + 1, dtype=np.int64)
    np.add.at(diff, lo[valid], 1)
    np.add.at(diff, hi[valid] + 1, -1)
    repeats = np.cumsum(diff)[:n_out]
    return width - repeats


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def extend_level(words, lcs, counts, caps, q):
    if NUMBA_ENABLED:
        return extend_level_numba(words, lcs, counts, caps, q)
    return extend_level_numpy(words, lcs, counts, caps, q)


def factor_counts(letters, q, n_max):
    if NUMBA_ENABLED:
        return factor_counts_numba(letters, q, n_max)
    return factor_counts_numpy(letters, q, n_max)


def sliding_distinct(ids, n_ids, width):
    if NUMBA_ENABLED:
        return sliding_distinct_numba(np.asarray(ids, dtype=np.int64), n_ids, width)
    return sliding_distinct_numpy(ids, n_ids, width)
