import numpy as np
import pytest
from hypothesis import given, strategies as st

from wordentropy import _kernels as K
from wordentropy.bounds import parse_bound
from wordentropy.engine.slice import _caps

needs_numba = pytest.mark.skipif(K.numba is None, reason="numba not installed")


def _levels(f, N, q, ext):
    caps = _caps(f, N, q)
    words = np.zeros((1, 0), dtype=np.uint8)
    lcs = np.zeros((1, 0), dtype=np.int16)
    counts = np.ones((1, 1), dtype=np.int16)
    out = []
    for _ in range(N):
        res = ext(words, lcs, counts, caps, q)
        out.append(res)
        _, _, words, lcs, counts = res
    return out


@needs_numba
@pytest.mark.parametrize("spec,q,N", [("preset:golden", 2, 14), ("preset:cassaigne", 2, 14), ("n^2+1", 3, 8)])
def test_extend_level_paths_agree(spec, q, N):
    f = parse_bound(spec)
    a = _levels(f, N, q, K.extend_level_numba)
    b = _levels(f, N, q, K.extend_level_numpy)
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            assert np.array_equal(x, y)


@needs_numba
@given(st.lists(st.integers(0, 2), min_size=1, max_size=300), st.integers(0, 40))
def test_factor_count_paths_agree(u, n):
    arr = np.array(u, dtype=np.uint8)
    assert np.array_equal(K.factor_counts_numba(arr, 3, n), K.factor_counts_numpy(arr, 3, n))


@needs_numba
@given(st.lists(st.integers(0, 9), min_size=1, max_size=200), st.integers(1, 30))
def test_sliding_distinct_paths_agree(ids, width):
    a = np.array(ids, dtype=np.int64)
    expect = [len(set(ids[s:s + width])) for s in range(len(ids) - width + 1)]
    assert K.sliding_distinct_numba(a, 10, width).tolist() == expect
    assert K.sliding_distinct_numpy(a, 10, width).tolist() == expect


def test_dispatch_flag_is_boolean():
    assert isinstance(K.NUMBA_ENABLED, bool)
