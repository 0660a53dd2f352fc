"""Compare the numba kernels with their numpy fallbacks.

    python benchmarks/bench_kernels.py [--reps 3] [--max-n 20]

The fallbacks are the code paths used when WORDENTROPY_DISABLE_NUMBA=1.
"""
import argparse
import time

import numpy as np

from wordentropy import _kernels as K
from wordentropy.bounds import parse_bound
from wordentropy.engine.slice import _caps
from wordentropy.generators import champernowne, sft_from_forbidden, transitive_word


def slice_levels(ext, f, N, q=2):
    caps = _caps(f, N, q)
    words = np.zeros((1, 0), dtype=np.uint8)
    lcs = np.zeros((1, 0), dtype=np.int16)
    counts = np.ones((1, 1), dtype=np.int16)
    total = 0
    for _ in range(N):
        _, _, words, lcs, counts = ext(words, lcs, counts, caps, q)
        total += words.shape[0]
    return total


def best_of(reps, fn, *args):
    best = float("inf")
    out = None
    for _ in range(reps):
        t = time.time()
        out = fn(*args)
        best = min(best, time.time() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--max-n", type=int, default=20)
    ap.add_argument("--letters", type=int, default=1 << 20)
    args = ap.parse_args()
    if K.numba is None:
        print("numba is not installed; only the numpy paths can run")
        return

    rows = []
    f = parse_bound("preset:cassaigne")
    slice_levels(K.extend_level_numba, f, 4)  # compile
    a, na = best_of(args.reps, slice_levels, K.extend_level_numba, f, args.max_n)
    b, nb = best_of(args.reps, slice_levels, K.extend_level_numpy, f, args.max_n)
    assert na == nb
    rows.append((f"slice extension, cassaigne N={args.max_n}", a, b))

    u = champernowne(2).prefix(args.letters)
    K.factor_counts_numba(u[:100], 2, 10)
    a, ca = best_of(args.reps, K.factor_counts_numba, u, 2, 24)
    b, cb = best_of(args.reps, K.factor_counts_numpy, u, 2, 24)
    assert np.array_equal(ca, cb)
    rows.append((f"factor counts n<=24, {args.letters} letters", a, b))

    g = transitive_word(sft_from_forbidden(2, ["11"])).prefix(args.letters)
    ids = g[:-15].astype(np.int64)
    for j in range(1, 16):
        ids = ids * 2 + g[j:len(g) - 15 + j]
    ids = np.unique(ids, return_inverse=True)[1].reshape(-1).astype(np.int64)
    n_ids = int(ids.max()) + 1
    K.sliding_distinct_numba(ids[:100], n_ids, 10)
    a, sa = best_of(args.reps, K.sliding_distinct_numba, ids, n_ids, 4096)
    b, sb = best_of(args.reps, K.sliding_distinct_numpy, ids, n_ids, 4096)
    assert np.array_equal(sa, sb)
    rows.append(("sliding distinct 16-windows, width 4096", a, b))

    print(f"{'kernel':<46} {'numba s':>9} {'numpy s':>9} {'speedup':>8}")
    for name, a, b in rows:
        print(f"{name:<46} {a:9.3f} {b:9.3f} {b / a:8.1f}x")


if __name__ == "__main__":
    main()
