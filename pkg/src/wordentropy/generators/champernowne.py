"""Champernowne words: base-q representations of 0, 1, 2, ... concatenated."""
from __future__ import annotations

import numpy as np

from ..words.stream import WordStream, check_alphabet

_BATCH = 1 << 15


def _digits(start: int, stop: int, d: int, q: int) -> np.ndarray:
    nums = np.arange(start, stop, dtype=np.int64)
    out = np.empty((nums.size, d), dtype=np.uint8)
    for j in range(d - 1, -1, -1):
        nums, out[:, j] = np.divmod(nums, q)
    return out.reshape(-1)


def champernowne_saturation(q: int, N: int) -> int:
    """Prefix length after which every length-``N`` word has appeared.

    Every word ``v`` of length ``N`` is the tail of the ``(N+1)``-digit number
    ``1v``, which is written before position ``(N+1) q^(N+1)``; the documented
    bound ``q^(N+2) (N+2)`` is looser and is what we report.
    """
    return q ** (N + 2) * (N + 2)


def champernowne(q: int = 2) -> WordStream:
    q = check_alphabet(q)

    def factory():
        yield bytes([0])
        d = 1
        while True:
            lo, hi = q ** (d - 1), q ** d
            for a in range(lo, hi, _BATCH):
                b = min(hi, a + _BATCH)
                yield _digits(a, b, d, q).tobytes()
            d += 1

    return WordStream(
        q,
        factory,
        f"champernowne({q})",
        saturation=lambda N: champernowne_saturation(q, N),
        language_size=lambda n: q ** n,
        meta={"word": "champernowne", "q": q},
    )
