"""Finite words and lazily generated infinite words."""
from __future__ import annotations

from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"

#: default memory cap for a stream buffer (letters)
DEFAULT_MAX_LETTERS = 200_000_000

WordLike = Union[str, bytes, Sequence[int], np.ndarray]


class BudgetExceeded(RuntimeError):
    """A configured size budget (letters, nodes, ...) would be exceeded."""


def as_word(u: WordLike, q: Optional[int] = None) -> np.ndarray:
    """Coerce ``u`` into a ``uint8`` letter array.

    Strings are read as base-36 digits, so ``"01a"`` is ``[0, 1, 10]``.
    """
    if isinstance(u, str):
        try:
            arr = np.array([DIGITS.index(ch) for ch in u.lower()], dtype=np.uint8)
        except ValueError:
            raise ValueError(f"not a word over base-36 digits: {u!r}") from None
    elif isinstance(u, (bytes, bytearray, memoryview)):
        arr = np.frombuffer(bytes(u), dtype=np.uint8)
        if arr.size and arr.max() > 35:
            raise ValueError("letters must lie in 0..35")
    else:
        arr = np.asarray(u)
        if arr.size and (arr.min() < 0 or arr.max() > 35):
            raise ValueError("letters must lie in 0..35")
        arr = arr.astype(np.uint8, copy=False).reshape(-1)
    if q is not None and arr.size and int(arr.max()) >= q:
        raise ValueError(f"letter {int(arr.max())} outside alphabet of size {q}")
    return arr


def format_word(u: WordLike, sep: str = "") -> str:
    arr = as_word(u)
    if sep:
        return sep.join(str(int(a)) for a in arr)
    return "".join(DIGITS[int(a)] for a in arr)


def check_alphabet(q: int) -> int:
    q = int(q)
    if not 2 <= q <= 36:
        raise ValueError(f"alphabet size must satisfy 2 <= q <= 36, got {q}")
    return q


class WordStream:
    """A deterministic infinite word with a memoised prefix buffer.

    ``factory`` returns a fresh iterator of letter chunks each time it is
    called; the stream pulls chunks until the buffer is long enough.  Streams
    never run dry: ``factory`` must produce an infinite iterator.

    ``saturation(N)`` (optional) returns a prefix length after which every
    factor of length ``<= N`` of the infinite word has appeared, so that
    prefix profiles are exact.  ``language_size(n)`` (optional) is a known
    upper bound on the number of length-``n`` factors; a measured count that
    reaches it is exact as well.
    """

    def __init__(
        self,
        q: int,
        factory: Callable[[], Iterator[Iterable[int]]],
        name: str = "word",
        *,
        saturation: Optional[Callable[[int], int]] = None,
        language_size: Optional[Callable[[int], int]] = None,
        max_letters: int = DEFAULT_MAX_LETTERS,
        meta: Optional[dict] = None,
    ):
        self.q = check_alphabet(q)
        self.name = name
        self._factory = factory
        self._chunks = factory()
        self._buf = bytearray()
        self.saturation = saturation
        self.language_size = language_size
        self.max_letters = max_letters
        self.meta = dict(meta or {})

    def clone(self) -> "WordStream":
        return WordStream(
            self.q,
            self._factory,
            self.name,
            saturation=self.saturation,
            language_size=self.language_size,
            max_letters=self.max_letters,
            meta=self.meta,
        )

    def _fill(self, n: int) -> None:
        if n > self.max_letters:
            raise BudgetExceeded(f"{self.name}: {n} letters exceeds cap {self.max_letters}")
        buf = self._buf
        while len(buf) < n:
            buf.extend(bytes(next(self._chunks)))

    def access(self, offset: int, n: int) -> np.ndarray:
        """Letters ``w[offset : offset + n]`` (the word ``T^offset w`` cut to ``n``)."""
        if offset < 0 or n < 0:
            raise ValueError("offset and length must be non-negative")
        self._fill(offset + n)
        return np.frombuffer(bytes(self._buf[offset : offset + n]), dtype=np.uint8)

    def prefix(self, n: int) -> np.ndarray:
        return self.access(0, n)

    def saturating_length(self, N: int) -> Optional[int]:
        if self.saturation is None:
            return None
        return self.saturation(N)

    def __repr__(self) -> str:
        return f"WordStream({self.name!r}, q={self.q})"


def stream_access(w: WordStream, offset: int, n: int) -> np.ndarray:
    return w.access(offset, n)


def periodic_stream(period: WordLike, q: int, name: str = "periodic") -> WordStream:
    block = bytes(as_word(period, q))
    if not block:
        raise ValueError("period must be non-empty")

    def factory():
        while True:
            yield block * 1024

    return WordStream(q, factory, name, meta={"period": format_word(block)})
