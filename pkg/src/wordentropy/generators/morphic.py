"""Letter-to-word morphisms and the two-letter morphic word with E(w) small."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Tuple, Union

from ..bounds import expr as E
from ..bounds.effective import as_real
from ..bounds.reals import Real, UndecidableError, compare
from ..words.stream import WordLike, WordStream, as_word, check_alphabet, format_word
from .champernowne import champernowne


@dataclass(frozen=True)
class Morphism:
    """A non-erasing map from letters to non-empty words over ``0..q-1``."""

    images: Tuple[Tuple[int, bytes], ...]
    q: int

    @classmethod
    def from_map(cls, mapping: Mapping[int, WordLike], q: int = None) -> "Morphism":
        imgs = {}
        for a, v in mapping.items():
            arr = as_word(v)
            if arr.size == 0:
                raise ValueError(f"image of letter {a} is empty (morphisms are non-erasing)")
            imgs[int(a)] = bytes(arr)
        if q is None:
            q = max(2, max(max(v) for v in imgs.values()) + 1)
        for v in imgs.values():
            if max(v) >= q:
                raise ValueError("image letter outside the target alphabet")
        return cls(tuple(sorted(imgs.items())), check_alphabet(q))

    def as_dict(self) -> Dict[int, bytes]:
        return dict(self.images)

    def __call__(self, u: WordLike) -> bytes:
        table = self.as_dict()
        try:
            return b"".join(table[int(a)] for a in as_word(u))
        except KeyError as exc:
            raise ValueError(f"letter {exc.args[0]} has no image") from None

    def describe(self) -> Dict[str, str]:
        return {str(a): format_word(v) for a, v in self.images}


def apply_morphism(sigma: Morphism, w: WordStream) -> WordStream:
    """The lazy image ``sigma(w_0) sigma(w_1) ...``."""
    table = sigma.as_dict()
    missing = [a for a in range(w.q) if a not in table]
    if missing:
        raise ValueError(f"letters {missing} of the source alphabet have no image")
    src = w.clone()

    def factory():
        pos = 0
        step = 4096
        while True:
            chunk = src.access(pos, step)
            pos += step
            yield b"".join(table[a] for a in chunk.tolist())

    return WordStream(sigma.q, factory, f"sigma({w.name})",
                      meta={"word": "morphic", "images": sigma.describe(), "source": w.name})


def prop6_K(c: Union[str, float, Fraction, Real]) -> int:
    """Smallest ``K`` with ``log(n+1)/n < c`` for every ``n >= ceil(K/2)``.

    ``log(n+1)/n`` decreases, so the condition holds from the first ``m`` with
    ``m + 1 < e^{cm}`` on; the smallest ``K`` with ``ceil(K/2) >= m`` is ``2m-1``.
    """
    cr = as_real(c)
    if compare(cr, Fraction(0)) <= 0:
        raise ValueError("need c > 0")
    try:
        if compare(cr, E.r_log(Fraction(2))) > 0:
            raise ValueError("need c <= log 2")
    except UndecidableError:
        pass
    m = 1
    while True:
        try:
            strict = compare(Fraction(m + 1), E.r_exp(E.r_mul(cr, Fraction(m)))) < 0
        except UndecidableError:
            strict = False  # equality log(m+1)/m = c is not strict
        if strict:
            return 2 * m - 1
        m += 1


def prop6_word(c) -> Tuple[int, WordStream]:
    """``(K, sigma(C))`` with ``sigma(a) = 0^(K+1)``, ``sigma(b) = 0^K 1`` applied
    to the binary Champernowne word read over ``{a, b} = {0, 1}``."""
    K = prop6_K(c)
    sigma = Morphism.from_map({0: [0] * (K + 1), 1: [0] * K + [1]}, 2)
    w = apply_morphism(sigma, champernowne(2))
    w.name = f"prop6(K={K})"
    w.meta.update({"word": "prop6", "K": K})
    return K, w
