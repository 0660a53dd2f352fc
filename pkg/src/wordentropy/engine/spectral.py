"""Certified Perron roots of nonnegative integer matrices.

For an irreducible nonnegative ``M`` and any positive vector ``v``,
``min_i (Mv)_i / v_i <= rho(M) <= max_i (Mv)_i / v_i`` (Collatz-Wielandt).
Power iteration on ``M + I`` (primitive whenever ``M`` is irreducible)
supplies a good ``v``; the ratios are then evaluated in exact integer
arithmetic, so the enclosure does not depend on floating-point rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..bounds.reals import log_bounds


class ReducibleMatrix(ValueError):
    pass


@dataclass(frozen=True)
class SpectralEnclosure:
    lo: Fraction
    hi: Fraction
    #: positive integer vector certifying the bounds
    vector: Tuple[int, ...]

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def log_bounds(self) -> Tuple[float, float]:
        """Outward-rounded floats enclosing ``log(rho)``."""
        return log_bounds(self.lo)[0], log_bounds(self.hi)[1]

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi


def as_int_matrix(M) -> List[List[int]]:
    rows = [[int(x) for x in row] for row in np.asarray(M, dtype=object).tolist()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("need a non-empty square matrix")
    if any(x < 0 for r in rows for x in r):
        raise ValueError("matrix must be nonnegative")
    return rows


def is_irreducible(rows: Sequence[Sequence[int]]) -> bool:
    n = len(rows)
    if n == 1:
        return rows[0][0] > 0
    A = csr_matrix(np.array([[1 if x else 0 for x in r] for r in rows], dtype=np.int8))
    k, _ = connected_components(A, directed=True, connection="strong")
    return k == 1


def collatz_wielandt(rows: Sequence[Sequence[int]], v: Sequence[int]) -> Tuple[Fraction, Fraction]:
    """Exact ``(min, max)`` of ``(Mv)_i / v_i`` for a positive integer ``v``."""
    lo = hi = None
    for r, vi in zip(rows, v):
        s = sum(a * b for a, b in zip(r, v) if a)
        x = Fraction(s, vi)
        lo = x if lo is None or x < lo else lo
        hi = x if hi is None or x > hi else hi
    return lo, hi


def _float_vector(rows, iters: int = 2000) -> np.ndarray:
    A = np.array(rows, dtype=float)
    A = A + np.eye(len(rows))
    v = np.ones(len(rows))
    for _ in range(iters):
        w = A @ v
        w /= w.max()
        if np.allclose(w, v, rtol=0, atol=1e-15):
            v = w
            break
        v = w
    return v


def _int_vector(v: np.ndarray, bits: int) -> List[int]:
    scale = 1 << bits
    return [max(1, int(round(x * scale))) for x in v]


def _refine(rows, v: List[int], steps: int, bits: int) -> List[int]:
    """Exact integer power iteration on ``M + I``, renormalised to ``bits``."""
    n = len(rows)
    for _ in range(steps):
        w = [sum(a * b for a, b in zip(rows[i], v) if a) + v[i] for i in range(n)]
        shift = max(x.bit_length() for x in w) - bits
        if shift > 0:
            w = [max(1, x >> shift) for x in w]
        v = w
    return v


def spectral_radius(M, tol: float = 1e-9) -> SpectralEnclosure:
    rows = as_int_matrix(M)
    if not is_irreducible(rows):
        raise ReducibleMatrix("matrix is reducible; the Perron root enclosure needs irreducibility")
    tol_f = Fraction(tol)
    v = _int_vector(_float_vector(rows), 52)
    lo, hi = collatz_wielandt(rows, v)
    bits = 64
    while hi - lo > tol_f:
        if bits > 1 << 14:
            raise ArithmeticError("power iteration did not reach the requested width")
        v = _refine(rows, [x << 12 for x in v], 64 + bits // 4, bits)
        lo, hi = collatz_wielandt(rows, v)
        bits *= 2
    return SpectralEnclosure(lo, hi, tuple(v))
