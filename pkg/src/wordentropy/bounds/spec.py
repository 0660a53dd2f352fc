"""Complexity bounds ``f``: expressions, tables, recurrences, minima, presets.

Every bound can be evaluated exactly (or by a certified enclosure) at any
``n``.  Some bounds also carry

* an *envelope* ``f(n) >= K * B**(n/k)`` proved for every ``n >= 0`` with
  rational ``K, B`` (the tail certificates of the entropy engine need a true
  for-all-n statement, not a sampled one), and
* an analytic value or enclosure of ``E0(f) = liminf (1/n) log f(n)``.

Both come from arguments that hold for all ``n``: the syntactic shape of a
closed form (sums, products, maxima of exponentials) or the dominant-root
induction for nonnegative linear recurrences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mpmath import iv

from . import expr as E
from .reals import (
    Enclosure,
    LazyReal,
    Real,
    START_PREC,
    UndecidableError,
    bounds_of,
    compare,
    exact_floor,
    exact_rational_power,
    float_lower,
    float_upper,
    fmt_fraction,
    ivprec,
    iv_bounds,
    to_interval,
)
from .roots import dominant_root, recurrence_polynomial


@dataclass(frozen=True)
class Envelope:
    """``f(n) >= K * B**(n/k)`` for every integer ``n >= 0``."""

    K: Fraction
    B: Fraction
    k: int
    method: str

    def rate_bounds(self) -> Tuple[float, float]:
        """Floats enclosing ``log(B)/k``."""
        with ivprec(128):
            v = iv.log(iv.mpf(self.B.numerator) / self.B.denominator) / self.k
        lo, hi = iv_bounds(v)
        return math.nextafter(float(lo), -math.inf), math.nextafter(float(hi), math.inf)

    def as_dict(self) -> dict:
        return {"K": fmt_fraction(self.K), "B": fmt_fraction(self.B), "k": self.k, "method": self.method}


@dataclass(frozen=True)
class AnalyticE0:
    """``lo <= E0(f) <= hi`` with ``lo, hi`` exact-or-enclosed reals."""

    lo: Real
    hi: Real
    text: str
    method: str

    def floats(self) -> Tuple[float, float]:
        return float_lower(self.lo), float_upper(self.hi)


# -- helpers on rationals -----------------------------------------------------


def rational_below(x: Real) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return x.bounds(128)[0]


def rational_above(x: Real) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return x.bounds(128)[1]


def lambda_cmp(B1: Fraction, k1: int, B2: Fraction, k2: int) -> int:
    """Sign of ``B1^(1/k1) - B2^(1/k2)`` for positive rationals (exact)."""
    a, b = B1 ** k2, B2 ** k1
    return (a > b) - (a < b)


def envelope_min(envs: Sequence[Envelope], method: str) -> Envelope:
    """An envelope valid for the pointwise minimum of several functions."""
    K = min(e.K for e in envs)
    best = envs[0]
    for e in envs[1:]:
        if lambda_cmp(e.B, e.k, best.B, best.k) < 0:
            best = e
    return Envelope(K, best.B, best.k, method)


def power_upper(B: Fraction, n: int, k: int) -> Fraction:
    """A rational ``>= B**(n/k)``."""
    return rational_above(exact_rational_power(B, Fraction(n, k)))


def cover_prefix(env: Envelope, values: Dict[int, Fraction], method: str) -> Envelope:
    """Lower ``K`` so the envelope also holds at the listed exact points."""
    K = env.K
    for n, v in values.items():
        if v <= 0:
            raise ValueError(f"bound must be positive, f({n}) = {v}")
        K = min(K, v / power_upper(env.B, n, env.k))
    return Envelope(K, env.B, env.k, method)


# -- syntactic growth analysis ------------------------------------------------


@dataclass
class _Growth:
    env: Optional[Tuple[Fraction, Fraction, int]]  # (K, B, k)
    rate: Optional[Real]  # exact growth rate when the shape pins it down
    nonneg: bool


_UNKNOWN = _Growth(None, None, False)


def _affine(node: E.Node) -> Optional[Tuple[Real, Real]]:
    """``(slope, intercept)`` if ``node`` is affine in ``n``."""
    if not E.depends_on_n(node):
        return Fraction(0), E.evaluate(node)
    if isinstance(node, E.Var):
        return Fraction(1), Fraction(0)
    if isinstance(node, E.Neg):
        a = _affine(node.arg)
        return None if a is None else (E.r_neg(a[0]), E.r_neg(a[1]))
    if isinstance(node, E.Bin):
        if node.op in "+-":
            a, b = _affine(node.left), _affine(node.right)
            if a is None or b is None:
                return None
            f = E.r_add if node.op == "+" else E.r_sub
            return f(a[0], b[0]), f(a[1], b[1])
        if node.op == "*":
            for x, y in ((node.left, node.right), (node.right, node.left)):
                if not E.depends_on_n(x):
                    c = E.evaluate(x)
                    a = _affine(y)
                    if a is None:
                        return None
                    return E.r_mul(c, a[0]), E.r_mul(c, a[1])
            return None
        if node.op == "/" and not E.depends_on_n(node.right):
            c = E.evaluate(node.right)
            a = _affine(node.left)
            if a is None:
                return None
            return E.r_div(a[0], c), E.r_div(a[1], c)
    return None


def _sign(x: Real) -> Optional[int]:
    try:
        return compare(x, Fraction(0))
    except UndecidableError:
        return None


def _exp_env(slope: Real, intercept: Real) -> Tuple[Fraction, Fraction, int]:
    """Envelope for ``exp(slope * n + intercept)`` with ``slope >= 0``."""
    return rational_below(E.r_exp(intercept)), rational_below(E.r_exp(slope)), 1


def _pow_env(b: Real, slope: Real, intercept: Real) -> Optional[Tuple[Fraction, Fraction, int]]:
    if isinstance(b, Fraction) and isinstance(slope, Fraction):
        K = rational_below(E.r_pow(b, intercept))
        s, t = slope.numerator, slope.denominator
        return K, b ** s, t
    rate = E.r_mul(slope, E.r_log(b))
    return rational_below(E.r_pow(b, intercept)), rational_below(E.r_exp(rate)), 1


def _mul_env(a, b):
    (K1, B1, k1), (K2, B2, k2) = a, b
    return K1 * K2, B1 ** k2 * B2 ** k1, k1 * k2


def _better(a, b) -> bool:
    """True if envelope ``a`` grows faster than ``b``."""
    if b is None:
        return True
    if a is None:
        return False
    c = lambda_cmp(a[1], a[2], b[1], b[2])
    return c > 0 or (c == 0 and a[0] > b[0])


def _max_real(vals: Sequence[Real]) -> Optional[Real]:
    try:
        return _decided_extreme(vals, True)
    except UndecidableError:
        return None


def _decided_extreme(vals: Sequence[Real], pick_max: bool) -> Optional[Real]:
    best = vals[0]
    for v in vals[1:]:
        c = compare(v, best)
        if (c > 0) == pick_max and c != 0:
            best = v
    return best


def growth(node: E.Node) -> _Growth:
    if isinstance(node, E.Var):
        return _Growth(None, Fraction(0), True)
    if isinstance(node, E.Num):
        v = node.value
        if v > 0:
            return _Growth((v, Fraction(1), 1), Fraction(0), True)
        return _Growth(None, Fraction(0), v == 0)
    if not E.depends_on_n(node):
        v = E.evaluate(node)
        s = _sign(v)
        if s is None or s < 0:
            return _UNKNOWN
        if s == 0:
            return _Growth(None, Fraction(0), True)
        return _Growth((rational_below(v), Fraction(1), 1), Fraction(0), True)
    if isinstance(node, E.Neg):
        return _UNKNOWN
    if isinstance(node, E.Bin):
        op = node.op
        if op == "^":
            return _pow_growth(node)
        if op == "/":
            if E.depends_on_n(node.right):
                return _UNKNOWN
            c = E.evaluate(node.right)
            if _sign(c) != 1:
                return _UNKNOWN
            g = growth(node.left)
            env = None
            if g.env is not None:
                env = (g.env[0] / rational_above(c), g.env[1], g.env[2])
            return _Growth(env, g.rate, g.nonneg)
        a, b = growth(node.left), growth(node.right)
        if op == "+":
            env = None
            if b.nonneg and _better(a.env, env):
                env = a.env
            if a.nonneg and _better(b.env, env):
                env = b.env
            rate = None
            if a.nonneg and b.nonneg and a.rate is not None and b.rate is not None:
                rate = _max_real([a.rate, b.rate])
            return _Growth(env, rate, a.nonneg and b.nonneg)
        if op == "*":
            env = _mul_env(a.env, b.env) if a.env and b.env else None
            rate = None
            if a.nonneg and b.nonneg and a.rate is not None and b.rate is not None:
                rate = E.r_add(a.rate, b.rate)
            return _Growth(env, rate, a.nonneg and b.nonneg)
        return _UNKNOWN
    # calls
    name = node.name
    gs = [growth(a) for a in node.args]
    if name == "ceil":
        g = gs[0]
        return _Growth(g.env, g.rate, g.nonneg)
    if name == "floor":
        g = gs[0]
        rate = g.rate if g.rate is not None and _sign(g.rate) == 1 else None
        return _Growth(None, rate, g.nonneg)
    if name == "exp":
        aff = _affine(node.args[0])
        if aff is None or _sign(aff[0]) not in (0, 1):
            return _Growth(None, None, True)
        return _Growth(_exp_env(*aff), aff[0], True)
    if name == "log":
        return _Growth(None, Fraction(0) if gs[0].rate is not None else None, False)
    if name == "max":
        env = None
        for g in gs:
            if _better(g.env, env):
                env = g.env
        rate = None
        if all(g.rate is not None for g in gs):
            rate = _max_real([g.rate for g in gs])
        return _Growth(env, rate, any(g.nonneg for g in gs))
    if name == "min":
        env = None
        if all(g.env is not None for g in gs):
            env = gs[0].env
            for g in gs[1:]:
                K = min(env[0], g.env[0])
                pick = g.env if lambda_cmp(g.env[1], g.env[2], env[1], env[2]) < 0 else env
                env = (K, pick[1], pick[2])
        rate = None
        if all(g.rate is not None and g.nonneg for g in gs):
            try:
                rate = _decided_extreme([g.rate for g in gs], False)
            except UndecidableError:
                rate = None
        return _Growth(env, rate, all(g.nonneg for g in gs))
    return _UNKNOWN


def _pow_growth(node: E.Bin) -> _Growth:
    base, ex = node.left, node.right
    if not E.depends_on_n(base):
        b = E.evaluate(base)
        aff = _affine(ex)
        if aff is None or _sign(b) != 1:
            return _UNKNOWN
        slope, intercept = aff
        if compare(b, Fraction(1)) < 0 or _sign(slope) == -1:
            return _Growth(None, None, True)
        env = _pow_env(b, slope, intercept)
        return _Growth(env, E.r_mul(slope, E.r_log(b)) if b != 1 else Fraction(0), True)
    if not E.depends_on_n(ex):
        e = E.evaluate(ex)
        if isinstance(e, Fraction) and e.denominator == 1 and e >= 1:
            g = growth(base)
            k = int(e)
            env = None
            if g.env is not None:
                K, B, kk = g.env
                env = (K ** k, B ** k, kk)
            rate = E.r_mul(g.rate, e) if g.rate is not None and g.nonneg else None
            return _Growth(env, rate, g.nonneg)
    return _UNKNOWN


# -- bound specifications -----------------------------------------------------


class BoundSpec:
    """A candidate complexity bound ``f: N -> (0, inf)``."""

    #: declared non-decreasing for every n (``None``: unknown)
    monotone: Optional[bool] = None
    name: Optional[str] = None

    def __init__(self):
        self._floor: Dict[int, int] = {}
        self._env_done = False
        self._env: Optional[Envelope] = None

    # subclasses implement value(), text, _envelope(), analytic_e0()
    def value(self, n: int) -> Real:
        raise NotImplementedError

    @property
    def text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.text!r})"

    def eval(self, n: int) -> Union[Fraction, Enclosure]:
        v = self.checked_value(n)
        if isinstance(v, Fraction):
            return v
        lo, hi = v.bounds(START_PREC)
        return Enclosure(lo, hi)

    def checked_value(self, n: int) -> Real:
        if n < 0:
            raise ValueError("n must be non-negative")
        v = self.value(n)
        if compare(v, Fraction(0)) <= 0:
            raise ValueError(f"bound must be positive, f({n}) = {v if isinstance(v, Fraction) else float(v)}")
        return v

    def floor(self, n: int) -> int:
        got = self._floor.get(n)
        if got is None:
            got = exact_floor(self.checked_value(n))
            self._floor[n] = got
        return got

    def floors(self, N: int) -> List[int]:
        return [self.floor(n) for n in range(N + 1)]

    @property
    def q(self) -> int:
        return self.floor(1)

    def envelope(self) -> Optional[Envelope]:
        if not self._env_done:
            self._env = self._envelope()
            self._env_done = True
        return self._env

    def _envelope(self) -> Optional[Envelope]:
        return None

    def analytic_e0(self) -> Optional[AnalyticE0]:
        return None


class ExprBound(BoundSpec):
    def __init__(self, node: E.Node, *, name: Optional[str] = None, monotone: Optional[bool] = None,
                 e0: Optional[AnalyticE0] = None, source: Optional[str] = None):
        super().__init__()
        self.node = node
        self.name = name
        self.monotone = monotone
        self._e0 = e0
        self._source = source
        self._growth: Optional[_Growth] = None

    @property
    def text(self) -> str:
        return self._source or E.to_text(self.node)

    def value(self, n: int) -> Real:
        return E.evaluate(self.node, n)

    def _g(self) -> _Growth:
        if self._growth is None:
            try:
                self._growth = growth(self.node)
            except (UndecidableError, ValueError, ZeroDivisionError):
                self._growth = _UNKNOWN
        return self._growth

    def _envelope(self) -> Optional[Envelope]:
        g = self._g()
        if g.env is None:
            return None
        K, B, k = g.env
        if K <= 0 or B <= 0:
            return None
        return Envelope(K, B, k, "closed form")

    def analytic_e0(self) -> Optional[AnalyticE0]:
        if self._e0 is not None:
            return self._e0
        rate = self._g().rate
        if rate is None:
            return None
        return AnalyticE0(rate, rate, "syntactic growth rate", "closed form")


class TableBound(BoundSpec):
    """Explicit values ``f(0..L-1)``, then an optional tail bound for ``n >= L``."""

    def __init__(self, values: Sequence, tail: Optional[BoundSpec] = None, *,
                 monotone: Optional[bool] = None, name: Optional[str] = None,
                 e0: Optional[AnalyticE0] = None, source: Optional[str] = None):
        super().__init__()
        self.values = tuple(Fraction(v) for v in values)
        if not self.values:
            raise ValueError("table needs at least one value")
        self.tail = tail
        self.monotone = monotone
        self.name = name
        self._e0 = e0
        self._source = source

    @property
    def text(self) -> str:
        if self._source:
            return self._source
        s = "table:" + ",".join(fmt_fraction(v) for v in self.values)
        if self.tail is not None:
            s += ";tail=" + self.tail.text
        if self.monotone:
            s += ";monotone"
        elif self.tail is not None and self.tail.monotone:
            s += ";tail-monotone"
        return s

    @property
    def horizon(self) -> Optional[int]:
        """Last index with a value, ``None`` when a tail covers every n."""
        return None if self.tail is not None else len(self.values) - 1

    def value(self, n: int) -> Real:
        if n < len(self.values):
            return self.values[n]
        if self.tail is None:
            raise IndexError(f"table has no value at n={n} and no tail")
        return self.tail.value(n)

    def _envelope(self) -> Optional[Envelope]:
        if self.tail is None:
            return None
        env = self.tail.envelope()
        if env is None:
            return None
        return cover_prefix(env, dict(enumerate(self.values)), "table over tail envelope")

    def analytic_e0(self) -> Optional[AnalyticE0]:
        if self._e0 is not None:
            return self._e0
        if self.tail is None:
            return None
        return self.tail.analytic_e0()


class RecurrenceBound(BoundSpec):
    """``f(n) = sum_i c_i f(n-i)`` for ``n >= d`` with given ``f(0..d-1)``."""

    def __init__(self, initial: Sequence[int], coeffs: Sequence[int], *,
                 name: Optional[str] = None, source: Optional[str] = None):
        super().__init__()
        if len(initial) != len(coeffs) or not coeffs:
            raise ValueError("need as many initial values as coefficients")
        if any(int(c) != c or c < 0 for c in coeffs):
            raise ValueError("recurrence coefficients must be nonnegative integers")
        self.initial = tuple(Fraction(v) for v in initial)
        self.coeffs = tuple(int(c) for c in coeffs)
        self.name = name
        self._source = source
        self._vals: List[Fraction] = list(self.initial)
        self._root = None
        nondec = all(self.initial[i] <= self.initial[i + 1] for i in range(len(self.initial) - 1))
        # sum c_i >= 1 with nondecreasing positive start keeps the sequence nondecreasing
        self.monotone = bool(nondec and sum(self.coeffs) >= 1 and self.coeffs[0] >= 1 and min(self.initial) > 0)

    @property
    def text(self) -> str:
        if self._source:
            return self._source
        return "rec:" + ",".join(fmt_fraction(v) for v in self.initial) + ";" + ",".join(map(str, self.coeffs))

    def value(self, n: int) -> Real:
        vals = self._vals
        d = len(self.coeffs)
        while len(vals) <= n:
            m = len(vals)
            vals.append(sum((c * vals[m - i - 1] for i, c in enumerate(self.coeffs) if c), Fraction(0)))
        return vals[n]

    def root(self):
        if self._root is None:
            self._root = dominant_root(self.coeffs)
        return self._root

    def polynomial(self) -> Tuple[int, ...]:
        return recurrence_polynomial(self.coeffs)

    def _envelope(self) -> Optional[Envelope]:
        if min(self.initial) <= 0:
            return None
        lo = self.root().lo
        if lo <= 0:
            return None
        # characteristic inequality: lo^d <= sum c_i lo^(d-i)
        d = len(self.coeffs)
        assert lo ** d <= sum(c * lo ** (d - i - 1) for i, c in enumerate(self.coeffs))
        K = min([Fraction(1)] + [v / lo ** k for k, v in enumerate(self.initial)])
        return Envelope(K, lo, 1, "dominant-root induction")

    def upper_constant(self) -> Tuple[Fraction, Fraction]:
        """``(C, hi)`` with ``f(n) <= C * hi**n`` for all n."""
        hi = self.root().hi
        C = max(v / hi ** k for k, v in enumerate(self.initial))
        return C, hi

    def analytic_e0(self) -> Optional[AnalyticE0]:
        if min(self.initial) <= 0:
            return None
        r = self.root()
        poly = " ".join(_poly_terms(self.polynomial()))
        return AnalyticE0(E.r_log(r.lo), E.r_log(r.hi), f"log of the positive root of {poly}",
                          "dominant-root induction")


def _poly_terms(coeffs: Sequence[int]) -> List[str]:
    d = len(coeffs) - 1
    out = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        p = d - i
        mono = "" if p == 0 else ("x" if p == 1 else f"x^{p}")
        mag = abs(c)
        body = (str(mag) if mag != 1 or not mono else "") + mono
        sign = "-" if c < 0 else "+"
        out.append(body if not out and c > 0 else (f"-{body}" if not out else f"{sign} {body}"))
    return out


class MinBound(BoundSpec):
    def __init__(self, parts: Sequence[BoundSpec]):
        super().__init__()
        if len(parts) < 2:
            raise ValueError("min needs at least two bounds")
        self.parts = tuple(parts)
        self.monotone = True if all(p.monotone for p in parts) else None

    @property
    def text(self) -> str:
        return "min{" + " | ".join(p.text for p in self.parts) + "}"

    def value(self, n: int) -> Real:
        vals = [p.value(n) for p in self.parts]
        return E.r_extreme(vals, False)

    def _envelope(self) -> Optional[Envelope]:
        envs = [p.envelope() for p in self.parts]
        if any(e is None for e in envs):
            return None
        return envelope_min(envs, "minimum of envelopes")

    def analytic_e0(self) -> Optional[AnalyticE0]:
        es = [p.analytic_e0() for p in self.parts]
        if any(e is None for e in es):
            return None
        try:
            lo = _decided_extreme([e.lo for e in es], False)
            hi = _decided_extreme([e.hi for e in es], False)
        except UndecidableError:
            return None
        return AnalyticE0(lo, hi, "minimum of " + ", ".join(e.text for e in es), "minimum of analytic rates")


def min_bound(*parts: BoundSpec) -> MinBound:
    return MinBound(parts)
