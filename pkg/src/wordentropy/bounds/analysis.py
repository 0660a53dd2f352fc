"""Growth-rate brackets, structural condition checks and regularization of f."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from mpmath import iv

from . import expr as E
from .reals import Real, UndecidableError, compare, down, iv_bounds, ivprec, to_interval, up
from .spec import BoundSpec, TableBound

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def log_rate(value: Real, n: int) -> Tuple[float, float]:
    """Floats enclosing ``log(value) / n``."""
    with ivprec(128):
        v = iv.log(to_interval(value, 128)) / n
    lo, hi = iv_bounds(v)
    return down(float(lo)), up(float(hi))


@dataclass(frozen=True)
class E0Bounds:
    lower: float
    upper: float
    lower_certified: bool
    upper_certified: bool
    method: str
    exact: Optional[str] = None
    #: min over 1 <= n <= window of (1/n) log f(n), rounded up
    fekete_upper: Optional[float] = None
    fekete_argmin: Optional[int] = None
    window: int = 0

    def as_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "lower_certified": self.lower_certified,
            "upper_certified": self.upper_certified,
            "method": self.method,
            "exact": self.exact,
            "fekete_upper": self.fekete_upper,
            "fekete_argmin": self.fekete_argmin,
            "window": self.window,
        }


def fekete_scan(f: BoundSpec, window: int) -> Tuple[float, int, List[float]]:
    """Running minimum of the upper-rounded ``(1/n) log f(n)``, ``n <= window``."""
    best, arg = math.inf, 0
    running = []
    for n in range(1, window + 1):
        _, hi = log_rate(f.checked_value(n), n)
        if hi < best:
            best, arg = hi, n
        running.append(best)
    return best, arg, running


def e0_bounds(f: BoundSpec, window: int = 64) -> E0Bounds:
    """Bracket ``E0(f) = liminf (1/n) log f(n)``.

    Analytic information (presets, recurrences, recognised closed forms) gives
    certified bounds on both sides.  Otherwise the upper bound is the Fekete
    minimum over the window, valid only for submultiplicative ``f``, and the
    lower bound is a heuristic tail estimate; both are flagged uncertified.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    fek, arg, _ = fekete_scan(f, window)
    a = f.analytic_e0()
    if a is not None:
        lo, hi = a.floats()
        return E0Bounds(lo, hi, True, True, a.method, a.text, fek, arg, window)
    start = max(1, window // 2)
    tail = min(log_rate(f.checked_value(n), n)[0] for n in range(start, window + 1))
    return E0Bounds(min(tail, fek), fek, False, False, "fekete window (heuristic lower)", None, fek, arg, window)


# -- conditions ---------------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    status: str
    counterexample: Optional[tuple] = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "counterexample": list(self.counterexample) if self.counterexample else None,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ConditionReport:
    horizon: int
    cstar_i: Condition
    cstar_ii: Condition
    cassaigne: Condition
    envelope: Condition

    @property
    def cstar(self) -> bool:
        return self.cstar_i.ok and self.cstar_ii.ok

    def as_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "cstar_i": self.cstar_i.as_dict(),
            "cstar_ii": self.cstar_ii.as_dict(),
            "cassaigne": self.cassaigne.as_dict(),
            "envelope": self.envelope.as_dict(),
        }


def _cmp(x: Real, y: Real) -> Optional[int]:
    try:
        return compare(x, y)
    except UndecidableError:
        return None


def _num(x: Real):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return float(x)


def _check_cstar_i(vals: List[Real], N: int) -> Condition:
    undecided = None
    for n in range(N + 1):
        c = _cmp(vals[n], Fraction(n + 1))
        if c is None:
            undecided = undecided or (n,)
        elif c < 0:
            return Condition(FAIL, (n, _num(vals[n])), f"f({n}) < {n + 1}")
        if n < N:
            c = _cmp(vals[n + 1], vals[n])
            if c is None:
                undecided = undecided or (n,)
            elif c <= 0:
                return Condition(FAIL, (n, _num(vals[n]), _num(vals[n + 1])), f"f({n + 1}) <= f({n})")
    if undecided:
        return Condition(INCONCLUSIVE, undecided, "comparison undecided")
    return Condition(PASS)


def _check_cstar_ii(vals: List[Real], N: int) -> Condition:
    undecided = None
    for total in range(2, N + 1):
        for n in range(1, total // 2 + 1):
            m = total - n
            c = _cmp(vals[total], E.r_mul(vals[n], vals[m]))
            if c is None:
                undecided = undecided or (n, m)
            elif c > 0:
                return Condition(FAIL, (n, m, _num(vals[total])), f"f({total}) > f({n}) f({m})")
    if undecided:
        return Condition(INCONCLUSIVE, undecided, "comparison undecided")
    return Condition(PASS)


def _check_cassaigne(vals: List[Real], N: int) -> Condition:
    undecided = None
    diffs = [E.r_sub(vals[k + 1], vals[k]) for k in range(N)]
    for n in range(1, N):
        for m in range(0, N - n):
            lhs = diffs[n + m]
            rhs = E.r_mul(vals[n], diffs[m])
            c = _cmp(lhs, rhs)
            if c is None:
                undecided = undecided or (n, m)
            elif c > 0:
                return Condition(
                    FAIL, (n, m, _num(lhs), _num(rhs)),
                    f"f({n + m + 1}) - f({n + m}) > f({n}) (f({m + 1}) - f({m}))",
                )
    if undecided:
        return Condition(INCONCLUSIVE, undecided, "comparison undecided")
    return Condition(PASS)


def _check_envelope(f: BoundSpec, vals: List[Real], N: int) -> Condition:
    """``f(n) >= max(n+1, exp(E0 n))`` using the analytic E0 when known."""
    a = f.analytic_e0()
    for n in range(N + 1):
        c = _cmp(vals[n], Fraction(n + 1))
        if c is not None and c < 0:
            return Condition(FAIL, (n, _num(vals[n])), f"f({n}) < {n + 1}")
    if a is None:
        return Condition(INCONCLUSIVE, None, "no certified E0; only f(n) >= n+1 checked")
    undecided = None
    for n in range(1, N + 1):
        top = E.r_exp(E.r_mul(a.hi, Fraction(n)))
        c = _cmp(vals[n], top)
        if c is not None and c >= 0:
            continue
        bottom = E.r_exp(E.r_mul(a.lo, Fraction(n)))
        c = _cmp(vals[n], bottom)
        if c is not None and c < 0:
            return Condition(FAIL, (n, _num(vals[n])), f"f({n}) < exp(E0 * {n})")
        undecided = undecided or (n,)
    if undecided:
        return Condition(INCONCLUSIVE, undecided, "f(n) lies inside the E0 enclosure")
    return Condition(PASS, None, a.text)


def check_conditions(f: BoundSpec, N: int = 64) -> ConditionReport:
    """Check (C*)(i), (C*)(ii), the Cassaigne condition and the growth envelope
    exactly for every index pair inside the horizon ``N``."""
    if N < 2:
        raise ValueError("horizon must be >= 2")
    vals = [f.checked_value(n) for n in range(N + 1)]
    return ConditionReport(
        N,
        _check_cstar_i(vals, N),
        _check_cstar_ii(vals, N),
        _check_cassaigne(vals, N),
        _check_envelope(f, vals, N),
    )


# -- regularization -----------------------------------------------------------


@dataclass(frozen=True)
class Regularized:
    tilde: Tuple[int, ...]
    tilde_tilde: Tuple[Fraction, ...]
    #: how inf_{k >= n} floor f(k) was obtained
    inf_method: str
    #: False when the infimum was only scanned to a finite horizon
    valid: bool
    scan_horizon: int
    cstar_ii: Condition
    cstar: Condition

    def tilde_bound(self) -> TableBound:
        return TableBound(self.tilde, monotone=True)

    def tilde_tilde_bound(self) -> TableBound:
        return TableBound(self.tilde_tilde, monotone=True)


def _suffix_inf(f: BoundSpec, N: int, scan: int) -> Tuple[List[int], str, bool, int]:
    if f.monotone:
        return [f.floor(n) for n in range(N + 1)], "declared monotone", True, N
    if isinstance(f, TableBound):
        L = len(f.values)
        if f.tail is None:
            if N > L - 1:
                raise ValueError(f"table ends at n={L - 1} < N={N}")
            top = L - 1
            method, valid = "whole table", True
        elif f.tail.monotone:
            top = max(N, L)
            method, valid = "table with monotone tail", True
        else:
            top = max(scan, L)
            method, valid = "scanned", False
    else:
        top = max(scan, N)
        method, valid = "scanned", False
    fl = [f.floor(k) for k in range(top + 1)]
    out = [0] * (top + 1)
    run = fl[top]
    for k in range(top, -1, -1):
        run = min(run, fl[k])
        out[k] = run
    return out[: N + 1], method, valid, top


def regularize(f: BoundSpec, N: int, scan_horizon: Optional[int] = None) -> Regularized:
    """The regularized pair ``(tilde f, tilde tilde f)`` on ``0..N``.

    ``inf_{k >= n} floor f(k)`` is exact for declared-monotone ``f`` and for
    tables with a monotone tail; otherwise it is scanned up to
    ``scan_horizon`` (default ``4 N``) and ``valid`` is False.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    for n in range(N + 1):
        if compare(f.checked_value(n), Fraction(n + 1)) < 0:
            raise ValueError(f"regularize needs f(n) >= n+1; f({n}) is smaller")
    inf, method, valid, top = _suffix_inf(f, N, scan_horizon or 4 * N)
    t = [1, f.floor(1)]
    for n in range(2, N + 1):
        best = inf[n]
        for k in range(1, n // 2 + 1):
            best = min(best, t[k] * t[n - k])
        t.append(best)
    t = t[: N + 1]
    tt = tuple(Fraction(v) + Fraction(n, n + 1) for n, v in enumerate(t))
    vals_t = [Fraction(v) for v in t]
    return Regularized(
        tuple(t), tt, method, valid, top,
        _check_cstar_ii(vals_t, N),
        _combine(_check_cstar_i(list(tt), N), _check_cstar_ii(list(tt), N)),
    )


def _combine(a: Condition, b: Condition) -> Condition:
    for c in (a, b):
        if c.status == FAIL:
            return c
    for c in (a, b):
        if c.status != PASS:
            return c
    return Condition(PASS)
