"""Two-sided brackets for the word entropy, P_f brackets and the min{f, g} harness."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..bounds.spec import BoundSpec, min_bound
from ..generators.sft import EmptyLanguage, SftSystem
from .certificate import Certificate, CertificateFailure, certify_lower
from .slice import DEFAULT_BUDGET, Slice, UpperBound, build_pruned_graph, enumerate_slice, upper_bound


@dataclass
class BracketOptions:
    N: int = 20
    m_max: int = 4
    budget: int = DEFAULT_BUDGET
    N0: int = 200
    n0: int = 20
    max_N0: int = 8192
    q: Optional[int] = None
    workers: int = 1
    #: greedy vertex removals per memory before giving up
    max_steps: int = 64

    @classmethod
    def from_kwargs(cls, opts=None, **kwargs) -> "BracketOptions":
        if isinstance(opts, cls):
            base = opts.__dict__.copy()
        else:
            base = dict(opts or {})
        base.update({k: v for k, v in kwargs.items() if v is not None})
        return cls(**base)


@dataclass
class SearchStep:
    m: int
    vertices: int
    outcome: str

    def as_dict(self) -> dict:
        return {"m": self.m, "vertices": self.vertices, "outcome": self.outcome}


@dataclass
class EntropyBracket:
    lower: float
    upper: float
    certified: bool
    certificate: Optional[Certificate]
    upper_witness: UpperBound
    slice: Slice = field(repr=False)
    search: List[SearchStep] = field(default_factory=list, repr=False)
    seconds: float = 0.0

    @property
    def truncated(self) -> bool:
        return self.slice.truncated

    def as_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "certified": self.certified,
            "certificate": self.certificate.summary() if self.certificate else None,
            "upper_witness": self.upper_witness.as_dict(),
            "horizon": self.slice.N,
            "truncated": self.slice.truncated,
        }


def _radius_float(X: SftSystem) -> float:
    M = X.matrix().astype(float)
    if M.size == 0:
        return 0.0
    return float(max(abs(np.linalg.eigvals(M))))


def _largest_scc(X: SftSystem) -> Optional[SftSystem]:
    best, best_r = None, -1.0
    for comp in X.components():
        try:
            Y = X.restrict(comp)
        except EmptyLanguage:
            continue
        r = _radius_float(Y)
        if r > best_r + 1e-12:
            best, best_r = Y, r
    return best


def _remove_one(X: SftSystem) -> Optional[SftSystem]:
    """Heuristic shrink step: drop the vertex whose removal leaves the
    component of largest spectral radius (ties: smallest vertex code)."""
    best, best_r = None, -1.0
    for v in X.vertices:
        keep = [u for u in X.vertices if u != v]
        if not keep:
            continue
        try:
            Y = _largest_scc(X.restrict(keep))
        except EmptyLanguage:
            continue
        if Y is None:
            continue
        r = _radius_float(Y)
        if r > best_r + 1e-12:
            best, best_r = Y, r
    return best


def search_certificate(f: BoundSpec, s: Slice, opts: BracketOptions) -> Tuple[Optional[Certificate], List[SearchStep]]:
    """Greedy candidate search over memories ``1..m_max``; keeps the best."""
    best: Optional[Certificate] = None
    steps: List[SearchStep] = []
    for m in range(1, min(opts.m_max, s.N - 1) + 1):
        try:
            X = build_pruned_graph(s, m).largest()
        except EmptyLanguage:
            steps.append(SearchStep(m, 0, "empty graph"))
            continue
        for _ in range(opts.max_steps):
            if X is None or _radius_float(X) <= 1.0 + 1e-12:
                break
            if best is not None and _radius_float(X) <= math.exp(best.lower) * (1 + 1e-12):
                steps.append(SearchStep(m, len(X.vertices), "not above current best"))
                break
            res = certify_lower(f, X, opts.N0, opts.n0, max_N0=opts.max_N0)
            if isinstance(res, Certificate):
                steps.append(SearchStep(m, len(X.vertices), f"certified lower {res.lower:.12f}"))
                if best is None or res.lower > best.lower:
                    best = res
                break
            steps.append(SearchStep(m, len(X.vertices), f"{res.kind}: {res.detail}"))
            X = _remove_one(X)
    return best, steps


def ew_bracket(f: BoundSpec, opts=None, *, s: Optional[Slice] = None, **kwargs) -> EntropyBracket:
    """``[lower, upper]`` for ``E_W(f)``: upper from the slice, lower from a
    certified SFT (0 and ``certified = False`` when none is found)."""
    o = BracketOptions.from_kwargs(opts, **kwargs)
    t0 = time.time()
    if s is None:
        s = enumerate_slice(f, o.N, o.budget, q=o.q, workers=o.workers)
    ub = upper_bound(f, s.N, s)
    cert, steps = search_certificate(f, s, o)
    lower = cert.lower if cert else 0.0
    return EntropyBracket(lower, ub.value, cert is not None, cert, ub, s, steps, time.time() - t0)


def pf_bracket(f: BoundSpec, n: int, br: Optional[EntropyBracket] = None, **kwargs) -> Tuple[int, int]:
    """``(lower, upper)`` for ``P_f(n)``: ``p_X(n)`` of the certified SFT and ``|S_n|``."""
    if br is None or br.slice.N < n:
        kw = dict(kwargs)
        kw["N"] = max(n, kw.get("N") or 0)
        br = ew_bracket(f, **kw)
    upper = br.slice.sizes[n]
    lower = br.certificate.system.complexity_series(n)[n] if br.certificate else 0
    return lower, upper


@dataclass
class MinReport:
    f: EntropyBracket
    g: EntropyBracket
    fg: EntropyBracket
    tolerance: float

    @property
    def consistent(self) -> bool:
        return self.fg.upper <= min(self.f.upper, self.g.upper) + self.tolerance

    @property
    def gap(self) -> float:
        """``min(lower_f, lower_g) - upper_min``: positive would refute the
        inequality; the open question is whether it can be made 0."""
        return min(self.f.lower, self.g.lower) - self.fg.upper

    def as_dict(self) -> dict:
        return {"f": self.f.as_dict(), "g": self.g.as_dict(), "min": self.fg.as_dict(),
                "consistent": self.consistent, "gap": self.gap}


def min_experiment(f: BoundSpec, g: BoundSpec, opts=None, *, tolerance: float = 1e-12, **kwargs) -> MinReport:
    o = BracketOptions.from_kwargs(opts, **kwargs)
    qf = o.q or f.q
    qg = o.q or g.q
    if qf != qg:
        raise ValueError(f"alphabet sizes differ: {qf} vs {qg}")
    o.q = qf
    bf = ew_bracket(f, o)
    bg = ew_bracket(g, o)
    bfg = ew_bracket(min_bound(f, g), o)
    return MinReport(bf, bg, bfg, tolerance)
