"""Certified lower bounds for the word entropy from subshifts of finite type.

If ``p_X(n) <= f(n)`` for every ``n``, a transitive word of ``X`` lies in
``W(f)`` and has entropy ``h(X) = log rho(M)``, so ``E_W(f) >= log rho``.
"Every ``n``" is split into a finite exact check up to ``N0`` and a tail:
with ``P = p_X(n0)`` and an envelope ``f(n) >= K B^(n/k)``,

    p_X(n) <= P^ceil(n/n0) <= P^((n+n0)/n0) <= K B^(n/k)   for n > N0,

and the last inequality is linear in ``n`` after taking logs, so it holds for
all ``n >= N0`` once it holds at ``N0`` and the slopes compare correctly.
Both are checked as exact integer inequalities.  If that fails up to the
largest horizon, a Perron bound ``p_X(n) <= C hi^(n-m)`` (``C`` from a
positive vector ``v`` with ``Mv <= hi v``) is tried instead.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..bounds.reals import fmt_fraction, log_bounds, parse_rational
from ..bounds.spec import BoundSpec, Envelope
from ..generators.sft import SftSystem
from .spectral import SpectralEnclosure, collatz_wielandt, spectral_radius

SCHEMA = "wordentropy.certificate/1"
# denominators of the coarsened envelope constants (keeps tail powers small)
_COARSE_BITS = 24


def coarsen_envelope(env: Envelope, bits: int = _COARSE_BITS) -> Envelope:
    """Same shape with dyadic ``K' <= K`` and ``B' <= B``; still an envelope."""
    s = 1 << bits

    def below(x: Fraction) -> Fraction:
        y = Fraction(math.floor(x * s), s)
        return y if y > 0 else x

    return Envelope(below(env.K), below(env.B), env.k, env.method)


def _counts_digest(series: Sequence[int], floors: Sequence[int]) -> str:
    h = hashlib.sha256()
    for n, (p, v) in enumerate(zip(series, floors)):
        h.update(f"{n}:{p}:{v}\n".encode())
    return h.hexdigest()


def submultiplicative_tail(P: int, n0: int, N0: int, env: Envelope) -> Tuple[bool, List[str]]:
    """Exact check of ``P^((n+n0)/n0) <= K B^(n/k)`` for every ``n >= N0``."""
    K, B, k = env.K, env.B, env.k
    notes = []
    # slope: P^(1/n0) <= B^(1/k)  <=>  P^k <= B^n0
    slope = Fraction(P) ** k <= B ** n0
    notes.append(f"slope: {P}^{k} <= B^{n0}: {slope}")
    if not slope:
        return False, notes
    # at N0: P^((N0+n0) k) <= K^(n0 k) B^(N0 n0)
    lhs = Fraction(P) ** ((N0 + n0) * k)
    rhs = K ** (n0 * k) * B ** (N0 * n0)
    ok = lhs <= rhs
    notes.append(f"at N0: P^{(N0 + n0) * k} <= K^{n0 * k} B^{N0 * n0}: {ok}")
    return ok, notes


def perron_tail(C: Fraction, hi: Fraction, m: int, N0: int, env: Envelope) -> Tuple[bool, List[str]]:
    """Exact check of ``C hi^(n-m) <= K B^(n/k)`` for every ``n >= N0``."""
    K, B, k = env.K, env.B, env.k
    slope = hi ** k <= B
    notes = [f"slope: hi^{k} <= B: {slope}"]
    if not slope:
        return False, notes
    ok = C ** k * hi ** ((N0 - m) * k) <= K ** k * B ** N0
    notes.append(f"at N0: C^{k} hi^{(N0 - m) * k} <= K^{k} B^{N0}: {ok}")
    return ok, notes


@dataclass
class Certificate:
    system: SftSystem
    f_text: str
    N0: int
    n0: int
    P: int
    envelope: Envelope
    tail_method: str
    tail_data: Dict[str, str]
    spectral: SpectralEnclosure
    digest: str
    notes: List[str] = field(default_factory=list)

    @property
    def lower(self) -> float:
        """Outward-rounded ``log`` of the certified Perron-root lower bound."""
        return log_bounds(self.spectral.lo)[0]

    @property
    def s(self) -> float:
        return math.log(self.P) / self.n0

    @property
    def e0_low(self) -> float:
        lo_log = log_bounds(self.envelope.B)[0]
        return lo_log / self.envelope.k

    def transcript(self) -> dict:
        X = self.system
        return {
            "schema": SCHEMA,
            "f": self.f_text,
            "system": {"q": X.q, "memory": X.m, "allowed": X.allowed_words()},
            "N0": self.N0,
            "n0": self.n0,
            "P": str(self.P),
            "finite_digest": self.digest,
            "envelope": {"K": fmt_fraction(self.envelope.K), "B": fmt_fraction(self.envelope.B),
                         "k": self.envelope.k, "source": self.envelope.method},
            "tail": {"method": self.tail_method, **self.tail_data},
            "spectral": {"lo": fmt_fraction(self.spectral.lo), "hi": fmt_fraction(self.spectral.hi),
                         "vector": [str(v) for v in self.spectral.vector]},
            "lower": self.lower,
            "s": self.s,
            "e0_low": self.e0_low,
        }

    def summary(self) -> dict:
        return {"memory": self.system.m, "vertices": len(self.system.vertices),
                "allowed": self.system.allowed_words(), "N0": self.N0, "n0": self.n0,
                "tail": self.tail_method, "lower": self.lower}


@dataclass
class CertificateFailure:
    kind: str  # "finite", "tail", "envelope", "entropy"
    detail: str
    n: Optional[int] = None
    p: Optional[int] = None
    f_floor: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return False

    def as_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail, "n": self.n,
                "p": None if self.p is None else str(self.p),
                "f_floor": None if self.f_floor is None else str(self.f_floor)}


def _finite_violation(series: Sequence[int], floors: Sequence[int], start: int = 0) -> Optional[int]:
    for n in range(start, len(series)):
        if series[n] > floors[n]:
            return n
    return None


def _escalation(N0: int, max_N0: int) -> List[int]:
    out = [N0]
    while out[-1] * 2 <= max_N0:
        out.append(out[-1] * 2)
    return out


def certify_lower(f: BoundSpec, X: SftSystem, N0: int = 200, n0: int = 20, *, max_N0: int = 8192,
                  tol: float = 1e-12) -> Union[Certificate, CertificateFailure]:
    """Try to certify ``E_W(f) >= log rho(X)``.

    The finite horizon doubles from ``N0`` up to ``max_N0`` (set ``max_N0 = N0``
    to check one horizon only); at each horizon the exponent witnesses
    ``n0, 2 n0, 4 n0`` are tried in turn.
    """
    if n0 < 1 or N0 < n0:
        raise ValueError("need 1 <= n0 <= N0")
    if not X.strongly_connected:
        return CertificateFailure("entropy", "follower graph is not strongly connected")
    env = f.envelope()
    if env is None:
        return CertificateFailure("envelope", "f has no certified exponential envelope")
    env_c = coarsen_envelope(env)
    series = X.complexity_series(N0)
    floors = f.floors(N0)
    bad = _finite_violation(series, floors)
    if bad is not None:
        return CertificateFailure("finite", f"p_X({bad}) = {series[bad]} > f({bad})", bad, series[bad], floors[bad])
    spec = spectral_radius(X.matrix(), tol)
    # h(X) >= rate(f) leaves no room for any tail argument
    if spec.lo ** env.k > env.B:
        return CertificateFailure("entropy", "entropy of X is above the envelope rate of f")
    # equal rates: p_X(n0)^(1/n0) > rho forces the submultiplicative tail to fail
    horizons = _escalation(N0, max(N0, max_N0)) if spec.hi ** env.k < env.B else []
    notes: List[str] = []
    checked = N0
    for H in horizons:
        if H > checked:
            series = X.complexity_series(H)
            floors = f.floors(H)
            bad = _finite_violation(series, floors, checked + 1)
            if bad is not None:
                return CertificateFailure("finite", f"p_X({bad}) = {series[bad]} > f({bad})", bad,
                                          series[bad], floors[bad], notes)
            checked = H
        for w in (n0, 2 * n0, 4 * n0):
            if w > H:
                break
            ok, nts = submultiplicative_tail(series[w], w, H, env_c)
            notes.append(f"N0={H} n0={w}: " + "; ".join(nts))
            if ok:
                return Certificate(X, f.text, H, w, series[w], env_c, "submultiplicative", {},
                                   spec, _counts_digest(series[: H + 1], floors[: H + 1]), notes)
    # Perron fallback at the largest horizon
    H = checked
    C, hi = _perron_constant(X, spec)
    ok, nts = perron_tail(C, hi, X.m, H, env_c)
    notes.append(f"perron N0={H}: " + "; ".join(nts))
    if ok:
        return Certificate(X, f.text, H, n0, series[n0], env_c, "perron",
                           {"C": fmt_fraction(C), "hi": fmt_fraction(hi)},
                           spec, _counts_digest(series[: H + 1], floors[: H + 1]), notes)
    return CertificateFailure("tail", f"tail inequality not established up to N0 = {H}; "
                              "try a larger N0 or n0", notes=notes)


def _perron_constant(X: SftSystem, spec: SpectralEnclosure) -> Tuple[Fraction, Fraction]:
    """``(C, hi)`` with ``p_X(n) <= C hi^(n-m)`` for ``n >= m``, coarsened upwards."""
    v = spec.vector
    rows = X.matrix().tolist()
    _, hi = collatz_wielandt(rows, v)
    C = Fraction(sum(v), min(v))
    s = 1 << _COARSE_BITS
    up = lambda x: Fraction(math.ceil(x * s), s)
    return up(C), up(hi)


# -- independent re-verification ----------------------------------------------


def _paths_count(q: int, m: int, allowed: Sequence[str], N: int) -> List[int]:
    """``p_X(n)`` for ``n <= N`` from the raw allowed-word list: row vector
    times transfer matrix on the pruned strongly connected graph."""
    from ..words.stream import as_word

    edges = set()
    for w in allowed:
        edges.add(tuple(int(a) for a in as_word(w, q)))
    verts = sorted({e[:-1] for e in edges} | {e[1:] for e in edges})
    index = {v: i for i, v in enumerate(verts)}
    out_edges: List[List[int]] = [[] for _ in verts]
    for e in sorted(edges):
        out_edges[index[e[:-1]]].append(index[e[1:]])
    counts = [1]
    for n in range(1, min(N, m - 1) + 1):
        counts.append(len({v[:n] for v in verts}))
    if N >= m:
        row = [1] * len(verts)
        counts.append(sum(row))
        for _ in range(m + 1, N + 1):
            nxt = [0] * len(verts)
            for i, r in enumerate(row):
                if r:
                    for j in out_edges[i]:
                        nxt[j] += r
            row = nxt
            counts.append(sum(row))
    return counts[: N + 1]


@dataclass
class VerifyResult:
    ok: bool
    checks: Dict[str, bool]
    detail: str = ""

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "detail": self.detail}


def verify(transcript: Union[dict, str]) -> VerifyResult:
    """Re-check a certificate transcript from its stored numbers alone."""
    from ..bounds.presets import parse_bound
    from ..generators.sft import SftSystem as _S

    t = json.loads(transcript) if isinstance(transcript, str) else transcript
    checks: Dict[str, bool] = {}
    if t.get("schema") != SCHEMA:
        return VerifyResult(False, {"schema": False}, f"unknown schema {t.get('schema')!r}")
    sysd = t["system"]
    q, m, allowed = int(sysd["q"]), int(sysd["memory"]), list(sysd["allowed"])
    N0, n0, P = int(t["N0"]), int(t["n0"]), int(t["P"])
    f = parse_bound(t["f"])
    counts = _paths_count(q, m, allowed, N0)
    floors = f.floors(N0)
    checks["finite"] = all(p <= v for p, v in zip(counts, floors))
    checks["finite_digest"] = _counts_digest(counts, floors) == t["finite_digest"]
    checks["P"] = counts[n0] == P if n0 <= N0 else False
    e = t["envelope"]
    env = Envelope(parse_rational(e["K"]), parse_rational(e["B"]), int(e["k"]), e.get("source", ""))
    fenv = f.envelope()
    # the stored envelope must be implied by the one f itself certifies
    checks["envelope"] = (fenv is not None and env.K <= fenv.K and env.K > 0
                          and env.B ** fenv.k <= fenv.B ** env.k)
    tail = t["tail"]
    if tail["method"] == "submultiplicative":
        checks["tail"] = submultiplicative_tail(P, n0, N0, env)[0]
    elif tail["method"] == "perron":
        C, hi = parse_rational(tail["C"]), parse_rational(tail["hi"])
        X = _S.from_allowed(q, m, _codes(q, allowed))
        v = [int(x) for x in t["spectral"]["vector"]]
        _, hi_cw = collatz_wielandt(X.matrix().tolist(), v)
        checks["perron_constants"] = hi >= hi_cw and C >= Fraction(sum(v), min(v))
        checks["tail"] = perron_tail(C, hi, m, N0, env)[0]
    else:
        checks["tail"] = False
    X = _S.from_allowed(q, m, _codes(q, allowed))
    v = [int(x) for x in t["spectral"]["vector"]]
    lo_cw, _ = collatz_wielandt(X.matrix().tolist(), v)
    checks["spectral"] = min(v) > 0 and lo_cw >= parse_rational(t["spectral"]["lo"]) and X.strongly_connected
    ok = all(checks.values())
    return VerifyResult(ok, checks, "" if ok else "failed: " + ", ".join(k for k, v in checks.items() if not v))


def _codes(q: int, words: Sequence[str]) -> List[int]:
    from ..words.stream import as_word

    out = []
    for w in words:
        c = 0
        for a in as_word(w, q).tolist():
            c = c * q + a
        out.append(c)
    return out
