"""End-to-end acceptance criteria 1-12, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (the summary lines are printed
at the end of the session) or directly with ``python tests/test_acceptance.py``.
"""
import itertools
import json
import math
import os
import random
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import naive_count, naive_sft_counts  # noqa: E402
from wordentropy.bounds import expr as E  # noqa: E402
from wordentropy.bounds import parse_bound, real_root  # noqa: E402
from wordentropy.bounds.effective import g_qc_family, rich_factor_search  # noqa: E402
from wordentropy.bounds.reals import compare  # noqa: E402
from wordentropy.cli import main as cli_main  # noqa: E402
from wordentropy.engine import enumerate_slice, ew_bracket, upper_bound  # noqa: E402
from wordentropy.engine.slice import naive_slice_sizes  # noqa: E402
from wordentropy.fractal import cover_audit, dimension_report, moran_root  # noqa: E402
from wordentropy.generators import (  # noqa: E402
    EmptyLanguage,
    champernowne,
    exp_order_word,
    prop6_word,
    sft_entropy,
    sft_from_forbidden,
    transitive_word,
)
from wordentropy.words import FactorIndex  # noqa: E402

RESULTS = {}

LOG_PHI = math.log((1 + 5 ** 0.5) / 2)
TIGHT = Fraction(1, 10 ** 15)
BETA = real_root([1, -1, -1, -1], (1, 2), TIGHT)   # tribonacci root
ALPHA = real_root([1, -1, 0, -3], (1, 2), TIGHT)   # dominant root of the Cassaigne recurrence


def _logf(r):
    return math.log(float(r.mid))


def record(num, ok, detail):
    RESULTS[num] = (bool(ok), detail)
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return line


def _analyze(*flags):
    with tempfile.TemporaryDirectory() as d:
        out = os.path.join(d, "r.json")
        t0 = time.time()
        code = cli_main(["analyze", *flags, "--out", out])
        dt = time.time() - t0
        with open(out, encoding="utf-8") as fh:
            return code, json.load(fh), dt


def _counts(letters, q, N):
    return [int(c) for c in FactorIndex(letters, q).counts(N)]


# ---------------------------------------------------------------------------------


def crit_1():
    code, rep, dt = _analyze("--preset", "golden", "--max-n", "20")
    ew, e0 = rep["ew"], rep["e0"]
    ok = (code == 0 and ew["certified"] and abs(ew["lower"] - LOG_PHI) <= 1e-9
          and e0["exact"] == "log(3)/2" and e0["lower_certified"] and e0["upper_certified"]
          and e0["lower"] <= math.log(3) / 2 <= e0["upper"]
          and abs(rep["ratio"] - 0.876037) <= 1e-5 and dt < 60)
    return ok, f"ew.lower={ew['lower']:.12f} e0={e0['exact']} ratio={rep['ratio']:.7f} ({dt:.1f}s)"


def crit_2():
    code, rep, dt = _analyze("--preset", "cassaigne", "--max-n", "20")
    ew, e0, cond = rep["ew"], rep["e0"], rep["conditions"]
    conds = all(cond[k]["status"] == "pass" for k in ("cstar_i", "cstar_ii", "cassaigne"))
    ok = (code == 0 and ew["certified"] and abs(ew["lower"] - _logf(BETA)) <= 1e-9
          and abs(e0["lower"] - _logf(ALPHA)) <= 1e-9 and abs(e0["upper"] - _logf(ALPHA)) <= 1e-9
          and abs(rep["ratio"] - 0.978814) <= 1e-5 and conds and cond["horizon"] == 64 and dt < 300)
    cert = ew["certificate"] or {}
    return ok, (f"ew.lower={ew['lower']:.12f} e0={e0['upper']:.12f} ratio={rep['ratio']:.7f} "
                f"conditions={'pass' if conds else 'FAIL'} N0={cert.get('N0')} ({dt:.1f}s)")


def crit_3():
    f = parse_bound("preset:golden")
    s = enumerate_slice(f, 20)
    oracle = naive_slice_sizes(f, 12)
    u6 = upper_bound(f, 6, s).value
    u20 = upper_bound(f, 20, s).value
    ok = (s.sizes[5] == 28 == oracle[5] and s.sizes[6] == 46 == oracle[6]
          and list(s.sizes[:13]) == oracle and s.sizes[20] == 35454
          and abs(u6 - math.log(46) / 6) <= 1e-5 and abs(u20 - 0.5238) <= 5e-4)
    return ok, f"|S5|={s.sizes[5]} |S6|={s.sizes[6]} |S20|={s.sizes[20]} ub6={u6:.6f} ub20={u20:.6f}"


def crit_4():
    bad = []
    for name in ("golden", "cassaigne"):
        f = parse_bound("preset:" + name)
        for budget in (5_000, 50_000, 4_000_000):
            br = ew_bracket(f, N=20, budget=budget)
            if not br.lower <= br.upper:
                bad.append(f"{name}@{budget}")
        s = enumerate_slice(f, 20)
        ups = [upper_bound(f, N, s).value for N in range(6, 21)]
        if any(b > a for a, b in zip(ups, ups[1:])):
            bad.append(f"{name} upper increases")
    return not bad, "lower <= upper at budgets 5e3, 5e4, 4e6; upper non-increasing N=6..20" + (
        f" failures: {bad}" if bad else "")


def crit_5():
    t0 = time.time()
    K, w = prop6_word("0.3")
    u = w.prefix(10 ** 6)
    p = _counts(u, 2, 70)
    ok_lin = all(p[n] == n + 1 for n in range(15))
    ok_exp = all(p[14 * n] >= 2 ** n for n in range(1, 6))
    ok_up = True
    for n in range(1, 41):
        bound = E.r_extreme([Fraction(n + 1), E.r_exp(E.r_mul(Fraction(3, 10), Fraction(n)))], True)
        ok_up &= compare(Fraction(p[n]), bound) <= 0
    dt = time.time() - t0
    ok = K == 13 and ok_lin and ok_exp and ok_up and dt < 30
    return ok, f"K={K} linear<=14:{ok_lin} p(14n)>=2^n:{ok_exp} upper<=40:{ok_up} ({dt:.1f}s)"


def _exp_check(h, N, C=None):
    w = exp_order_word(h)
    L = w.saturating_length(N)
    p = _counts(w.prefix(L), w.q, N)
    hr = E.r_log(Fraction(3, 2)) if h == "log(3/2)" else Fraction(1)
    C = Fraction(w.meta["C"]) if C is None else C
    ok = True
    for n in range(1, N + 1):
        ehn = E.r_exp(E.r_mul(hr, Fraction(n)))
        ok &= compare(ehn, Fraction(p[n])) <= 0 and compare(Fraction(p[n]), E.r_mul(C, ehn)) <= 0
    return ok, w.meta, L


def crit_6():
    ok_a, meta_a, La = _exp_check("log(3/2)", 12)
    r = meta_a["r"]
    ok_a &= Fraction(meta_a["C"]) == 2 ** (r + 1) and meta_a["q"] == 2
    ok_b, meta_b, Lb = _exp_check("1", 8, C=Fraction(4))
    ok_b &= meta_b["q"] == 3
    return ok_a and ok_b, (f"h=log(3/2): r={r} C={meta_a['C']} n<=12 on {La} letters: {ok_a}; "
                           f"h=1: q=3 p<=4e^n n<=8 on {Lb} letters: {ok_b}")


def crit_7():
    p = _counts(champernowne(2).prefix(2 ** 20), 2, 14)
    ok = p == [2 ** n for n in range(15)]
    return ok, f"p(14)={p[14]} on 2^20 letters"


def crit_8():
    rng = random.Random(20240601)
    sft_bad = 0
    for _ in range(100):
        q = rng.randint(2, 3)
        m = rng.randint(1, 3)
        pool = ["".join(map(str, w)) for L in range(2, m + 2) for w in itertools.product(range(q), repeat=L)]
        forb = rng.sample(pool, min(rng.randint(1, 4), len(pool)))
        N = 10 if q == 2 else 7
        expect = naive_sft_counts(q, forb, N)
        try:
            got = [int(c) for c in sft_from_forbidden(q, forb).complexity_series(N)]
        except EmptyLanguage:
            got = [0] * (N + 1)
        sft_bad += got != expect
    fc_bad = 0
    for L in range(13):
        for w in itertools.product((0, 1), repeat=L):
            c = FactorIndex(np.array(w, dtype=np.uint8), 2).counts(L)
            fc_bad += [int(x) for x in c] != [naive_count(w, n) for n in range(L + 1)]
    return sft_bad == 0 and fc_bad == 0, f"sft mismatches={sft_bad}/100 factor_count mismatches={fc_bad}/8191"


def crit_9():
    target = LOG_PHI / math.log(2)
    m = moran_root([1, 2], 2).mid
    lo, hi, _ = sft_entropy(sft_from_forbidden(2, ["11"]))
    e = (lo + hi) / 2 / math.log(2)
    phi = real_root([1, -1, -1], (1, 2), TIGHT)
    r = _logf(phi) / math.log(2)
    ok = all(abs(x - 0.694242) <= 1e-6 and abs(x - target) <= 1e-6 for x in (m, e, r))
    return ok, f"moran={m:.9f} sft={e:.9f} root={r:.9f}"


def crit_10():
    g1 = g_qc_family(2, "log(2)", 1, "g")
    t1 = g_qc_family(2, "log(2)", 1, "tilde")
    golden = transitive_word(sft_from_forbidden(2, ["11"]))
    hit = rich_factor_search(golden, 2, "0.9*log((1+5^(1/2))/2)", 2, 10 ** 5)
    return g1 == 4 and t1 == 4 and hit.found, f"g(1)={g1} tilde(1)={t1} rich factor at {hit.position}"


def crit_11():
    f = parse_bound("preset:golden")
    br = ew_bracket(f, N=20)
    dim = dimension_report(f, bracket=br)
    audit = cover_audit(f, "0.69", 20, br.slice, dim_lower=dim.dim_lower)
    ok = abs(dim.dim_lower - 0.694242) <= 1e-6 and dim.lower_certified and audit.passed
    return ok, f"dim_lower={dim.dim_lower:.9f} cover audit s=0.69 depth 20: {audit.passed}"


def crit_12():
    commands = [
        ["analyze", "--preset", "golden", "--max-n", "20"],
        ["analyze", "--preset", "cassaigne", "--max-n", "20"],
        ["analyze", "--f", "2*2^n", "--q", "2", "--max-n", "16"],
        ["generate", "--word", "champernowne", "--q", "2", "--length", "10"],
        ["generate", "--word", "exp-order", "--h", "0.405", "--length", "100000"],
        ["generate", "--word", "sft", "--forbid", "11", "--length", "100"],
        ["profile", "--word", "sft", "--forbid", "11", "--max-n", "5"],
        ["profile", "--word", "sft", "--forbid", "111", "--max-n", "4", "--special", "--rate"],
    ]
    diffs = []
    with tempfile.TemporaryDirectory() as d:
        for i, cmd in enumerate(commands):
            blobs = []
            variants = [[], []]
            if cmd[0] == "analyze":
                variants.append(["--workers", "4"])
            for j, extra in enumerate(variants):
                out = os.path.join(d, f"{i}-{j}.out")
                cli_main(cmd + extra + ["--out", out])
                paths = [out] + ([out + ".meta.json"] if cmd[0] == "generate" else [])
                blobs.append(b"".join(open(p, "rb").read() for p in paths))
            if len(set(blobs)) != 1:
                diffs.append(" ".join(cmd))
    return not diffs, f"{len(commands)} commands, repeated and with --workers 4" + (
        f"; differing: {diffs}" if diffs else "")


CRITERIA = [crit_1, crit_2, crit_3, crit_4, crit_5, crit_6, crit_7, crit_8, crit_9, crit_10, crit_11, crit_12]


@pytest.mark.parametrize("num", range(1, 13))
def test_criterion(num):
    ok, detail = CRITERIA[num - 1]()
    record(num, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        record(i, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
