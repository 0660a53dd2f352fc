import copy
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wordentropy.bounds import parse_bound, real_root
from wordentropy.engine import (
    BracketOptions,
    Certificate,
    CertificateFailure,
    build_pruned_graph,
    certify_lower,
    enumerate_slice,
    ew_bracket,
    min_experiment,
    pf_bracket,
    spectral_radius,
    upper_bound,
    verify,
)
from wordentropy.engine.slice import naive_slice_sizes
from wordentropy.generators import EmptyLanguage, full_shift, sft_from_forbidden, transitive_word
from wordentropy.words import FactorIndex

GOLDEN = parse_bound("preset:golden")
CASSAIGNE = parse_bound("preset:cassaigne")
LOOSE = parse_bound("2*2^n")
LOG_PHI = math.log((1 + 5 ** 0.5) / 2)
BETA = real_root([1, -1, -1, -1], (1, 2), Fraction(1, 10 ** 15))


# -- slices -------------------------------------------------------------------------


def test_slice_golden_sizes():
    s = enumerate_slice(GOLDEN, 20)
    assert s.sizes[5] == 28 and s.sizes[6] == 46 and s.sizes[20] == 35454
    assert not s.truncated


def test_slice_matches_exhaustive_oracle():
    for spec, q, N in [("preset:golden", None, 12), ("preset:cassaigne", None, 12),
                       ("n+1", None, 12), ("ceil(2^(n/2))+1", 3, 8), ("n^2+1", 3, 8)]:
        f = parse_bound(spec)
        s = enumerate_slice(f, N, q=q)
        assert list(s.sizes) == naive_slice_sizes(f, N, q=q), spec


def test_slice_words_are_lex_sorted_and_admissible():
    s = enumerate_slice(GOLDEN, 9)
    floors = GOLDEN.floors(9)
    for n in range(1, 10):
        W = s.words(n)
        keys = [tuple(r) for r in W.tolist()]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)
        for row in W[:50]:
            c = FactorIndex(row, 2).counts(n)
            assert all(c[k] <= floors[k] for k in range(n + 1))


def test_slice_contains_and_trie():
    s = enumerate_slice(GOLDEN, 6)
    assert s.contains("010010")
    assert s.contains("0000")
    assert not s.contains("00110")  # four distinct 2-factors > floor f(2) = 3
    masks = s.child_masks(0)
    assert masks.tolist() == [0b11]


def test_slice_loose_bound_is_full():
    s = enumerate_slice(LOOSE, 10, q=2)
    assert list(s.sizes) == [2 ** n for n in range(11)]
    assert upper_bound(LOOSE, 10, s).value == pytest.approx(math.log(2), abs=1e-12)


def test_slice_budget_truncation():
    s = enumerate_slice(GOLDEN, 20, budget=1000)
    assert s.truncated and s.N < 20 and max(s.sizes) <= 1000
    from wordentropy.words import BudgetExceeded
    with pytest.raises(BudgetExceeded) as info:
        enumerate_slice(GOLDEN, 20, budget=1000, strict=True)
    assert info.value.partial.sizes == s.sizes


def test_slice_parallel_matches_serial():
    a = enumerate_slice(CASSAIGNE, 18)
    b = enumerate_slice(CASSAIGNE, 18, workers=3)
    assert a.sizes == b.sizes
    for n in range(1, 19):
        assert np.array_equal(a.parents[n], b.parents[n])
        assert np.array_equal(a.letters[n], b.letters[n])


def test_upper_bound_values():
    assert upper_bound(GOLDEN, 6).value == pytest.approx(math.log(46) / 6, abs=1e-5)
    ub = upper_bound(GOLDEN, 20)
    assert ub.value == pytest.approx(0.5238, abs=5e-4)
    assert ub.value >= math.log(35454) / 20
    assert upper_bound(LOOSE, 7, q=2).value == pytest.approx(math.log(2), abs=1e-12)


def test_upper_bound_non_increasing_in_N():
    s = enumerate_slice(GOLDEN, 20)
    vals = [upper_bound(GOLDEN, N, s).value for N in range(1, 21)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


# -- follower graphs ------------------------------------------------------------------


def test_pruned_graph_golden_m1():
    g = build_pruned_graph(enumerate_slice(GOLDEN, 6), 1).as_dict()
    assert g["vertices"] == ["0", "1"]
    # 11 does occur in words of S_6 (e.g. 011000), so the edge cannot be pruned
    assert g["edges"] == ["00", "01", "10", "11"]
    assert g["components"] == [2]


def test_pruned_graph_full_shift_is_de_bruijn():
    g = build_pruned_graph(enumerate_slice(LOOSE, 6, q=2), 2).as_dict()
    assert g["edges"] == ["".join(w) for w in itertools.product("01", repeat=3)]


def test_pruned_graph_empty_language():
    s = enumerate_slice(parse_bound("table:1,2,2,0.5;tail=1/2"), 5)
    with pytest.raises(EmptyLanguage):
        build_pruned_graph(s, 1)


# -- spectral enclosures --------------------------------------------------------------


def test_spectral_contains_polynomial_roots():
    phi = real_root([1, -1, -1], (1, 2), Fraction(1, 10 ** 15))
    e = spectral_radius(sft_from_forbidden(2, ["11"]).matrix())
    assert e.lo <= phi.hi and phi.lo <= e.hi and float(e.hi - e.lo) < 1e-9
    e = spectral_radius(sft_from_forbidden(2, ["111"]).matrix())
    assert e.lo <= BETA.hi and BETA.lo <= e.hi and float(e.hi - e.lo) < 1e-9


# -- certificates -------------------------------------------------------------------


def test_certify_golden():
    c = certify_lower(GOLDEN, sft_from_forbidden(2, ["11"]), 200, 20)
    assert isinstance(c, Certificate)
    assert abs(c.lower - LOG_PHI) < 1e-9 and c.lower <= LOG_PHI
    assert verify(c.transcript()).ok


def test_certify_golden_full_shift_fails_at_2():
    res = certify_lower(GOLDEN, full_shift(2), 200, 20)
    assert isinstance(res, CertificateFailure) and not res
    assert res.kind == "finite" and res.n == 2 and res.p == 4 and res.f_floor == 3


def test_certify_cassaigne_tribonacci():
    c = certify_lower(CASSAIGNE, sft_from_forbidden(2, ["111"]), 3000, 40)
    assert isinstance(c, Certificate)
    assert abs(c.lower - math.log(float(BETA.mid))) < 1e-9
    assert verify(c.transcript()).ok


def test_certificate_tamper_detection():
    c = certify_lower(GOLDEN, sft_from_forbidden(2, ["11"]), 200, 20)
    t = c.transcript()
    bad = copy.deepcopy(t)
    bad["P"] = str(int(t["P"]) + 1)
    assert not verify(bad).ok
    bad = copy.deepcopy(t)
    bad["system"]["allowed"] = ["00", "01", "10", "11"]
    assert not verify(bad).ok
    bad = copy.deepcopy(t)
    bad["finite_digest"] = "0" * 64
    assert not verify(bad).ok
    bad = copy.deepcopy(t)
    bad["spectral"]["lo"] = "2"
    assert not verify(bad).ok


def test_certified_word_spot_check_beyond_horizon():
    X = sft_from_forbidden(2, ["11"])
    c = certify_lower(GOLDEN, X, 200, 20)
    u = transitive_word(X).prefix(1 << 18)
    counts = FactorIndex(u, 2).counts(2 * c.N0)
    floors = GOLDEN.floors(2 * c.N0)
    assert all(int(counts[k]) <= floors[k] for k in range(2 * c.N0 + 1))


def test_certify_equal_rates_uses_perron_tail():
    c = certify_lower(LOOSE, full_shift(2), 200, 20)
    assert isinstance(c, Certificate)
    assert c.tail_method == "perron"
    assert verify(c.transcript()).ok


# -- brackets -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def golden_bracket():
    return ew_bracket(GOLDEN, N=20)


@pytest.fixture(scope="module")
def cassaigne_bracket():
    return ew_bracket(CASSAIGNE, N=20)


def test_ew_bracket_golden(golden_bracket):
    br = golden_bracket
    assert br.certified and abs(br.lower - LOG_PHI) < 1e-9
    assert br.lower <= br.upper == pytest.approx(0.5238, abs=5e-4)


def test_ew_bracket_cassaigne(cassaigne_bracket):
    br = cassaigne_bracket
    assert br.certified and abs(br.lower - math.log(float(BETA.mid))) < 1e-9
    assert br.lower <= br.upper


def test_ew_bracket_sandwich_across_budgets():
    for f in (GOLDEN, CASSAIGNE):
        for budget in (2000, 20000, 400000):
            br = ew_bracket(f, N=16, budget=budget, m_max=3)
            assert br.lower <= br.upper


def test_ew_bracket_theta_staircase():
    br = ew_bracket(parse_bound("preset:theta-staircase(2,2,4)"), N=20)
    assert br.upper <= math.log(5) / 4 + 0.15
    assert br.lower <= br.upper


def test_ew_bracket_loose():
    br = ew_bracket(LOOSE, N=12, q=2)
    assert br.certified
    assert br.lower == pytest.approx(math.log(2), abs=1e-12)
    assert br.upper == pytest.approx(math.log(2), abs=1e-12)


def test_pf_bracket(golden_bracket, cassaigne_bracket):
    assert pf_bracket(GOLDEN, 5, golden_bracket) == (13, 28)
    lo, hi = pf_bracket(CASSAIGNE, 4, cassaigne_bracket)
    assert lo == 13 and hi == naive_slice_sizes(CASSAIGNE, 4)[4]
    assert pf_bracket(LOOSE, 7, N=10, q=2) == (128, 128)


def test_min_experiment():
    same = min_experiment(GOLDEN, GOLDEN, N=14, m_max=2, q=2)
    assert same.f.lower == same.fg.lower and same.f.upper == same.fg.upper
    mix = min_experiment(GOLDEN, CASSAIGNE, N=14, m_max=2, q=2)
    assert mix.consistent
    assert mix.fg.upper <= min(mix.f.upper, mix.g.upper) + 1e-12
    loose = min_experiment(parse_bound("2*2^n"), GOLDEN, N=14, m_max=2, q=2)
    assert loose.fg.upper == loose.g.upper and loose.fg.lower == loose.g.lower


def test_min_experiment_needs_same_alphabet():
    with pytest.raises(ValueError):
        min_experiment(GOLDEN, parse_bound("3^n"), N=6)


def test_bracket_options_from_kwargs():
    o = BracketOptions.from_kwargs({"N": 7}, m_max=2, q=None)
    assert o.N == 7 and o.m_max == 2 and o.q is None
