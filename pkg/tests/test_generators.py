import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import admissible, all_words, naive_count, naive_sft_counts, text
from wordentropy.engine.spectral import spectral_radius
from wordentropy.generators import (
    BetaShift,
    EmptyLanguage,
    Morphism,
    apply_morphism,
    beta_factors,
    champernowne,
    exp_order_word,
    full_shift,
    growth_constant,
    pad_map,
    prop6_K,
    prop6_word,
    sft_complexity,
    sft_entropy,
    sft_from_forbidden,
    transitive_word,
)
from wordentropy.words import FactorIndex, factor_count, format_word, periodic_stream

LOG_PHI = math.log((1 + 5 ** 0.5) / 2)


def counts_of(w, N, L=None):
    L = w.saturating_length(N) if L is None else L
    return [int(c) for c in FactorIndex(w.prefix(L), w.q).counts(N)]


# -- Champernowne and morphisms ------------------------------------------------


def test_champernowne_prefixes():
    assert format_word(champernowne(2).prefix(10)) == "0110111001"
    assert champernowne(10).prefix(12).tolist() == [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0]
    for q in (2, 3, 5):
        assert champernowne(q).prefix(1).tolist() == [0]


def test_champernowne_saturation_is_sound():
    w = champernowne(3)
    for N in range(1, 5):
        assert counts_of(w, N)[N] == 3 ** N


def test_morphism_examples():
    K, w = prop6_word("0.3")
    assert K == 13
    head = format_word(w.prefix(2 * K + 2 + K + 1 + 2 * K + 2))
    assert head == "0" * (2 * K + 1) + "1" + "0" * K + "1" + "0" * (2 * K + 1) + "1"
    ident = Morphism.from_map({0: "0", 1: "1"})
    c = champernowne(2)
    assert apply_morphism(ident, c).prefix(500).tolist() == c.prefix(500).tolist()
    tm = Morphism.from_map({0: "01", 1: "10"})
    for n in (1, 5, 17):
        assert len(tm(c.prefix(n))) == 2 * n


def test_morphism_rejects_empty_image():
    with pytest.raises(ValueError):
        Morphism.from_map({0: "", 1: "1"})


def test_prop6_constants():
    assert prop6_K("0.3") == 13
    # log(n+1)/n < log 2 must hold strictly for every n >= ceil(K/2), and
    # n = 1 is the equality case, so ceil(K/2) = 2
    assert prop6_K("log(2)") == 3
    for c in ("0.1", "0.3", "0.6"):
        assert factor_count(prop6_word(c)[1].prefix(1000), 1) == 2


# -- subshifts of finite type --------------------------------------------------


def test_sft_examples():
    g = sft_from_forbidden(2, ["11"])
    assert len(g.vertices) == 2
    assert g.matrix().tolist() == [[1, 1], [1, 0]]
    assert sft_complexity(g, 5) == 13
    t = sft_from_forbidden(2, ["111"])
    assert sft_complexity(t, 4) == 13
    assert [sft_complexity(full_shift(2), n) for n in range(8)] == [2 ** n for n in range(8)]
    with pytest.raises(EmptyLanguage):
        sft_from_forbidden(2, ["00", "01", "10", "11"])


def test_sft_entropy_examples():
    lo, hi, _ = sft_entropy(sft_from_forbidden(2, ["11"]))
    assert lo <= LOG_PHI <= hi and hi - lo < 1e-9
    lo, hi, _ = sft_entropy(sft_from_forbidden(2, ["111"]))
    beta = 1.8392867552141612
    assert abs(lo - math.log(beta)) < 1e-9 and hi - lo < 1e-9
    lo, hi, _ = sft_entropy(full_shift(2))
    assert lo <= math.log(2) <= hi


def test_spectral_radius_small():
    enc = spectral_radius([[2]])
    assert enc.lo <= 2 <= enc.hi
    enc = spectral_radius([[1, 1], [1, 0]])
    phi = (1 + 5 ** 0.5) / 2
    assert float(enc.lo) - 1e-12 <= phi <= float(enc.hi) + 1e-12


def _random_forbidden(rng):
    q = rng.randint(2, 3)
    m = rng.randint(1, 3)
    k = rng.randint(1, 4)
    pool = ["".join(map(str, w)) for L in range(2, m + 2) for w in all_words(q, L)]
    return q, rng.sample(pool, min(k, len(pool)))


def test_sft_complexity_matches_naive_on_random_systems():
    rng = random.Random(20240601)
    mismatches = nonempty = 0
    for _ in range(100):
        q, forb = _random_forbidden(rng)
        N = 10 if q == 2 else 7
        expect = naive_sft_counts(q, forb, N)
        try:
            X = sft_from_forbidden(q, forb)
            got = [int(c) for c in X.complexity_series(N)]
        except EmptyLanguage:
            got = [0] * (N + 1)
        mismatches += got != expect
        nonempty += got[1] > 0
    assert mismatches == 0
    assert nonempty >= 50


@pytest.mark.parametrize("forbid,series", [
    (["11"], [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]),
    (["111"], [1, 2, 4, 7, 13, 24, 44, 81, 149, 274, 504]),
])
def test_transitive_word_saturates(forbid, series):
    X = sft_from_forbidden(2, forbid)
    w = transitive_word(X)
    N = len(series) - 1
    assert counts_of(w, N) == series
    assert [int(c) for c in X.complexity_series(N)] == series


def test_transitive_full_shift_and_cycle():
    w = transitive_word(full_shift(2))
    assert counts_of(w, 8) == [2 ** n for n in range(9)]
    from wordentropy.generators import SftSystem
    # single 3-cycle 0 -> 1 -> 2 -> 0
    cyc = SftSystem.from_allowed(3, 1, [0 * 3 + 1, 1 * 3 + 2, 2 * 3 + 0])
    u = transitive_word(cyc).prefix(300)
    assert all(factor_count(u, n) == 3 for n in range(1, 20))


def test_transitive_word_deterministic():
    X = sft_from_forbidden(2, ["11"])
    assert transitive_word(X).prefix(5000).tolist() == transitive_word(X).prefix(5000).tolist()


# -- beta shifts ----------------------------------------------------------------


def test_beta_factors_examples():
    assert beta_factors("log(2)", 6) == frozenset(text(w) for w in all_words(2, 6))
    golden = beta_factors("log((1+5^(1/2))/2)", 5)
    brute = {text(w) for w in all_words(2, 5) if "11" not in text(w)}
    assert golden == brute and len(golden) == 13
    assert len(beta_factors("0.5", 4)) >= math.ceil(math.e ** 2)


@pytest.mark.parametrize("h", ["0.5", "log(3/2)", "1", "0.405", "log((1+5^(1/2))/2)"])
def test_beta_factors_match_admissibility_oracle(h):
    b = BetaShift(h)
    n = 7 if b.q == 2 else 5
    alpha = b.alpha(n)
    brute = {text(w) for w in all_words(b.q, n) if admissible(w, alpha)}
    assert set(b.factors(n)) == brute


@pytest.mark.parametrize("h", ["0.5", "log(3/2)", "1", "1.3"])
def test_lambda_truncation_consistency(h):
    b = BetaShift(h)
    for n in range(1, 9):
        longer, shorter = set(b.factors(n + 1)), set(b.factors(n))
        assert {u[:-1] for u in longer} == shorter
        assert {u[1:] for u in longer} <= shorter


def test_lambda_lower_count_exact():
    from wordentropy.bounds import expr as E
    from wordentropy.bounds.effective import as_real
    from wordentropy.bounds.reals import exact_ceil
    for h in ("0.5", "log(3/2)", "1"):
        b = BetaShift(h)
        for n in range(1, 9):
            assert b.count(n) >= exact_ceil(E.r_exp(E.r_mul(as_real(h), Fraction(n))))


@given(st.sampled_from(["0.5", "log(3/2)", "0.405", "1", "1.2"]), st.integers(0, 5), st.integers(0, 5))
def test_concatenation_inequalities(h, n, n2):
    b = BetaShift(h)
    p = b.count
    q = b.q
    if q == 2:
        r = b.r_filler()
        assert p(n + n2 + r + 1) >= p(n) * p(n2)
        assert 2 ** (r + 1) * p(n + n2) >= p(n + n2 + r + 1)
    else:
        assert q * p(n + n2) >= p(n + n2 + 1) >= ((q - 2) * p(n) - (q - 3)) * p(n2)


def test_growth_constants():
    assert growth_constant(BetaShift("log(3/2)")) == 8
    assert growth_constant(BetaShift("1")) == 4


# -- pad maps -------------------------------------------------------------------


def test_pad_map_examples():
    assert pad_map("101", 2) == "1001"
    assert pad_map("2", 3, 1) == "11"
    assert pad_map("000", 3, 1) == "0000"


@pytest.mark.parametrize("q,r", [(2, 1), (3, 1), (4, 1), (4, 2)])
def test_pad_map_injective(q, r):
    top = 10 if q == 2 else (6 if q == 3 else 5)
    for n in range(1, top + 1):
        images = {pad_map(text(w), q, r) for w in all_words(q, n)}
        assert len(images) == q ** n


def test_pad_map_images_of_distinct_fillers_meet_only_at_zero():
    q = 5
    for n in range(1, 5):
        sets = [{pad_map(text(w), q, r) for w in all_words(q, n)} for r in range(1, q - 1)]
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                assert sets[i] & sets[j] == {"0" * (n + 1)}


# -- exponential-order word ------------------------------------------------------


def test_exp_order_log2_is_full():
    w = exp_order_word("log(2)")
    assert counts_of(w, 10) == [2 ** n for n in range(11)]


@pytest.mark.parametrize("h,N", [("log(3/2)", 12), ("1", 8), ("0.405", 12)])
def test_exp_order_envelope_on_saturated_prefix(h, N):
    from wordentropy.bounds import expr as E
    from wordentropy.bounds.effective import as_real
    from wordentropy.bounds.reals import compare

    w = exp_order_word(h)
    C = Fraction(w.meta["C"])
    p = counts_of(w, N)
    hr = as_real(h)
    b = BetaShift(h)
    for n in range(1, N + 1):
        ehn = E.r_exp(E.r_mul(hr, Fraction(n)))
        assert compare(ehn, Fraction(p[n])) <= 0
        assert compare(Fraction(p[n]), E.r_mul(C, ehn)) <= 0
        assert p[n] == b.count(n)


def test_exp_order_constants():
    assert exp_order_word("log(3/2)").meta["C"] == "8"
    assert exp_order_word("1").meta["C"] == "4"
