import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wordentropy.bounds import parse_bound
from wordentropy.engine import ew_bracket, enumerate_slice
from wordentropy.fractal import (
    box_count,
    cover_audit,
    digit_maps,
    digits_of,
    dimension_report,
    expansion,
    from_expansion,
    moran_root,
    shift_apply,
    value_of,
)
from wordentropy.generators import sft_entropy, sft_from_forbidden, transitive_word

GOLDEN = parse_bound("preset:golden")
DIM_PHI = math.log((1 + 5 ** 0.5) / 2) / math.log(2)


def test_digit_examples():
    assert digits_of(Fraction(1, 2), 2, 6) == "100000"
    assert digits_of(Fraction(1, 3), 2, 6) == "010101"
    assert shift_apply(Fraction(1, 3)) == Fraction(2, 3)
    assert digits_of(1, 3, 4) == "2222"
    w = transitive_word(sft_from_forbidden(2, ["11"]))
    iv = digit_maps(w, 2, 10)
    assert iv.width == Fraction(1, 2 ** 10)
    assert iv.lo == value_of(w.prefix(10), 2).lo


@pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(1, 5), Fraction(1, 7), Fraction(5, 8), Fraction(0), Fraction(1)])
@pytest.mark.parametrize("q", [2, 3, 10])
def test_expansion_round_trip_fixed(x, q):
    pre, per = expansion(x, q)
    assert from_expansion(pre, per, q) == x


@given(st.integers(1, 5), st.integers(0, 12), st.data())
def test_q_adic_round_trip(q_idx, k, data):
    q = [2, 3, 5, 7, 10][q_idx - 1]
    p = data.draw(st.integers(0, q ** k))
    x = Fraction(p, q ** k)
    d = digits_of(x, q, k + 2)
    assert value_of(d[:k], q).lo == x or x == 1
    pre, per = expansion(x, q)
    assert from_expansion(pre, per, q) == x


@given(st.integers(1, 200), st.integers(1, 200))
def test_rational_round_trip(a, b):
    x = Fraction(min(a, b), max(a, b))
    for q in (2, 3):
        pre, per = expansion(x, q)
        assert from_expansion(pre, per, q) == x
        iv = value_of(digits_of(x, q, 20), q)
        assert iv.contains(x)


def test_box_counts():
    assert box_count(GOLDEN, 6) == 46
    assert box_count(GOLDEN, 5) == 28
    s = enumerate_slice(parse_bound("2*2^n"), 9, q=2)
    assert box_count(parse_bound("2*2^n"), 9, s) == 2 ** 9


def test_moran_roots():
    assert moran_root([1, 1], 2).contains(1)
    r = moran_root([1, 2], 2)
    assert abs(r.mid - DIM_PHI) < 1e-6
    lo, hi, _ = sft_entropy(sft_from_forbidden(2, ["11"]))
    assert abs(r.mid - lo / math.log(2)) < 1e-6
    assert moran_root([1], 2).hi == 0
    with pytest.raises(ValueError):
        moran_root([0, 1], 2)


def test_dimension_reports():
    g = dimension_report(GOLDEN, N=20)
    assert abs(g.dim_lower - DIM_PHI) < 1e-6 and g.lower_certified
    assert 0 <= g.dim_lower <= g.dim_upper <= 1
    loose = dimension_report(parse_bound("2*2^n"), N=10, q=2)
    assert loose.dim_upper == 1 and loose.dim_lower == pytest.approx(1, abs=1e-12)
    c = dimension_report(parse_bound("preset:cassaigne"), N=20)
    assert abs(c.dim_lower - math.log(1.839286755214161) / math.log(2)) < 1e-6


def test_cover_audits():
    s = enumerate_slice(GOLDEN, 20)
    assert cover_audit(GOLDEN, "0.69", 20, s, dim_lower=DIM_PHI).passed
    hi = cover_audit(GOLDEN, "1.2", 20, s)
    assert not hi.passed and hi.first_failure is not None
    assert cover_audit(GOLDEN, 0, 20, s).passed


def test_box_count_slope_crosses_bracket():
    # |S_n| q^(-n s) stays large below the bracket and collapses above it
    br = ew_bracket(GOLDEN, N=20)
    s_lo = br.lower / math.log(2) - 0.05
    s_hi = br.upper / math.log(2) + 0.05
    c = br.slice.sizes[20]
    assert c * 2 ** (-20 * s_lo) >= 1
    assert c * 2 ** (-20 * s_hi) < 1
