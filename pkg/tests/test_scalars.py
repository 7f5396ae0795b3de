from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from aslab.scalars import (
    CertInterval,
    Ordering,
    PrecisionExhausted,
    PthRootCoord,
    RootValue,
    Surd,
    Verdict,
    certify_le,
    compare,
    enclose,
    exact_compare,
    frac_from_json,
    frac_to_json,
    interval_compare,
    parse_fraction,
    precision_cap,
)

fractions = st.fractions(min_value=0, max_value=50, max_denominator=40)
signed = st.fractions(min_value=-50, max_value=50, max_denominator=40)
roots = st.integers(min_value=1, max_value=5)


def test_exact_compare_examples():
    assert exact_compare(RootValue(4, 2), RootValue(2, 1)) is Ordering.EQUAL
    assert exact_compare(RootValue(2, 2), RootValue(3, 2)) is Ordering.LESS
    assert exact_compare(RootValue(Fraction(9, 4), 2), RootValue(Fraction(27, 8), 3)) is Ordering.EQUAL


def test_enclose_examples():
    iv = enclose(RootValue(1, 1), 8)
    assert (iv.lo, iv.hi) == (1, 1)
    iv = enclose(RootValue(0, 3), 8)
    assert (iv.lo, iv.hi) == (0, 0)
    iv = enclose(RootValue(2, 2), 20)
    assert iv.lo ** 2 <= 2 <= iv.hi ** 2
    assert iv.width <= Fraction(2, 2 ** 19)


def test_interval_compare_examples():
    assert interval_compare(CertInterval(Fraction(1), Fraction(1), 8),
                            CertInterval(Fraction(2), Fraction(2), 8)) is Ordering.LESS
    assert interval_compare(CertInterval(Fraction(1), Fraction(3), 8),
                            CertInterval(Fraction(2), Fraction(4), 8)) is Ordering.UNDECIDED
    assert interval_compare(enclose(RootValue(2, 2), 20),
                            enclose(Fraction(3, 2), 20)) is Ordering.LESS


def test_rootvalue_validation():
    with pytest.raises(ValueError):
        RootValue(-1, 2)
    with pytest.raises(ValueError):
        RootValue(1, 0)


def test_fraction_json_roundtrip():
    x = Fraction(-7, 3)
    assert frac_to_json(x) == ["-7", "3"]
    assert frac_from_json(frac_to_json(x)) == x
    assert parse_fraction("5/4") == Fraction(5, 4)


def test_interval_json_roundtrip():
    iv = enclose(RootValue(3, 2), 40)
    assert CertInterval.from_json(iv.to_json()) == iv


def test_precision_cap_env(monkeypatch):
    monkeypatch.setenv("ASLAB_PRECISION_BITS", "64")
    assert precision_cap() == 64
    monkeypatch.delenv("ASLAB_PRECISION_BITS")
    assert precision_cap() == 256


def test_surd_arithmetic():
    r2 = Surd.root_of(2, 2)
    assert (r2 * r2).simplify() == 2
    assert (Surd.root_of(8, 2) - 2 * r2).is_zero()
    assert compare(r2 + 1, Fraction(5, 2)) < 0
    assert compare(Surd.root_of(2, 3), Surd.root_of(3, 4)) < 0  # 2^(4/12) < 3^(3/12)
    assert Surd.root_of(Fraction(9, 4), 2).simplify() == Fraction(3, 2)


def test_surd_sign_exhaustion(monkeypatch):
    # a genuinely nonzero difference far below the cap cannot be resolved
    monkeypatch.setenv("ASLAB_PRECISION_BITS", "40")
    tiny = Surd.root_of(2 ** 200 + 1, 2) - 2 ** 100
    with pytest.raises(PrecisionExhausted):
        tiny.sign()
    assert certify_le(tiny, 0) is Verdict.UNDECIDED


def test_pth_root_coord():
    c = PthRootCoord(Fraction(1), Fraction(1, 4), 2)  # (1/4)^(1/2)
    assert c.qth_power_abs() == Fraction(1, 4)
    assert c.as_surd().simplify() == Fraction(1, 2)
    assert PthRootCoord(3, 5, 1).as_surd().simplify() == 3


@given(fractions, roots)
def test_exact_compare_reflexive(r, k):
    assert exact_compare(RootValue(r, k), RootValue(r, k)) is Ordering.EQUAL


@given(signed, st.integers(min_value=2, max_value=300))
def test_point_enclosure_contains(x, bits):
    iv = CertInterval.point(x, bits)
    assert iv.lo <= x <= iv.hi


@given(fractions, roots, st.integers(min_value=4, max_value=200))
def test_root_enclosure_contains(r, k, bits):
    iv = enclose(RootValue(r, k), bits)
    assert iv.lo >= 0
    assert iv.lo ** k <= r <= iv.hi ** k


@given(fractions, roots, st.integers(min_value=4, max_value=120))
def test_refinement_never_widens(r, k, bits):
    a = enclose(RootValue(r, k), bits)
    b = enclose(RootValue(r, k), 2 * bits)
    assert b.width <= a.width


def _iv(a, b, bits=64):
    lo, hi = min(a, b), max(a, b)
    return CertInterval(CertInterval.point(lo, bits).lo, CertInterval.point(hi, bits).hi, bits)


@settings(max_examples=200)
@given(fractions, fractions, fractions, fractions, fractions, st.integers(1, 4))
def test_inclusion_monotone(a, b, c, d, s, q):
    # X inside X' (by construction) and Y inside Y'
    inner_x, inner_y = _iv(a, b), _iv(c, d)
    outer_x = CertInterval(inner_x.lo - 1 if inner_x.lo >= 1 else Fraction(0), inner_x.hi + 1, 64)
    outer_y = CertInterval(inner_y.lo, inner_y.hi + Fraction(1, 3), 64)
    for op in (lambda x, y: x + y, lambda x, y: x.max(y), lambda x, y: x.scale(s),
               lambda x, y: x.qpow(q), lambda x, y: x.qroot(q), lambda x, y: x * y):
        assert op(inner_x, inner_y).subset_of(op(outer_x, outer_y))


@settings(max_examples=200)
@given(fractions, fractions, st.integers(1, 4))
def test_interval_ops_contain_exact_values(a, b, q):
    x, y = CertInterval.point(a, 48), CertInterval.point(b, 48)
    assert (x + y).contains(a + b)
    assert (x * y).contains(a * b)
    assert x.qpow(q).contains(a ** q)
    r = x.qroot(q)
    assert r.lo ** q <= a <= r.hi ** q


@given(fractions, fractions, roots)
def test_compare_matches_powers(a, b, k):
    assert compare(RootValue(a, k), RootValue(b, k)) == (a > b) - (a < b)
