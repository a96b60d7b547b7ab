"""Exact scalar and polynomial/jet arithmetic."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from defquant.exactnum import QC
from defquant.exactpoly import Poly, sin_jet, cos_jet

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)
qcs = st.builds(QC, rationals, rationals)


@given(qcs, qcs, qcs)
def test_qc_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert a - a == QC(0)


@given(qcs)
def test_qc_conj_involution(a):
    assert a.conj().conj() == a
    assert (a * a.conj()).im == 0


@given(qcs)
def test_qc_division_inverts(a):
    if not a.is_zero():
        assert (QC(1) / a) * a == QC(1)


def test_qc_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QC(1) / QC(0)


def test_qc_coerce_exact_binary_floats():
    c = QC.coerce(complex(0.5, -0.25))
    assert c == QC(Fraction(1, 2), Fraction(-1, 4))
    assert QC.coerce(Fraction(2, 3)) == QC(Fraction(2, 3))


def test_qc_pow_negative():
    assert QC(0, 1) ** -1 == QC(0, -1)
    assert QC(2) ** -2 == QC(Fraction(1, 4))


# ---------------------------------------------------------------------


def xy(expr=None, trunc=None):
    return Poly(2, expr, trunc)


def test_poly_basic_arithmetic():
    x = Poly.var(2, 0)
    y = Poly.var(2, 1)
    p = (x + y) ** 2
    assert p == xy({(2, 0): 1, (1, 1): 2, (0, 2): 1})
    assert (p - p).is_zero()
    assert p * 0 == Poly.zero(2)


def test_poly_diff():
    x = Poly.var(2, 0)
    y = Poly.var(2, 1)
    p = x ** 3 * y + x
    assert p.diff(0) == xy({(2, 1): 3, (0, 0): 1})
    assert p.diff(1) == xy({(3, 0): 1})
    assert p.diff(1).diff(1).is_zero()


def test_jet_truncation_in_product():
    x = Poly.var(2, 0, trunc=3)
    p = (1 + x) ** 5
    assert p == xy({(0, 0): 1, (1, 0): 5, (2, 0): 10, (3, 0): 10}, trunc=3)


def test_diff_lowers_truncation():
    # a jet known through total degree 3 determines its derivative only
    # through degree 2; the dropped order must not masquerade as exact
    p = Poly(1, {(k,): 1 for k in range(4)}, trunc=3)
    d = p.diff(0)
    assert d.trunc == 2
    assert d == Poly(1, {(0,): 1, (1,): 2, (2,): 3}, trunc=2)
    q = Poly(1, {(1,): 4})  # untruncated: stays untruncated
    assert q.diff(0).trunc is None


def test_diff_trunc_composes_with_product():
    x = Poly.var(1, 0, trunc=4)
    g = (1 + x).inverse()          # 1 - x + x^2 - x^3 + x^4
    dg = g.diff(0)                 # reliable through degree 3 only
    assert dg.trunc == 3
    # (1+x)^-2 through degree 3
    want = Poly(1, {(0,): 1, (1,): -2, (2,): 3, (3,): -4}, trunc=3)
    assert -dg == want


def test_inverse_roundtrip():
    x = Poly.var(2, 0, trunc=5)
    y = Poly.var(2, 1, trunc=5)
    p = 2 + x + y * y * 3
    q = p.inverse()
    assert p * q == Poly.one(2, trunc=5)
    with pytest.raises(ValueError):
        (1 + Poly.var(2, 0)).inverse()
    with pytest.raises(ZeroDivisionError):
        Poly.var(2, 0, trunc=4).inverse()


def test_eval_matches_float():
    p = xy({(2, 1): Fraction(3, 7), (0, 0): 1})
    got = p.eval_complex((0.5, -2.0))
    assert got == pytest.approx(Fraction(3, 7) * 0.25 * -2.0 + 1)
    assert p.eval_qc((Fraction(1, 2), -2)) == QC(Fraction(11, 14))


@pytest.mark.parametrize("k", range(7))
def test_sin_cos_jets_match_taylor(k):
    # base angle with exact sine 3/5, cosine 4/5
    s = sin_jet(Fraction(3, 5), Fraction(4, 5), 1, 0, 8)
    c = cos_jet(Fraction(3, 5), Fraction(4, 5), 1, 0, 8)
    th = math.asin(0.6)
    x = 0.1
    num_s = sum(complex(s.terms.get((j,), QC(0)).re) * x ** j for j in range(9))
    num_c = sum(complex(c.terms.get((j,), QC(0)).re) * x ** j for j in range(9))
    assert num_s == pytest.approx(math.sin(th + x), abs=1e-9)
    assert num_c == pytest.approx(math.cos(th + x), abs=1e-9)
    # derivative structure: s' = c, c' = -s at matching truncation
    assert s.diff(0) == c.truncate(7)
    assert c.diff(0) == -s.truncate(7)


def test_sin_cos_pythagoras_exact():
    s = sin_jet(Fraction(3, 5), Fraction(4, 5), 1, 0, 6)
    c = cos_jet(Fraction(3, 5), Fraction(4, 5), 1, 0, 6)
    assert s * s + c * c == Poly.one(1, trunc=6)
