from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crinv.errors import DivisionBySingularJet, JetOrderExhausted, ModeMismatch
from crinv.jets import EXACT, FLOAT, CJet, Jet, num_monomials

from strategies import NV, ORDER, cjets, real_jets


def test_num_monomials():
    assert num_monomials(3, 0) == 1
    assert num_monomials(3, 2) == 10
    assert num_monomials(7, 9) == 11440


def test_variable_and_product():
    x = Jet.variable(0, 2, 3, EXACT)
    y = Jet.variable(1, 2, 3, EXACT)
    p = (x + y) ** 2
    assert p.coefficient((2, 0)) == 1
    assert p.coefficient((1, 1)) == 2
    assert p.coefficient((0, 2)) == 1


def test_product_truncates():
    x = Jet.variable(0, 1, 2, EXACT)
    assert (x * x * x).is_zero()


def test_geometric_series():
    x = Jet.variable(0, 1, 5, EXACT)
    inv = (1 - x).inverse()
    assert all(inv.coefficient((k,)) == 1 for k in range(6))


def test_inverse_of_singular_jet_raises():
    x = Jet.variable(0, 2, 3, EXACT)
    with pytest.raises(DivisionBySingularJet):
        x.inverse()


def test_partial_lowers_order():
    x = Jet.variable(0, 1, 3, EXACT)
    d = (x ** 3).partial(0)
    assert d.order == 2
    assert d.coefficient((2,)) == 3
    with pytest.raises(JetOrderExhausted):
        Jet.constant(1, 1, 0, EXACT).partial(0)


def test_mode_mismatch():
    with pytest.raises(ModeMismatch):
        Jet.constant(1, 1, 2, EXACT) + Jet.constant(1, 1, 2, FLOAT)


def test_sqrt_exact():
    x = Jet.variable(0, 1, 6, EXACT)
    s = (4 + 4 * x + x * x).sqrt()
    assert s.coefficient((0,)) == 2
    assert s.coefficient((1,)) == 1
    assert all(s.coefficient((k,)) == 0 for k in range(2, 7))


def test_imaginary_unit_squares_to_minus_one():
    i = CJet.constant((0, 1), 2, 3, EXACT)
    assert (i * i + 1).is_zero()


@settings(max_examples=200, deadline=None)
@given(real_jets(), real_jets(), real_jets())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c - a * (b * c)).is_zero()
    assert (a * (b + c) - (a * b + a * c)).is_zero()
    assert (a * b - b * a).is_zero()


@settings(max_examples=200, deadline=None)
@given(cjets(unit=True))
def test_inverse(a):
    one = a * a.inverse()
    assert (one - 1).is_zero()


@settings(max_examples=200, deadline=None)
@given(cjets(), cjets(), st.integers(0, NV - 1))
def test_leibniz(a, b, k):
    lhs = (a * b).partial(k)
    rhs = a.partial(k) * b + a * b.partial(k)
    assert (lhs - rhs.truncate(ORDER - 1)).is_zero()


@settings(max_examples=200, deadline=None)
@given(cjets(), cjets())
def test_conjugation_is_multiplicative(a, b):
    assert ((a * b).conj() - a.conj() * b.conj()).is_zero()


@settings(max_examples=100, deadline=None)
@given(cjets(unit=True))
def test_float_agrees_with_exact(a):
    inv = a.inverse()
    inv_f = a.to_float().inverse()
    assert (inv.to_float() - inv_f).max_abs() <= 1e-9 * max(1.0, inv.max_abs())


def test_fraction_coefficients_stay_exact():
    j = Jet.constant(Fraction(1, 3), 1, 2, EXACT)
    assert (j * 3).coefficient((0,)) == 1
