import warnings
from types import SimpleNamespace

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from crinv.errors import SingularSolve, WrongCase
from crinv.parallelism5d import (AmbiguousCaseWarning, SyntheticScalars, classify_case,
                                 higher_dim_gate, solve_c1, solve_case1, solve_case2)
from crinv.scalars import QI

cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def _classify(k):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tag = classify_case(SyntheticScalars(k_hat=k))
    return tag, [w for w in caught if issubclass(w.category, AmbiguousCaseWarning)]


def test_c1_for_vanishing_k_hat():
    assert solve_c1(0j, 1 + 0j) == pytest.approx(0.5j)
    assert solve_c1(QI(0), QI(1)) == QI(0, 1) / 2


@settings(max_examples=200, deadline=None)
@given(cplx, cplx)
def test_c1_solves_its_equation(k, kb):
    assume(abs(abs(k) - 2) > 1e-3)
    c = solve_c1(k, kb)
    assert abs(kb + 2j * c - c.conjugate() * k) < 1e-9 * max(1.0, abs(kb)) / abs(abs(k) - 2) ** 2 + 1e-12


def test_c1_singular_on_case_boundary():
    with pytest.raises(SingularSolve):
        solve_c1(QI(0, 2), QI(1))
    with pytest.raises(SingularSolve):
        solve_c1(2j, 1 + 0j)


@pytest.mark.parametrize("k, variant, ambiguous", [
    (2j, "Case1", False),
    (-2 + 0j, "Case1", False),
    (complex(1.2, 1.6), "Case1", False),
    (0j, "Case2", False),
    (3j, "Case2", False),
    ((2 + 1e-7) * 1j, "Case1", True),
    ((2 - 5e-7) * 1j, "Case1", True),
    ((2 + 2e-6) * 1j, "Case2", False),
])
def test_classify_case(k, variant, ambiguous):
    tag, warned = _classify(k)
    assert tag.variant == variant
    assert tag.ambiguous == ambiguous
    assert bool(warned) == ambiguous


def test_classify_exact_boundary_has_no_warning():
    tag, warned = _classify(QI(0, 2))
    assert tag.variant == "Case1" and not warned
    assert tag.group_dim == 2


def test_classify_needs_n_equal_two():
    with pytest.raises(WrongCase):
        classify_case(SimpleNamespace(r=2, k_hat=2j, mode="float"))


def test_synthetic_case2():
    pd = solve_case2(SyntheticScalars(k_hat=0j, k_hat_bar1=1 + 0j))
    assert complex(pd.params["c1"]) == pytest.approx(0.5j)
    assert pd.max_residual() < 1e-12
    assert pd.synthetic and pd.group_dim == 1


@settings(max_examples=200, deadline=None)
@given(cplx, cplx, cplx, cplx)
def test_synthetic_case2_normalizes(k, kb, b1, b2):
    assume(abs(abs(k) - 2) > 1e-2)
    pd = solve_case2(SyntheticScalars(k_hat=k, k_hat_bar1=kb, b1=b1, b2=b2))
    scale = max(1.0, abs(k), abs(kb), abs(b1), abs(b2)) ** 3 / abs(abs(k) - 2) ** 2
    assert pd.max_residual() < 1e-9 * scale


@settings(max_examples=200, deadline=None)
@given(st.floats(-3.1, 3.1), st.floats(-5, 5), cplx, cplx)
def test_synthetic_case1_normalizes(t, f, m, l):
    import cmath
    pd = solve_case1(SyntheticScalars(k_hat=2j * cmath.exp(1j * t), f=f, m=m, l=l))
    assert pd.case.variant == "Case1"
    assert pd.max_residual() < 1e-9 * max(1.0, abs(f), abs(m), abs(l)) ** 2


def test_cone_case1(cone_pd_exact):
    pd = cone_pd_exact
    assert pd.case.variant == "Case1" and pd.group_dim == 2
    assert all(v == 0 for v in pd.residuals.values())
    assert pd.coframe_det != 0


def test_cone_case1_float_agrees(cone_pd_exact, cone_pd_float):
    for key, v in cone_pd_exact.params.items():
        assert abs(complex(cone_pd_float.params[key]) - complex(v)) < 1e-9 * max(1.0, abs(complex(v)))
    assert cone_pd_float.max_residual() < 1e-9


def test_lie_ball_case2(lie_ball_pd_exact):
    pd = lie_ball_pd_exact
    assert pd.case.variant == "Case2" and pd.group_dim == 1
    assert all(v == 0 for v in pd.residuals.values())
    assert complex(pd.params["c"]) == complex(8 / 3) or QI.coerce(pd.params["c"]) == QI(8) / 3
    assert complex(pd.params["c1"]) == 0


def test_freeman_case1(freeman_pd):
    assert freeman_pd.case.variant == "Case1"
    assert abs(complex(freeman_pd.case.k_hat) - 2j) < 1e-8
    assert freeman_pd.max_residual() < 1e-9


def test_higher_dim_gate():
    ss = SimpleNamespace(k_hat=2j, h_hat=[[0.7, 0], [0, 0.3]])
    out = higher_dim_gate(ss, lambdas=[1.0, 0.5])
    assert out["branch"] == "exceptional" and out["exceptional_indices"] == [1]
    out = higher_dim_gate(ss)
    assert out["branch"] == "solvable"
    assert [p["index"] for p in out["per_index"]] == [1, 2]


def test_synthetic_case2_exact():
    pd = solve_case2(SyntheticScalars(k_hat=QI(0), k_hat_bar1=QI(1), mode="exact"))
    assert QI.coerce(pd.params["c1"]) == QI(0, 1) / 2
    assert pd.max_residual() == 0
