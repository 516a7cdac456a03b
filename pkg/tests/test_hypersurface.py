import pytest

from crinv.errors import (DefiningFunctionSyntaxError, NotOnSurface, NotRealValued, ShapeMismatch,
                          SingularPoint, UnsupportedOperation)
from crinv.exterior import FormJet, ext_d, pair
from crinv.hypersurface import (_solved_real, build_cr_frame, parse_defining_function, reduce_mod_drho,
                                validate_point)
from crinv.jets import FLOAT

from conftest import FREEMAN, LIE_BALL, LIGHT_CONE, SPHERE


def test_dimension_inferred_and_overridden():
    assert parse_defining_function(LIGHT_CONE).n_plus_1 == 3
    assert parse_defining_function("re(Z1) + re(Z2)", dim=4).n_plus_1 == 4


@pytest.mark.parametrize("src, exc", [
    ("re(Z1) +", DefiningFunctionSyntaxError),
    ("", DefiningFunctionSyntaxError),
    ("re(Z1) $ 2", DefiningFunctionSyntaxError),
    ("re(Z1)^(1/2)", DefiningFunctionSyntaxError),
    ("1/re(Z1)", UnsupportedOperation),
    ("re(Z1)^-1", UnsupportedOperation),
    ("Z1", NotRealValued),
    ("Z1 * Z2", NotRealValued),
])
def test_parser_rejects(src, exc):
    with pytest.raises(exc):
        parse_defining_function(src)


def test_dim_too_small():
    with pytest.raises(ShapeMismatch):
        parse_defining_function("re(Z3)", dim=2)


def test_hermitian_expression_is_real():
    rho = parse_defining_function("Z1*conj(Z1) + Z2*conj(Z2) - 1")
    assert rho.n_plus_1 == 2


def test_point_validation():
    rho = parse_defining_function(LIGHT_CONE)
    validate_point(rho, ["3", "4", "5"])
    validate_point(rho, ["3+2i", "4-i", "5+7i"])
    with pytest.raises(NotOnSurface):
        validate_point(rho, ["1", "1", "1"])
    with pytest.raises(SingularPoint):
        validate_point(rho, ["0", "0", "0"])
    with pytest.raises(ShapeMismatch):
        validate_point(rho, ["3", "4"])
    with pytest.raises(NotOnSurface):
        validate_point(rho, [3.0, 4.0, 5.001], FLOAT)


@pytest.mark.parametrize("src, point", [
    (LIGHT_CONE, ["3", "4", "5"]),
    (SPHERE, ["3/5", "4/5i", "0"]),
    (LIE_BALL, ["3/4", "1/4i", "0"]),
])
def test_cr_fields_are_tangent(src, point):
    rho = parse_defining_function(src)
    frame = build_cr_frame(rho, validate_point(rho, point), 4)
    for v in frame.L_bar + frame.L:
        assert v.apply(frame.rho_jet).is_zero()
        assert pair(frame.theta, [v]).is_zero()


def test_theta_is_real():
    rho = parse_defining_function(LIGHT_CONE)
    frame = build_cr_frame(rho, validate_point(rho, ["3", "4", "5"]), 4)
    assert (frame.theta - frame.theta.conj()).is_zero()


def test_reduce_mod_drho_removes_solved_direction():
    rho = parse_defining_function(LIGHT_CONE)
    frame = build_cr_frame(rho, validate_point(rho, ["3", "4", "5"]), 4)
    a = ext_d(frame.theta)
    r = reduce_mod_drho(a, frame)
    m = rho.n_plus_1
    s_idx = _solved_real(frame.point.gradient, m, frame.k)
    assert all(r.coeff(idx).is_zero() for idx in r.terms if s_idx in idx)
    assert not r.is_zero()
    assert reduce_mod_drho(frame.drho, frame).is_zero()


def test_chart_pullback_of_rho_vanishes():
    rho = parse_defining_function(FREEMAN)
    c = repr(float(1 + 1.2 ** 3) ** (1 / 3))
    frame = build_cr_frame(rho, validate_point(rho, ["1", "6/5", c], FLOAT), 4)
    chart = frame.chart()
    assert chart.eval(rho.real).max_abs() < 1e-12
    theta = chart.theta()
    assert isinstance(theta, FormJet)


def test_frame_order_floor():
    from crinv.errors import JetOrderExhausted
    rho = parse_defining_function(LIGHT_CONE)
    with pytest.raises(JetOrderExhausted):
        build_cr_frame(rho, validate_point(rho, ["3", "4", "5"]), 1)
