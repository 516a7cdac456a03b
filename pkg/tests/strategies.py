"""Hypothesis strategies for jets, forms and vector fields with small integer data."""
from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from crinv.exterior import FormJet, VectorJet
from crinv.jets import EXACT, FLOAT, CJet, Jet, _basis, num_monomials

NV = 3
ORDER = 4


@st.composite
def real_jets(draw, nvars=NV, order=ORDER, mode=EXACT, lo=-4, hi=4, max_terms=12):
    exps = _basis(nvars, order).exps
    coeffs = draw(st.dictionaries(st.sampled_from(exps), st.integers(lo, hi), max_size=max_terms))
    return Jet.from_coeffs(coeffs, nvars, order, mode)


@st.composite
def cjets(draw, nvars=NV, order=ORDER, mode=EXACT, unit=False):
    re = draw(real_jets(nvars, order, mode))
    im = draw(real_jets(nvars, order, mode))
    f = CJet(re, im)
    if unit:
        # nonzero constant term so the jet is invertible
        c = draw(st.sampled_from([1, 2, -3, 5]))
        f = f + CJet.constant(c, nvars, order, mode) - CJet.constant(f.value(), nvars, order, mode)
    return f


@st.composite
def forms(draw, degree, nvars=NV, order=ORDER, mode=EXACT):
    terms = {}
    for idx in combinations(range(nvars), degree):
        if draw(st.booleans()):
            terms[idx] = draw(cjets(nvars, order, mode))
    if not terms:
        return FormJet.zero(nvars, degree, order, mode)
    return FormJet.from_terms(terms, nvars, degree, order, mode)


@st.composite
def fields(draw, nvars=NV, order=ORDER, mode=EXACT):
    return VectorJet([draw(cjets(nvars, order, mode)) for _ in range(nvars)])


# -- random points on the rank-uniform corpus members ---------------------------------

_small = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@st.composite
def cone_points(draw):
    """s (1 - t^2, 2t, 1 + t^2) plus arbitrary imaginary parts (rho only sees Re)."""
    t = draw(st.fractions(min_value=-2, max_value=2, max_denominator=5))
    s = draw(st.sampled_from([Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(3, 2)]))
    re = [s * (1 - t * t), s * 2 * t, s * (1 + t * t)]
    return tuple((r, draw(_small)) for r in re)


def _rotation(q):
    a, b, c, d = q
    n = a * a + b * b + c * c + d * d
    return [[Fraction(a*a + b*b - c*c - d*d, n), Fraction(2*(b*c - a*d), n), Fraction(2*(b*d + a*c), n)],
            [Fraction(2*(b*c + a*d), n), Fraction(a*a - b*b + c*c - d*d, n), Fraction(2*(c*d - a*b), n)],
            [Fraction(2*(b*d - a*c), n), Fraction(2*(c*d + a*b), n), Fraction(a*a - b*b - c*c + d*d, n)]]


@st.composite
def lie_ball_points(draw):
    """Rotations and phases of (a, (1 - a) i, 0), which lies on the smooth boundary part."""
    a = draw(st.fractions(min_value=Fraction(11, 20), max_value=Fraction(9, 10), max_denominator=20))
    q = draw(st.tuples(*[st.integers(-3, 3)] * 4).filter(any))
    t = draw(st.fractions(min_value=-2, max_value=2, max_denominator=4))
    R = _rotation(q)
    z = [(a, Fraction(0)), (Fraction(0), 1 - a), (Fraction(0), Fraction(0))]
    w = [(sum(R[i][j] * z[j][0] for j in range(3)), sum(R[i][j] * z[j][1] for j in range(3)))
         for i in range(3)]
    c, sn = (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)
    return tuple((x * c - y * sn, x * sn + y * c) for x, y in w)


@st.composite
def freeman_points(draw):
    """Float points with Re(Z3) = (Re(Z1)^3 + Re(Z2)^3)^(1/3), Re(Z1), Re(Z2) > 0."""
    x1 = draw(st.floats(0.3, 3.0))
    x2 = draw(st.floats(0.3, 3.0))
    ims = [draw(st.floats(-2, 2)) for _ in range(3)]
    x3 = (x1 ** 3 + x2 ** 3) ** (1 / 3)
    return ((x1, ims[0]), (x2, ims[1]), (x3, ims[2]))


__all__ = ["real_jets", "cjets", "cone_points", "lie_ball_points", "freeman_points", "forms", "fields", "NV", "ORDER", "EXACT", "FLOAT", "num_monomials"]
