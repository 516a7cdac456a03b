"""The five-dimensional construction (n = 2, Levi rank 1).

Given the adapted coframe ``(omega, omega^1, theta^2)`` on the chart, the
remaining normalizations are carried out on a local model of the structure
bundle: the chart variables are extended by group coordinates ``v`` (with
``u = v^2``) and, in Case 1, ``x``, so that

    omega   = v^2 omega_s
    omega^1 = e^{it/2} x omega_s + v omega^1_s

where ``(omega_s, omega^1_s)`` is a section on which the phase-fixing
conditions already hold.  Each normalization condition is affine in the
parameter it determines (no derivatives of the parameter enter the
coefficient that is being normalized), so parameters are solved by probing
the condition at zero and at unit values and solving the resulting linear
system over jets.  Every condition is then recomputed on the final coframe
and reported as a residual.

Case 1 (``|k_hat| = 2``) produces seven real forms
``omega, Re omega^1, Im omega^1, Re theta^2, Im theta^2, Delta, xi``; Case 2
produces the first six.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import SingularSolve, WrongCase
from .exterior import FormJet, coordinate_form, ext_d, pair, wedge
from .jetla import csqrt_jet, cval, jet_solve
from .jets import EXACT, CJet, Jet
from .normalize import AdaptedCoframe, StructureScalars, delta_form, dual_frame
from .scalars import QI, det

CASE_TOL = 1e-6
# float values of | |k_hat| - 2 | below this are treated as exactly 2
FLOAT_EXACT_TOL = 1e-9


class AmbiguousCaseWarning(UserWarning):
    """|k_hat| is within the case tolerance of 2 without being equal to it."""


# -- case classification --------------------------------------------------------------

@dataclass(frozen=True)
class CaseTag:
    """``k_hat = 2 i r e^{i t}``; Case1 iff r = 1 up to the case tolerance."""

    variant: str
    r: float
    t: float
    k_hat: object
    ambiguous: bool = False

    @property
    def group_dim(self) -> int:
        return 2 if self.variant == "Case1" else 1


def _modulus_gap(k, mode: str):
    if mode == EXACT:
        k = QI.coerce(k)
        a2 = k.abs2()
        return a2 == 4, abs(math.sqrt(float(a2)) - 2.0)
    gap = abs(abs(complex(k)) - 2.0)
    return gap <= FLOAT_EXACT_TOL, gap


def classify_case(ss: StructureScalars, case_tol: float = CASE_TOL) -> CaseTag:
    """Split on ``|k_hat(p0)|`` versus 2.

    Inside the tolerance band but not (numerically) equal to 2 the result is
    Case1 with ``ambiguous=True`` and an :class:`AmbiguousCaseWarning`.
    """
    if ss.r != 1:
        raise WrongCase(f"the five-dimensional split needs n = 2 (got r = {ss.r})")
    k = ss.k_hat
    exact_two, gap = _modulus_gap(k, ss.mode)
    kc = complex(k)
    w = kc / 2j
    r = abs(w)
    t = cmath.phase(w) if r else 0.0
    if exact_two:
        return CaseTag("Case1", r, t, k)
    if gap < case_tol:
        warnings.warn(f"|k_hat| = {abs(kc):.12g} is within {case_tol:g} of 2; treating as Case1",
                      AmbiguousCaseWarning, stacklevel=2)
        return CaseTag("Case1", r, t, k, ambiguous=True)
    return CaseTag("Case2", r, t, k)


# -- scalar (synthetic) solvers ---------------------------------------------------------

@dataclass
class SyntheticScalars:
    """Pointwise values standing in for a StructureScalars in the algebraic solvers.

    ``f``, ``m``, ``l`` (Case 1) and ``b1``, ``b2`` (Case 2) are the
    coefficients being normalized, before normalization.
    """

    k_hat: complex
    k_hat_bar1: complex = 0j
    h_hat: complex = 1.0
    t_hat: complex = 0j
    r_hat: Optional[complex] = None
    s_hat: Optional[complex] = None
    f: float = 0.0
    m: complex = 0j
    l: complex = 0j
    b1: complex = 0j
    b2: complex = 0j
    mode: str = "float"

    def __post_init__(self):
        if self.mode == EXACT:
            # binary floats (the defaults) convert to rationals without loss
            for name in ("k_hat", "k_hat_bar1", "h_hat", "t_hat", "r_hat", "s_hat",
                         "f", "m", "l", "b1", "b2"):
                v = getattr(self, name)
                if isinstance(v, (float, complex)):
                    v = complex(v)
                    setattr(self, name, QI(Fraction(v.real), Fraction(v.imag)))
        # Hermitian and trace identities for n = 2 with g = h = 1
        if self.s_hat is None:
            self.s_hat = self.k_hat / 2
        if self.r_hat is None:
            self.r_hat = self.k_hat.conjugate() / 2 if isinstance(self.k_hat, complex) \
                else QI.coerce(self.k_hat).conj() / 2

    @property
    def r(self) -> int:
        return 1


def solve_c1(k_hat, k_bar1, lam=1):
    """Solve ``k_bar1 + 2 i lam c - conj(c) k_hat = 0`` for c.

    Works for complex numbers, :class:`QI` and :class:`CJet`; the
    determinant ``4 lam^2 - |k_hat|^2`` vanishes exactly on the case boundary.
    """
    if isinstance(k_hat, CJet):
        A = _const(QI(0, 2) if k_hat.mode == EXACT else 2j, k_hat) * lam
        B = -k_hat
        detj = A * A.conj() - B * B.conj()
        if cval(detj) == 0:
            raise SingularSolve("|k_hat| = 2 lambda: the c_1 equation is not solvable")
        return (B * k_bar1.conj() - A.conj() * k_bar1) / detj
    exact = isinstance(k_hat, QI) or isinstance(k_bar1, QI)
    if exact:
        k_hat, k_bar1, lam = QI.coerce(k_hat), QI.coerce(k_bar1), QI.coerce(lam)
        A, B = QI(0, 2) * lam, -k_hat
        d = A.abs2() - B.abs2()
        if d == 0:
            raise SingularSolve("|k_hat| = 2 lambda: the c_1 equation is not solvable")
        return (B * k_bar1.conj() - A.conj() * k_bar1) / QI(d)
    A, B = 2j * lam, -complex(k_hat)
    d = abs(A) ** 2 - abs(B) ** 2
    if d == 0:
        raise SingularSolve("|k_hat| = 2 lambda: the c_1 equation is not solvable")
    kb = complex(k_bar1)
    return (B * kb.conjugate() - A.conjugate() * kb) / d


def _c(z, mode):
    if mode == EXACT:
        z = QI.coerce(z)
        return (z.re, z.im)
    z = complex(z)
    return (z.real, z.imag)


def _case1_scalar_solve(s: SyntheticScalars, tag: CaseTag) -> Tuple[Dict[str, object], Dict[str, float]]:
    """Closed-form Case 1 normalizations on pointwise values."""
    eps = cmath.exp(0.5j * tag.t)
    r = tag.r
    k, kb, t_hat = complex(s.k_hat), complex(s.k_hat_bar1), complex(s.t_hat)
    s_hat, h = complex(s.s_hat), complex(s.h_hat)
    rho2 = (eps.conjugate() * kb).real / (2 * (1 + r))
    c1 = eps * 1j * rho2
    k_tilde = kb + 2j * h * c1 - c1.conjugate() * k
    # the x^1 = i y direction of the group moves Re(e^{-it/2} t_hat)
    y0 = (2.0 / 3.0) * (eps.conjugate() * t_hat).real
    t1 = t_hat - 1.5 * eps * y0
    # adding rho1 e^{it/2} omega^1 to theta^2 moves t_hat by -rho1 (2i e^{it/2} + s e^{-it/2})
    shift = 2j * eps + s_hat * eps.conjugate()
    rho1 = (eps.conjugate() * t1).imag / (eps.conjugate() * shift).imag
    t2 = t1 - rho1 * shift
    c1 = eps * (rho1 + 1j * rho2)
    k_tilde = kb + 2j * h * c1 - c1.conjugate() * k
    # f~ = f - a/2 + i zeta - i conj(zeta), m~ = m + i e^{it} ((7r+11) zeta + 3(r+1) conj(zeta)) / (4(r+2))
    coef = 1j * eps ** 2 / (4 * (r + 2))
    p, q_ = coef * (7 * r + 11), coef * 3 * (r + 1)
    m = complex(s.m)
    # p z + q conj(z) = -m
    d = abs(p) ** 2 - abs(q_) ** 2
    zeta = (-m * p.conjugate() + q_ * m.conjugate()) / d
    a = 2 * s.f + 2j * (zeta - zeta.conjugate())
    a = a.real
    f_tilde = s.f - a / 2 + (1j * zeta - 1j * zeta.conjugate()).real
    m_tilde = m + p * zeta + q_ * zeta.conjugate()
    # l~ = l + i e^{-it/2} q
    q = -(eps * complex(s.l)).imag
    l_tilde = complex(s.l) + 1j * eps.conjugate() * q
    params = {"rho1": rho1, "rho2": rho2, "y0": y0, "a": a, "zeta": zeta, "q": q, "c1": c1}
    residuals = {
        "k_bar1_phase": abs((eps.conjugate() * k_tilde).real),
        "t_hat": abs(t2),
        "f_tilde": abs(f_tilde),
        "m_tilde": abs(m_tilde),
        "l_tilde_phase": abs((eps * l_tilde).imag),
    }
    return params, residuals


def _case2_scalar_solve(s: SyntheticScalars) -> Tuple[Dict[str, object], Dict[str, float]]:
    exact = s.mode == EXACT
    conv = QI.coerce if exact else complex
    k, kb, h = conv(s.k_hat), conv(s.k_hat_bar1), conv(s.h_hat)
    c1 = solve_c1(k, kb, 1 if not exact else QI(1))
    lam2i = QI(0, 2) * h if exact else 2j * h
    k_tilde = kb + lam2i * c1 - c1.conj() * k if exact else kb + lam2i * c1 - c1.conjugate() * k
    u1 = (QI(0, 2) / QI(3)) * conv(s.t_hat) if exact else (2j / 3) * conv(s.t_hat)
    c = conv(s.b2) / h
    b1, r_hat, s_hat = conv(s.b1), conv(s.r_hat), conv(s.s_hat)
    if exact:
        w = b1 - r_hat * c + s_hat * c.conj()
        a = -2 * w.re
        b1_tilde = w.re + a / 2
        b2_tilde = conv(s.b2) - h * c
    else:
        w = b1 - r_hat * c + s_hat * c.conjugate()
        a = -2 * w.real
        b1_tilde = w.real + a / 2
        b2_tilde = conv(s.b2) - h * c
    params = {"c1": c1, "u1": u1, "c": c, "a": a}
    residuals = {"k_bar1": abs(complex(k_tilde)), "b2_tilde": abs(complex(b2_tilde)),
                 "b1_tilde_real": abs(float(b1_tilde))}
    return params, residuals


# -- jet helpers --------------------------------------------------------------------------

def _const(value, like: CJet) -> CJet:
    return CJet.constant(_c(value, like.mode), like.nvars, like.order, like.mode)


def _real(f: CJet) -> CJet:
    return CJet(f.re)


def _imag(f: CJet) -> CJet:
    return CJet(f.im)


def _solve_affine(build: Callable[[List[CJet]], Tuple[List[CJet], object]], n: int,
                  like: CJet, what: str):
    """Solve ``build(params)[0] == 0`` for n real parameter jets.

    ``build`` must be affine in its parameters at the level of values (which
    the normalizations guarantee); the caller recomputes residuals.
    """
    zero = [_const(0, like) for _ in range(n)]
    F0, _ = build(zero)
    cols = []
    for j in range(n):
        e = list(zero)
        e[j] = _const(1, like)
        Fj, _ = build(e)
        cols.append([a - b for a, b in zip(Fj, F0)])
    A = [[cols[j][i] for j in range(n)] for i in range(len(F0))]
    rhs = [[-f] for f in F0]
    try:
        sol = jet_solve(A, rhs)
    except SingularSolve as exc:
        raise SingularSolve(f"normalization for {what} is degenerate at p0") from exc
    params = [_real(row[0]) for row in sol]
    sens = [[cval(x) for x in row] for row in A]
    return params, sens


def _std_coframe(om, w1, th2, extra):
    cof = [om, w1, th2, w1.conj(), th2.conj()] + list(extra)
    return cof, dual_frame(cof)


def _t_hat(om, w1, X, cof, Delta=None):
    D = delta_form(om, X, cof) if Delta is None else Delta
    Phi = ext_d(w1) - wedge(D, w1) * _half(om.mode)
    return pair(Phi, [X[3], X[1]]), D


def _half(mode):
    return Fraction(1, 2) if mode == EXACT else 0.5


def _phase_jets(k_hat: CJet):
    """``(r, e^{it/2})`` as jets from ``k_hat = 2 i r e^{it}`` (principal root)."""
    mode = k_hat.mode
    w = k_hat * _c(QI(0, -1) / 2 if mode == EXACT else -0.5j, mode)
    r2 = (w * w.conj()).re
    r = r2.sqrt()
    if cval(CJet(r)) == 0:
        raise SingularSolve("k_hat vanishes at p0")
    e_it = w * CJet(r).inverse()
    return r, csqrt_jet(e_it)


def _residual(f) -> float:
    return f.max_abs() if f is not None else 0.0


def _forms_rank_det(forms: Sequence[FormJet]):
    nv = forms[0].nvars
    rows = []
    for f in forms:
        row = []
        for k in range(nv):
            c = f.coeff((k,))
            row.append(cval(c))
        rows.append(row)
    return det(rows, forms[0].mode)


# -- parallelism data ---------------------------------------------------------------------

@dataclass
class ParallelismData:
    """Normalized coframe on the local bundle model (or scalar solves only)."""

    case: CaseTag
    forms: Dict[str, FormJet]
    params: Dict[str, object]
    residuals: Dict[str, float]
    group_dim: int
    mode: str
    orientation: int = 1
    factors: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    coframe_det: object = None
    bundle_vars: Tuple[str, ...] = ()
    raw: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def synthetic(self) -> bool:
        return not self.forms

    def real_coframe(self) -> List[FormJet]:
        f = self.forms
        out = [f["omega"], f["omega1"].real_part(), f["omega1"].imag_part(),
               f["theta2"].real_part(), f["theta2"].imag_part(), f["Delta"]]
        if "xi" in f:
            out.append(f["xi"])
        return out

    def max_residual(self) -> float:
        return max([0.0] + list(self.residuals.values()))


def _lift(cof: AdaptedCoframe, nv: int):
    return cof.theta.lifted(nv), cof.theta_alpha[0].lifted(nv), cof.theta_n.lifted(nv)


def _check_input(ss, cof):
    if ss.r != 1 or (cof is not None and cof.r != 1):
        raise WrongCase("the five-dimensional construction needs n = 2")


def solve_case1(ss, cof: Optional[AdaptedCoframe] = None, tag: Optional[CaseTag] = None) -> ParallelismData:
    """Case 1 (``|k_hat(p0)| = 2``): determine theta^2, Delta and xi.

    With ``cof=None`` and :class:`SyntheticScalars` input, only the pointwise
    algebraic solves are performed.
    """
    tag = tag or classify_case(ss)
    if tag.variant != "Case1":
        raise WrongCase("solve_case1 needs |k_hat(p0)| = 2")
    factors = {"t_shift": 1 + tag.r / 2, "rho1_gauge": 3 / (2 * (2 + tag.r))}
    if cof is None:
        params, res = _case1_scalar_solve(ss, tag)
        return ParallelismData(tag, {}, params, res, 2, getattr(ss, "mode", "float"), factors=factors)
    _check_input(ss, cof)
    mode = cof.mode
    half = _half(mode)
    warn: List[str] = list(["AmbiguousCase"] if tag.ambiguous else [])
    om5, w15, th25 = cof.theta, cof.theta_alpha[0], cof.theta_n
    k_hat = ss.jets["k_hat"]
    r_jet, eps5 = _phase_jets(k_hat)
    if any(not c.is_zero(1e-12 if mode != EXACT else 0.0) for c in _first_order(eps5)):
        warn.append("t_nonconstant")
    # -- section: fix rho2 then move Re(e^{-it/2} t_hat) to zero with x^1 = i e^{it/2} y
    ieps5 = eps5 * _c(1j if mode != EXACT else QI(0, 1), mode)

    def sec_rho2(p):
        th2 = th25 + w15 * (ieps5 * p[0])
        cof_, X = _std_coframe(om5, w15, th2, [])
        kt = pair(ext_d(th2), [X[3], X[2]])
        return [_real(eps5.conj() * kt)], th2

    (rho2_s,), _ = _solve_affine(sec_rho2, 1, k_hat, "rho2 on the section")
    _, th2_sec = sec_rho2([rho2_s])

    def sec_y(p):
        w1 = w15 + om5 * (ieps5 * p[0])
        cof_, X = _std_coframe(om5, w1, th2_sec, [])
        t, _ = _t_hat(om5, w1, X, cof_)
        return [_real(eps5.conj() * t)], w1

    (y0,), _ = _solve_affine(sec_y, 1, k_hat, "the section phase")
    _, w1_sec = sec_y([y0])
    # -- bundle model: chart + (v - 1, x)
    nv = om5.nvars + 2
    om_s, w1_s, th2_s = om5.lifted(nv), w1_sec.lifted(nv), th25.lifted(nv)
    eps = eps5.lifted(nv)
    order = min(om_s.order, w1_s.order, th2_s.order, eps.order)
    V = CJet(Jet.variable(nv - 2, nv, order, mode, value=1))
    x = CJet(Jet.variable(nv - 1, nv, order, mode))
    dv, dx = coordinate_form(nv - 2, nv, order, mode), coordinate_form(nv - 1, nv, order, mode)
    omega = om_s * (V * V)
    omega1 = om_s * (eps * x) + w1_s * V
    like = eps.truncate(min(eps.order, order))

    def step_rho(p):
        c1 = eps * (p[0] + p[1] * _c(1j if mode != EXACT else QI(0, 1), mode))
        th2 = th2_s + omega1 * c1
        cof_, X = _std_coframe(omega, omega1, th2, [dv, dx])
        kt = pair(ext_d(th2), [X[3], X[2]])
        t, D = _t_hat(omega, omega1, X, cof_)
        return [_real(eps.conj() * kt), _imag(eps.conj() * t)], (th2, X, cof_, D)

    (rho1, rho2), sens_rho = _solve_affine(step_rho, 2, like, "(rho1, rho2)")
    _, (theta2, X, cof_b, Delta) = step_rho([rho1, rho2])
    eps2 = eps * eps

    def step_azeta(p):
        a, zr, zi = p
        th2 = theta2 + omega * (eps2 * (zr + zi * _c(1j if mode != EXACT else QI(0, 1), mode)))
        D = Delta + omega * a
        cof1, X1 = _std_coframe(omega, omega1, th2, [dv, dx])
        Phi = ext_d(omega1) - wedge(D, omega1) * half
        W = None
        for b in range(1, 7):
            c = pair(Phi, [X1[0], X1[b]])
            if c.is_zero():
                continue
            t = cof1[b] * (-c)
            W = t if W is None else W + t
        xi = (W * eps.conj()).real_part()
        cof2, X2 = _std_coframe(omega, omega1, th2, [D, xi])
        dD, dth2 = ext_d(D), ext_d(th2)
        f = pair(dD, [X2[3], X2[1]]) * _c(-1j if mode != EXACT else QI(0, -1), mode)
        m = pair(dth2, [X2[3], X2[1]])
        return [_real(f), _real(m), _imag(m)], (th2, D, xi)

    (a, zr, zi), sens_az = _solve_affine(step_azeta, 3, like.truncate(like.order - 1),
                                          "(a, zeta)")
    _, (theta2, Delta, xi) = step_azeta([a, zr, zi])

    def step_q(p):
        xq = xi + omega * p[0]
        cof3, X3 = _std_coframe(omega, omega1, theta2, [Delta, xq])
        l = pair(ext_d(Delta), [X3[1], X3[0]])
        return [_imag(eps * l)], xq

    (q,), sens_q = _solve_affine(step_q, 1, like.truncate(like.order - 2), "q")
    _, xi = step_q([q])
    forms = {"omega": omega, "omega1": omega1, "theta2": theta2, "Delta": Delta, "xi": xi}
    residuals = _case1_residuals(forms, eps)
    residuals["Delta_real"] = _residual(Delta.imag_part())
    if mode == EXACT:
        pv = lambda j: QI.coerce(cval(j)).re
    else:
        pv = lambda j: cval(j).real
    params = {"rho1": pv(rho1), "rho2": pv(rho2), "rho2_section": pv(rho2_s),
              "y0": pv(y0), "a": pv(a), "zeta": _cplx(cval(zr), cval(zi), mode), "q": pv(q)}
    data = ParallelismData(tag, forms, params, residuals, 2, mode, cof.orientation, factors, warn,
                           bundle_vars=("v", "x"))
    data.coframe_det = _forms_rank_det(data.real_coframe())
    data.raw.update({"eps": eps, "r": r_jet.lifted(nv), "param_jets": {"rho1": rho1, "rho2": rho2, "a": a,
                     "zeta_re": zr, "zeta_im": zi, "q": q},
                     "sensitivities": {"rho": sens_rho, "a_zeta": sens_az, "q": sens_q}})
    return data


def _cplx(re, im, mode):
    if mode == EXACT:
        return QI(QI.coerce(re).re, QI.coerce(im).re)
    return complex(re.real, im.real)


def _first_order(f: CJet) -> List[CJet]:
    return [f.partial(k).truncate(0) for k in range(f.nvars)] if f.order >= 1 else []


def _case1_residuals(forms: Dict[str, FormJet], eps: CJet) -> Dict[str, float]:
    """Recompute every Case 1 normalization on the final coframe."""
    omega, omega1, theta2 = forms["omega"], forms["omega1"], forms["theta2"]
    Delta, xi = forms["Delta"], forms["xi"]
    mode = omega.mode
    cof, X = _std_coframe(omega, omega1, theta2, [Delta, xi])
    dth2, dD = ext_d(theta2), ext_d(Delta)
    kt = pair(dth2, [X[3], X[2]])
    Phi = ext_d(omega1) - wedge(Delta, omega1) * _half(mode)
    t = pair(Phi, [X[3], X[1]])
    f = pair(dD, [X[3], X[1]])
    m = pair(dth2, [X[3], X[1]])
    l = pair(dD, [X[1], X[0]])
    return {
        "k_bar1_phase": _residual((eps.conj() * kt).re),
        "t_hat": _residual(t),
        "f_tilde": _residual(f),
        "m_tilde": _residual(m),
        "l_tilde_phase": _residual((eps * l).im),
    }


def solve_case2(ss, cof: Optional[AdaptedCoframe] = None, tag: Optional[CaseTag] = None) -> ParallelismData:
    """Case 2 (``|k_hat(p0)| != 2``): determine theta^2 and Delta."""
    tag = tag or classify_case(ss)
    if tag.variant != "Case2":
        raise WrongCase("solve_case2 needs |k_hat(p0)| != 2")
    if cof is None:
        params, res = _case2_scalar_solve(ss)
        return ParallelismData(tag, {}, params, res, 1, getattr(ss, "mode", "float"))
    _check_input(ss, cof)
    mode = cof.mode
    half = _half(mode)
    iu = _c(1j if mode != EXACT else QI(0, 1), mode)
    om5, w15, th25 = cof.theta, cof.theta_alpha[0], cof.theta_n
    k_hat = ss.jets["k_hat"]

    def kbar1(th2, w1):
        cof_, X = _std_coframe(om5, w1, th2, [])
        return pair(ext_d(th2), [X[3], X[2]]), X, cof_

    def sec_c1(p):
        th2 = th25 + w15 * (p[0] + p[1] * iu)
        kt, _, _ = kbar1(th2, w15)
        return [_real(kt), _imag(kt)], th2

    (c1r, c1i), _ = _solve_affine(sec_c1, 2, k_hat, "c1 on the section")
    _, th2_sec = sec_c1([c1r, c1i])
    # second route: the closed form in terms of k_hat and k_bar1 of the raw frame
    kb_raw, _, _ = kbar1(th25, w15)
    c1_formula = solve_c1(k_hat, kb_raw)
    c1_gap = _residual(c1_formula - (c1r + c1i * iu))

    def sec_u1(p):
        w1 = w15 + om5 * (p[0] + p[1] * iu)
        cof_, X = _std_coframe(om5, w1, th2_sec, [])
        t, _ = _t_hat(om5, w1, X, cof_)
        return [_real(t), _imag(t)], w1

    (u1r, u1i), _ = _solve_affine(sec_u1, 2, k_hat, "u1 on the section")
    _, w1_sec = sec_u1([u1r, u1i])
    nv = om5.nvars + 1
    om_s, w1_s, th2_s = om5.lifted(nv), w1_sec.lifted(nv), th25.lifted(nv)
    order = min(om_s.order, w1_s.order, th2_s.order)
    V = CJet(Jet.variable(nv - 1, nv, order, mode, value=1))
    dv = coordinate_form(nv - 1, nv, order, mode)
    omega = om_s * (V * V)
    omega1 = w1_s * V
    like = k_hat.lifted(nv)

    def step_c1(p):
        th2 = th2_s + omega1 * (p[0] + p[1] * iu)
        cof_, X = _std_coframe(omega, omega1, th2, [dv])
        kt = pair(ext_d(th2), [X[3], X[2]])
        return [_real(kt), _imag(kt)], (th2, X, cof_)

    (b1r, b1i), _ = _solve_affine(step_c1, 2, like, "c1")
    _, (theta2, X, cof_b) = step_c1([b1r, b1i])
    Delta = delta_form(omega, X, cof_b)

    def step_ca(p):
        cr, ci, a = p
        th2 = theta2 + omega * (cr + ci * iu)
        D = Delta + omega * a
        cof2, X2 = _std_coframe(omega, omega1, th2, [D])
        Phi = ext_d(omega1) - wedge(D, omega1) * half
        b2 = pair(Phi, [X2[3], X2[0]])
        b1 = pair(Phi, [X2[1], X2[0]])
        return [_real(b2), _imag(b2), _real(b1)], (th2, D)

    (cr, ci, a), sens = _solve_affine(step_ca, 3, like.truncate(like.order - 1), "(c, a)")
    _, (theta2, Delta) = step_ca([cr, ci, a])
    forms = {"omega": omega, "omega1": omega1, "theta2": theta2, "Delta": Delta}
    residuals = _case2_residuals(forms)
    residuals["Delta_real"] = _residual(Delta.imag_part())
    residuals["c1_routes"] = c1_gap
    params = {"c1": _cplx(cval(c1r), cval(c1i), mode), "u1": _cplx(cval(u1r), cval(u1i), mode),
              "c": _cplx(cval(cr), cval(ci), mode),
              "a": QI.coerce(cval(a)).re if mode == EXACT else cval(a).real}
    data = ParallelismData(tag, forms, params, residuals, 1, mode, cof.orientation,
                           warnings=[], bundle_vars=("v",))
    data.coframe_det = _forms_rank_det(data.real_coframe())
    data.raw["sensitivities"] = sens
    return data


def _case2_residuals(forms: Dict[str, FormJet]) -> Dict[str, float]:
    omega, omega1, theta2, Delta = forms["omega"], forms["omega1"], forms["theta2"], forms["Delta"]
    cof, X = _std_coframe(omega, omega1, theta2, [Delta])
    kt = pair(ext_d(theta2), [X[3], X[2]])
    Phi = ext_d(omega1) - wedge(Delta, omega1) * _half(omega.mode)
    t = pair(Phi, [X[3], X[1]])
    return {
        "k_bar1": _residual(kt),
        "t_hat": _residual(t),
        "b2_tilde": _residual(pair(Phi, [X[3], X[0]])),
        "b1_tilde_real": _residual(pair(Phi, [X[1], X[0]]).re),
    }


def solve(ss: StructureScalars, cof: AdaptedCoframe, case_tol: float = CASE_TOL) -> ParallelismData:
    """Classify and run the matching chain."""
    tag = classify_case(ss, case_tol)
    if tag.variant == "Case1":
        return solve_case1(ss, cof, tag)
    return solve_case2(ss, cof, tag)


# -- n >= 3 --------------------------------------------------------------------------------

def higher_dim_gate(ss, lambdas: Optional[Sequence[float]] = None, tol: float = CASE_TOL) -> Dict[str, object]:
    """Compare ``|k_hat|`` with ``2 lambda_mu`` for every Levi index (no construction).

    ``lambdas`` default to the diagonal of ``h_hat`` at p0.
    """
    if lambdas is None:
        lambdas = [abs(complex(ss.h_hat[m][m])) for m in range(len(ss.h_hat))]
    k = abs(complex(ss.k_hat))
    per = []
    exceptional = []
    for mu, lam in enumerate(lambdas, start=1):
        gap = abs(k - 2 * float(lam))
        per.append({"index": mu, "lambda": float(lam), "gap": gap})
        if gap < tol:
            exceptional.append(mu)
    branch = "solvable" if not exceptional else "exceptional"
    return {"branch": branch, "exceptional_indices": exceptional, "per_index": per,
            "k_hat_modulus": k}
