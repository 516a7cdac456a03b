"""Adapted coframes, Levi/third-order normalization and structure scalars.

Everything in this module lives on the chart of M (see
:class:`crinv.hypersurface.Chart`), where the structure equations hold as
jet identities rather than modulo ``rho``.

Starting coframe: ``theta`` (the real characteristic form) and
``theta^A = i dZ_j`` for the n complex coordinates other than the solved
one.  The steps are

1. replace one ``theta^A`` direction by a Levi-null field (rank n - 1);
2. normalize the Levi block: ``omega = theta / G_11`` for r = 1, or a sign
   and a Cholesky factor of the r x r block for r >= 2, so that
   ``d omega = i omega^{mu bar} ^ omega^mu`` mod omega;
3. scale ``theta^n`` so that ``h_hat`` has trace 1 (for r = 1 this makes
   ``h_hat = 1`` identically);
4. apply the orientation sign to ``omega^alpha``.

Structure scalars come from expanding ``d omega``, ``Phi^alpha = d omega^alpha
- Delta ^ omega^alpha / 2`` and ``d theta^n`` in the coframe
``(omega, omega^alpha, theta^n, conj omega^alpha, conj theta^n)``, with
``Delta = -sum_b d omega(X_0, X_b) e^b``.  For the coefficient of
``omega^{mu bar} ^ theta^n`` in ``d omega^alpha`` we use ``h^alpha_{mu bar}``
and ``h_hat = h / 2i``, which is the normalization under which the light cone
has ``k_hat = 2i``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from .cr_core import LeviData, Psi3Data, levi_form, signature_class
from .errors import (
    ConditionDefiniteFails,
    ConditionDistinctFails,
    ConvergenceFailure,
    ExpansionSingular,
    IrrationalResult,
    Not2Nondegenerate,
    NotInGroup,
    NotRankNMinus1,
    SingularSolve,
    TakagiFailure,
)
from .exterior import FormJet, VectorJet, ext_d, interior, pair, wedge
from .hypersurface import Chart, CRFrame
from .jetla import csqrt_scalar, cval, jet_inverse, jet_solve
from .jets import EXACT, FLOAT, CJet, exact_sqrt
from .scalars import QI, argmax_tied, det

DISTINCT_TOL = 1e-8


def _i(mode):
    return (0, 1)


def _minus_i(mode):
    return (0, -1)


def _half(mode):
    return Fraction(1, 2) if mode == EXACT else 0.5


def _inv_2i(mode):
    return (0, Fraction(-1, 2)) if mode == EXACT else (0.0, -0.5)


# -- frames ------------------------------------------------------------------------------

def dual_frame(coframe: Sequence[FormJet]) -> List[VectorJet]:
    """Vector fields X_k with e^j(X_k) = delta^j_k."""
    nv = coframe[0].nvars
    if len(coframe) != nv:
        raise ExpansionSingular(f"{len(coframe)} forms in {nv} variables")
    mat = [f.components() for f in coframe]
    try:
        inv = jet_inverse(mat)
    except SingularSolve as exc:
        raise ExpansionSingular("coframe does not span at the base point") from exc
    return [VectorJet([inv[i][k] for i in range(nv)]) for k in range(nv)]


def expand(form: FormJet, frame: Sequence[VectorJet], coframe: Sequence[FormJet]) -> FormJet:
    """Re-assemble a 1-form from its frame components (used to check spans)."""
    out = None
    for X, e in zip(frame, coframe):
        t = e * pair(form, [X])
        out = t if out is None else out + t
    return out


# -- Takagi -------------------------------------------------------------------------------

def takagi_diagonalize(h, mode: str = FLOAT):
    """Unitary ``v`` and ``lambdas`` (descending) with ``conj(v) h conj(v)^T = diag``.

    Float mode uses the real symmetric embedding ``[[Re h, Im h], [Im h, -Re h]]``:
    its eigenvectors ``(x, y)`` for positive eigenvalues give Takagi vectors
    ``w = x + i y`` with ``h conj(w) = sigma w``.  Exact mode handles 1 x 1.
    """
    r = len(h)
    if mode == EXACT:
        if r != 1:
            raise IrrationalResult("exact Takagi factorization is only implemented for r = 1")
        c = QI.coerce(h[0][0])
        if c == 0:
            return [[QI(1)]], [QI(0)]
        lam = exact_sqrt(c.abs2())
        vbar = csqrt_scalar(c.conj() / lam, EXACT)
        return [[vbar.conj()]], [lam]
    a = np.array([[complex(x) for x in row] for row in h], dtype=complex)
    if not np.allclose(a, a.T, atol=1e-10 * max(1.0, np.abs(a).max())):
        raise TakagiFailure("matrix is not symmetric")
    big = np.block([[a.real, a.imag], [a.imag, -a.real]])
    ev, vec = np.linalg.eigh(big)
    idx = np.argsort(ev)[::-1][:r]
    lam = ev[idx]
    w = vec[:r, idx] + 1j * vec[r:, idx]
    recon = w @ np.diag(lam) @ w.T
    if not np.allclose(recon, a, atol=1e-9 * max(1.0, np.abs(a).max())):
        raise ConvergenceFailure("Takagi reconstruction failed")
    lam = np.clip(lam, 0.0, None)
    v = w.T
    return [list(row) for row in v], [float(x) for x in lam]


# -- adapted coframe ---------------------------------------------------------------------------

@dataclass
class AdaptedCoframe:
    """Normalized coframe on the chart: omega, omega^alpha (r), theta^n."""

    chart: Chart
    theta: FormJet
    theta_alpha: List[FormJet]
    theta_n: FormJet
    orientation: int
    lambdas: List[object]
    mode: str
    null_index: int
    levi_sign: str
    raw: Dict[str, object] = field(default_factory=dict)

    @property
    def r(self) -> int:
        return len(self.theta_alpha)

    @property
    def order(self) -> int:
        return min([self.theta.order, self.theta_n.order] + [f.order for f in self.theta_alpha])

    def forms(self) -> List[FormJet]:
        return ([self.theta] + list(self.theta_alpha) + [self.theta_n]
                + [f.conj() for f in self.theta_alpha] + [self.theta_n.conj()])

    def frame(self) -> List[VectorJet]:
        cached = self.raw.get("_frame")
        if cached is None:
            cached = dual_frame(self.forms())
            self.raw["_frame"] = cached
        return cached

    def transformed(self, u, u_alpha: Sequence[object]) -> "AdaptedCoframe":
        """Apply the constant G_1 element: omega -> u omega, omega^a -> u^a omega + sqrt(u) omega^a."""
        mode = self.mode
        su = csqrt_scalar(u, mode)
        om = self.theta * _parts(u, mode)
        al = [self.theta * _parts(ua, mode) + f * _parts(su, mode)
              for ua, f in zip(u_alpha, self.theta_alpha)]
        return AdaptedCoframe(self.chart, om, al, self.theta_n, self.orientation, self.lambdas,
                              mode, self.null_index, self.levi_sign)


def _parts(z, mode):
    if mode == EXACT:
        z = QI.coerce(z)
        return (z.re, z.im)
    z = _as_complex(z)
    return (z.real, z.imag)


def _as_complex(z) -> complex:
    if isinstance(z, tuple):
        return complex(float(z[0]), float(z[1]))
    return complex(z)


def _null_index(G0, n: int, mode: str) -> int:
    """Index replaced by the null field: largest |det G_II| over I = others (ties: last)."""
    mags = []
    for j in range(n):
        I = [a for a in range(n) if a != j]
        sub = [[G0[a][b] for b in I] for a in I]
        d = det(sub, mode) if I else (QI(1) if mode == EXACT else 1.0)
        mags.append(QI.coerce(d).abs2() if mode == EXACT else abs(complex(d)) ** 2)
    return argmax_tied(mags, mode, last=True)


def _jet_cholesky(G: List[List[CJet]]) -> List[List[CJet]]:
    """Upper-triangular R with G = R^H R for a positive definite Hermitian jet matrix."""
    r = len(G)
    mode = G[0][0].mode
    z = CJet.zero(G[0][0].nvars, G[0][0].order, mode)
    R = [[z for _ in range(r)] for _ in range(r)]
    for i in range(r):
        acc = G[i][i]
        for k in range(i):
            acc = acc - R[k][i].conj() * R[k][i]
        d = acc.re.sqrt()
        R[i][i] = CJet(d)
        inv = d.inverse()
        for j in range(i + 1, r):
            acc = G[i][j]
            for k in range(i):
                acc = acc - R[k][i].conj() * R[k][j]
            R[i][j] = acc * inv
    return R


def _levi_matrix(omega: FormJet, frame: Sequence[VectorJet], idx_bar: Sequence[int],
                 idx: Sequence[int]) -> List[List[CJet]]:
    d = ext_d(omega)
    mi = _minus_i(omega.mode)
    return [[pair(d, [frame[a], frame[b]]) * mi for b in idx] for a in idx_bar]


def build_adapted_coframe(frame: CRFrame, levi: Optional[LeviData] = None,
                          psi3: Optional[Psi3Data] = None, orientation: int = 1,
                          order: Optional[int] = None) -> AdaptedCoframe:
    """Normalized coframe at p0 (see module docstring for the steps)."""
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    levi = levi or levi_form(frame)
    n = frame.n
    if levi.rank != n - 1 or n < 2:
        raise NotRankNMinus1(f"Levi rank {levi.rank}, expected {n - 1}")
    if levi.definite_on_complement not in ("positive", "negative"):
        raise ConditionDefiniteFails(f"restricted Levi form is {levi.definite_on_complement}")
    mode = frame.mode
    ch = frame.chart(order)
    th = ch.theta()
    others = [j for j in range(ch.rho.n_plus_1) if j != ch.k]
    thA = [ch.dZ(j) * (0, 1) for j in others]
    cof0 = [th] + thA + [f.conj() for f in thA]
    X = dual_frame(cof0)
    G = _levi_matrix(th, X, range(1 + n, 1 + 2 * n), range(1, 1 + n))
    G0 = [[cval(x) for x in row] for row in G]
    j = _null_index(G0, n, mode)
    I = [a for a in range(n) if a != j]
    # null field v: v_j = 1, v_I = -G_II^{-1} G_Ij
    one = CJet.constant(1, G[0][0].nvars, G[0][0].order, mode)
    zero = CJet.zero(G[0][0].nvars, G[0][0].order, mode)
    v = [zero] * n
    v[j] = one
    if I:
        sol = jet_solve([[G[a][b] for b in I] for a in I], [[-G[a][j]] for a in I])
        for row, a in enumerate(I):
            v[a] = sol[row][0]
    # new basis of fields: e_a (a in I) then v; coframe = P^{-1} theta^A
    P = [[zero] * n for _ in range(n)]
    for c, a in enumerate(I):
        P[a][c] = one
    for a in range(n):
        P[a][n - 1] = v[a]
    Pinv = jet_inverse(P)
    new_th = []
    for c in range(n):
        acc = None
        for a in range(n):
            if Pinv[c][a].is_zero():
                continue
            t = thA[a] * Pinv[c][a]
            acc = t if acc is None else acc + t
        new_th.append(acc)
    r = n - 1
    GI = [[G[a][b] for b in I] for a in I]
    sign = signature_class([[G0[a][b] for b in I] for a in I], mode)
    if r == 1:
        u = GI[0][0].re.inverse()
        omega = th * u
        alpha = [new_th[0]]
    else:
        s = 1 if sign == "positive" else -1
        omega = th * s
        R = _jet_cholesky([[x * s for x in row] for row in GI])
        alpha = []
        for a in range(r):
            acc = None
            for b in range(a, r):
                t = new_th[b] * R[a][b]
                acc = t if acc is None else acc + t
            alpha.append(acc)
    theta_n = new_th[n - 1]
    # third-order block h_hat = dw^a(X_{b bar}, X_n) / 2i
    cof = [omega] + alpha + [theta_n] + [f.conj() for f in alpha] + [theta_n.conj()]
    Y = dual_frame(cof)
    nidx = 1 + r
    c2i = _inv_2i(mode)
    hh = [[pair(ext_d(alpha[a]), [Y[2 + r + b], Y[nidx]]) * c2i for b in range(r)] for a in range(r)]
    hh0 = [[cval(x) for x in row] for row in hh]
    if all(abs(complex(x)) == 0 for row in hh0 for x in row):
        raise Not2Nondegenerate("third-order block vanishes at p0")
    raw = {"G": G0, "null_vector": [cval(x) for x in v], "h_raw": hh0}
    if r == 1:
        theta_n = theta_n * hh[0][0]
        lambdas = [QI(1) if mode == EXACT else 1.0]
    else:
        if mode == EXACT:
            raise IrrationalResult("the r >= 2 normalization needs float mode")
        dval = np.linalg.det(np.array([[complex(x) for x in row] for row in hh0]))
        phase = cmath.exp(1j * cmath.phase(dval) / r)
        # theta^n -> phase * theta^n divides h_hat by phase
        hp = [[complex(x) / phase for x in row] for row in hh0]
        vmat, lam = takagi_diagonalize(hp, FLOAT)
        vbar = np.conj(np.array(vmat))
        alpha = [_combine(alpha, vbar[a]) for a in range(r)]
        theta_n = theta_n * (phase.real, phase.imag)
        # trace normalization as a jet identity: theta^n -> tr(h_hat) theta^n
        cof = [omega] + alpha + [theta_n] + [f.conj() for f in alpha] + [theta_n.conj()]
        Y = dual_frame(cof)
        tr = None
        for a in range(r):
            t = pair(ext_d(alpha[a]), [Y[2 + r + a], Y[nidx]]) * c2i
            tr = t if tr is None else tr + t
        theta_n = theta_n * tr
        total = sum(lam)
        lambdas = [x / total for x in lam]
        if any(x <= DISTINCT_TOL for x in lambdas) or any(
                lambdas[i] - lambdas[i + 1] <= DISTINCT_TOL for i in range(r - 1)):
            raise ConditionDistinctFails(f"lambdas {lambdas} are not distinct and positive")
    if orientation == -1:
        alpha = [-f for f in alpha]
    return AdaptedCoframe(ch, omega, alpha, theta_n, orientation, lambdas, mode, j + 1,
                          levi.definite_on_complement, raw)


def _combine(forms: Sequence[FormJet], coeffs) -> FormJet:
    acc = None
    for f, c in zip(forms, coeffs):
        c = complex(c)
        if c == 0:
            continue
        t = f * (c.real, c.imag)
        acc = t if acc is None else acc + t
    return acc


# -- structure scalars --------------------------------------------------------------------------

@dataclass
class StructureScalars:
    """Values at p0 (``*_jet`` entries keep the jets)."""

    g_hat: List[List[object]]
    h_hat: List[List[object]]
    h_upper: List[List[object]]
    t_hat: List[List[List[object]]]
    r_hat: List[List[object]]
    s_hat: List[List[object]]
    q_hat: List[List[List[object]]]
    k_hat: object
    k_hat_mu: List[object]
    residuals: Dict[str, float]
    mode: str
    jets: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def r(self) -> int:
        return len(self.g_hat)


def delta_form(omega: FormJet, frame: Sequence[VectorJet], coframe: Sequence[FormJet],
               d_omega: Optional[FormJet] = None) -> FormJet:
    """Delta with d omega = Delta ^ omega + (no omega terms), zero omega component."""
    d = ext_d(omega) if d_omega is None else d_omega
    out = None
    for b in range(1, len(coframe)):
        c = pair(d, [frame[0], frame[b]])
        if c.is_zero():
            continue
        t = coframe[b] * (-c)
        out = t if out is None else out + t
    if out is None:
        out = FormJet.zero(omega.nvars, 1, d.order, omega.mode)
    return out


def _max(vals) -> float:
    return max([0.0] + [abs(complex(x)) for x in vals])


def structure_scalars(cof: AdaptedCoframe, frame: Optional[CRFrame] = None) -> StructureScalars:
    """Expand d omega, d omega^alpha, d theta^n in the adapted coframe at p0."""
    return extract_scalars(cof.theta, cof.theta_alpha, cof.theta_n, cof.mode)


def extract_scalars(omega: FormJet, alpha: Sequence[FormJet], theta_n: FormJet,
                    mode: str, frame: Optional[List[VectorJet]] = None) -> StructureScalars:
    r = len(alpha)
    cofr = [omega] + list(alpha) + [theta_n] + [f.conj() for f in alpha] + [theta_n.conj()]
    X = frame or dual_frame(cofr)
    A = [1 + a for a in range(r)]
    N = 1 + r
    Ab = [2 + r + a for a in range(r)]
    Nb = 2 + 2 * r
    d_om = ext_d(omega)
    Delta = delta_form(omega, X, cofr, d_om)
    mi = _minus_i(mode)
    g = [[pair(d_om, [X[Ab[a]], X[A[b]]]) * mi for b in range(r)] for a in range(r)]
    # residual of d omega outside Delta ^ omega + i g w^{mu bar} ^ w^nu
    res_dw = []
    pairs = [(a, b) for a in range(1, len(cofr)) for b in range(a + 1, len(cofr))]
    allowed = {(x, y) for x in A for y in Ab} | {(y, x) for x in A for y in Ab}
    for a, b in pairs:
        if (a, b) in allowed:
            continue
        res_dw.append(pair(d_om, [X[a], X[b]]).cvalue())
    half = _half(mode)
    Phi = [ext_d(f) - wedge(Delta, f) * half for f in alpha]
    t = [[[pair(P, [X[Ab[m]], X[A[nu]]]) for nu in range(r)] for m in range(r)] for P in Phi]
    h_up = [[pair(P, [X[Ab[m]], X[N]]) for m in range(r)] for P in Phi]
    rr = [[pair(P, [X[A[nu]], X[N]]) for nu in range(r)] for P in Phi]
    ss = [[pair(P, [X[Nb], X[A[nu]]]) for nu in range(r)] for P in Phi]
    qq = [[[pair(P, [X[A[a]], X[A[b]]]) * (-half) for b in range(r)] for a in range(r)] for P in Phi]
    res_phi = []
    for P in Phi:
        for a in Ab:
            for b in Ab:
                if a < b:
                    res_phi.append(pair(P, [X[a], X[b]]).cvalue())
            res_phi.append(pair(P, [X[a], X[Nb]]).cvalue())
        res_phi.append(pair(P, [X[Nb], X[N]]).cvalue())
    d_n = ext_d(theta_n)
    k_hat = pair(d_n, [X[Nb], X[N]])
    k_mu = [pair(d_n, [X[Ab[m]], X[N]]) for m in range(r)]
    c2i = _inv_2i(mode)
    # h_hat_{a b} = g_{a mu} h^mu_b / 2i
    h_hat = [[None] * r for _ in range(r)]
    for a in range(r):
        for b in range(r):
            acc = None
            for m in range(r):
                term = g[a][m] * h_up[m][b]
                acc = term if acc is None else acc + term
            h_hat[a][b] = acc * c2i
    V = lambda M: [[cval(x) for x in row] for row in M]
    g0, hh0, hu0, r0, s0 = V(g), V(h_hat), V(h_up), V(rr), V(ss)
    t0 = [V(x) for x in t]
    q0 = [V(x) for x in qq]
    k0 = cval(k_hat)
    km0 = [cval(x) for x in k_mu]
    # g_{mu eta} s^eta_nu = conj(g_{nu xi} r^xi_mu)
    res237 = []
    for m in range(r):
        for nu in range(r):
            lhs = sum((g0[m][e] * s0[e][nu] for e in range(r)), _zero(mode))
            rhs = sum((g0[nu][x] * r0[x][m] for x in range(r)), _zero(mode))
            res237.append(complex(lhs) - complex(rhs).conjugate())
    # k = tr(h_{a mu} conj(r^mu_b) + h_{mu b} conj(r^mu_a))
    tr = 0j
    for a in range(r):
        for m in range(r):
            tr += complex(hh0[a][m]) * complex(r0[m][a]).conjugate()
            tr += complex(hh0[m][a]) * complex(r0[m][a]).conjugate()
    res238 = complex(k0) - tr
    skew = [complex(q0[al][a][b]) + complex(q0[al][b][a])
            for al in range(r) for a in range(r) for b in range(r)]
    residuals = {
        "s_r_hermitian": _max(res237),
        "k_hat_trace": abs(res238),
        "q_skew": _max(skew),
        "d_omega_structure": _max(res_dw),
        "d_omega_alpha_structure": _max(res_phi),
        "g_hat_minus_delta": _max([complex(g0[a][b]) - (1 if a == b else 0)
                                   for a in range(r) for b in range(r)]),
        "trace_h_hat_minus_1": abs(sum(complex(hh0[a][a]) for a in range(r)) - 1),
    }
    jets = {"Delta": Delta, "Phi": Phi, "frame": X, "coframe": cofr, "k_hat": k_hat,
            "k_hat_mu": k_mu, "t_hat": t, "r_hat": rr, "s_hat": ss, "h_upper": h_up,
            "d_theta_n": d_n, "d_omega": d_om}
    return StructureScalars(g0, hh0, hu0, t0, r0, s0, q0, k0, km0, residuals, mode, jets)


def _zero(mode):
    return QI(0) if mode == EXACT else 0j


def null_row_residuals(frame: CRFrame, order: Optional[int] = None) -> Dict[str, float]:
    """Check h^beta_{n bar} = 0 and 2i g^{nu alpha} h_{nu beta n} = h^alpha_beta.

    Computed on the chart in the null-adapted frame before any normalization,
    with ``T_a(theta) = (1/2i) X_a ⌟ d theta`` and
    ``h_{a b n} = <T_b T_a theta, X_n>``.
    """
    ch = frame.chart(order)
    mode = frame.mode
    n = frame.n
    th = ch.theta()
    others = [j for j in range(ch.rho.n_plus_1) if j != ch.k]
    thA = [ch.dZ(j) * (0, 1) for j in others]
    X = dual_frame([th] + thA + [f.conj() for f in thA])
    G = _levi_matrix(th, X, range(1 + n, 1 + 2 * n), range(1, 1 + n))
    G0 = [[cval(x) for x in row] for row in G]
    j = _null_index(G0, n, mode)
    I = [a for a in range(n) if a != j]
    one = CJet.constant(1, G[0][0].nvars, G[0][0].order, mode)
    zero = CJet.zero(G[0][0].nvars, G[0][0].order, mode)
    v = [zero] * n
    v[j] = one
    if I:
        sol = jet_solve([[G[a][b] for b in I] for a in I], [[-G[a][j]] for a in I])
        for row, a in enumerate(I):
            v[a] = sol[row][0]
    P = [[zero] * n for _ in range(n)]
    for c, a in enumerate(I):
        P[a][c] = one
    for a in range(n):
        P[a][n - 1] = v[a]
    Pinv = jet_inverse(P)
    new_th = []
    for c in range(n):
        acc = None
        for a in range(n):
            if not Pinv[c][a].is_zero():
                t = thA[a] * Pinv[c][a]
                acc = t if acc is None else acc + t
        new_th.append(acc)
    cof = [th] + new_th + [f.conj() for f in new_th]
    Y = dual_frame(cof)
    r = n - 1
    bar = lambda a: 1 + n + a
    c2i = _inv_2i(mode)
    dth = ext_d(th)
    # g_{a b} = <T_a theta, X_b> = (1/2i) d theta(X_a bar, X_b)
    g = [[cval(pair(dth, [Y[bar(a)], Y[1 + b]]) * c2i) for b in range(r)] for a in range(r)]
    T = [interior(Y[bar(a)], dth) * c2i for a in range(r)]
    res_hn = []
    res_id = []
    hmixed = [[cval(pair(ext_d(T[a]), [Y[bar(b)], Y[n]]) * c2i) for b in range(r)] for a in range(r)]
    gm = np.array([[complex(x) for x in row] for row in g])
    ginv = np.linalg.inv(gm)
    for beta in range(r):
        dthb = ext_d(new_th[beta])
        res_hn.append(abs(pair(dthb, [Y[bar(n - 1)], Y[n]]).cvalue()))
        for b in range(r):
            h_up = pair(dthb, [Y[bar(b)], Y[n]]).cvalue()
            lhs = 2j * sum(ginv[nu][beta] * complex(hmixed[nu][b]) for nu in range(r))
            res_id.append(abs(lhs - h_up))
    return {"h_n_bar": max(res_hn), "h_contraction": max(res_id)}



# -- gauge covariance --------------------------------------------------------------------------

@dataclass
class GaugeReport:
    u: object
    u_alpha: List[object]
    residuals: Dict[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def gauge_covariance_test(cof: AdaptedCoframe, u, u_alpha: Sequence[object],
                          base: Optional[StructureScalars] = None) -> GaugeReport:
    """Recompute scalars after a constant G_1 move and compare with the transformation rules."""
    uc0 = _as_complex(u)
    if uc0.imag != 0 or uc0.real <= 0:
        raise NotInGroup(f"G_1 needs a real u > 0, got {u!r}")
    if len(u_alpha) != cof.r:
        raise NotInGroup(f"expected {cof.r} entries in u_alpha, got {len(u_alpha)}")
    base = base or structure_scalars(cof)
    moved = structure_scalars(cof.transformed(u, u_alpha))
    r = cof.r
    uc = _as_complex(u)
    su = cmath.sqrt(uc)
    ua = [_as_complex(x) for x in u_alpha]
    res: Dict[str, float] = {}
    res["g_hat"] = _max([complex(moved.g_hat[a][b]) - complex(base.g_hat[a][b])
                         for a in range(r) for b in range(r)])
    res["h_hat"] = _max([complex(moved.h_hat[a][b]) - complex(base.h_hat[a][b])
                         for a in range(r) for b in range(r)])
    res["k_hat"] = abs(complex(moved.k_hat) - complex(base.k_hat))
    res["k_hat_mu"] = _max([complex(moved.k_hat_mu[m]) - complex(base.k_hat_mu[m]) / su
                            for m in range(r)])
    res["r_hat"] = _max([complex(moved.r_hat[a][b]) - complex(base.r_hat[a][b])
                         for a in range(r) for b in range(r)])
    res["s_hat"] = _max([complex(moved.s_hat[a][b]) - complex(base.s_hat[a][b])
                         for a in range(r) for b in range(r)])
    g = [[complex(x) for x in row] for row in base.g_hat]
    dt = []
    for al in range(r):
        for m in range(r):
            for nu in range(r):
                exp = complex(base.t_hat[al][m][nu]) / su + 1j * g[m][nu] * ua[al] / uc
                if al == nu:
                    exp += 0.5j * sum(g[m][c] * ua[c] for c in range(r)) / uc
                dt.append(complex(moved.t_hat[al][m][nu]) - exp)
    res["t_hat"] = _max(dt)
    return GaugeReport(u, list(u_alpha), res)
