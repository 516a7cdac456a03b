"""First-order and second-order CR invariants at a base point.

Everything here works on the ambient frame of :mod:`crinv.hypersurface`.
The CR fields ``L_bar`` annihilate ``rho`` identically, so they are tangent
to every level set of ``rho``; pairings of forms with them, and exterior
derivatives of forms taken modulo ``d(rho)``, therefore agree with the same
computation on M at every point of M.  Values at ``p0`` are exact.

Conventions:

* ``T_A(omega) = (1/2i) L_bar_A ⌟ d(omega)``, reduced modulo ``d(rho)``;
* ``g[A][B] = <T_A theta, L_B>``, cross-checked against
  ``(1/2i) <theta, [L_B, L_bar_A]>``;
* ``h[k][A][B] = <T_B T_A theta, L_k>`` for null fields ``L_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import (
    FormulaMismatch,
    JetOrderExhausted,
    NotHolomorphicForm,
    NotHomogeneous,
    RankFullNoPsi3,
    ShapeMismatch,
)
from .exterior import FormJet, VectorJet, ext_d, interior, lie_bracket, pair
from .hypersurface import (
    BasePoint,
    CRFrame,
    DefiningFunction,
    _wirtinger_bar,
    ambient_coordinates,
    reduce_mod_drho,
    _solved_real,
)
from .jetla import cval, jet_solve, value_matrix
from .jets import EXACT, FLOAT, CJet
from .polynomial import CPoly
from .scalars import RANK_RTOL, QI, conj_transpose, is_zero, nullspace, rank, to_numpy

FLOAT_TOL = 1e-10
DEFAULT_CAP = 4


def _inv_2i(mode: str):
    # 1/(2i) = -i/2
    return (0, Fraction(-1, 2)) if mode == EXACT else (0.0, -0.5)


def _close(a, b, mode: str, tol: float = FLOAT_TOL) -> bool:
    if mode == EXACT:
        return a == b
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(a)), abs(complex(b)))


# -- T operators ------------------------------------------------------------------------

def t_operator(frame: CRFrame, A: int, omega: FormJet, check: bool = True,
               L_bar: Optional[Sequence[VectorJet]] = None) -> FormJet:
    """``(1/2i) L_bar_A ⌟ d(omega)`` reduced modulo d(rho).  ``A`` is 0-based."""
    fields = frame.L_bar if L_bar is None else L_bar
    if omega.order < 1:
        raise JetOrderExhausted("T operator needs a form of order >= 1")
    if check:
        tol = 0.0 if frame.mode == EXACT else 1e-9 * max(1.0, omega.max_abs())
        for B, Lb in enumerate(fields):
            v = pair(omega, [Lb])
            if not v.is_zero(tol):
                raise NotHolomorphicForm(f"<omega, L_bar_{B + 1}> does not vanish")
    out = interior(fields[A], ext_d(omega)) * _inv_2i(frame.mode)
    return reduce_mod_drho(out, frame)


def reduced_vector(omega: FormJet, frame: CRFrame) -> List[object]:
    """Coefficients at p0 against dx_i, i != solved coordinate (completed coframe)."""
    m = frame.rho.n_plus_1
    s = _solved_real(frame.point.gradient, m, frame.k)
    red = reduce_mod_drho(omega, frame)
    return [cval(red.coeff((i,))) for i in range(frame.nvars) if i != s]


# -- Levi form --------------------------------------------------------------------------

@dataclass
class LeviData:
    """Levi form at p0 in the basis L_bar_1..L_bar_n (derivative formula value)."""

    g: List[List[object]]
    g_bracket: List[List[object]]
    rank: int
    nullspace_basis: List[List[object]]
    definite_on_complement: str
    mode: str
    g_jet: List[List[CJet]] = field(repr=False, default_factory=list)

    @property
    def n(self) -> int:
        return len(self.g)

    def max_hermitian_defect(self) -> float:
        gh = conj_transpose(self.g)
        return max([0.0] + [abs(complex(self.g[i][j]) - complex(gh[i][j]))
                            for i in range(self.n) for j in range(self.n)])


def _d_theta(frame: CRFrame) -> FormJet:
    cache = getattr(frame, "_dtheta", None)
    if cache is None:
        cache = ext_d(frame.theta)
        frame._dtheta = cache  # type: ignore[attr-defined]
    return cache


def levi_jets(frame: CRFrame, L_bar: Optional[Sequence[VectorJet]] = None) -> List[List[CJet]]:
    """``g[A][B] = (1/2i) d(theta)(L_bar_A, L_B)`` as ambient jets."""
    fields = frame.L_bar if L_bar is None else L_bar
    dth = _d_theta(frame)
    c = _inv_2i(frame.mode)
    L = [v.conj() for v in fields]
    return [[pair(dth, [fields[A], L[B]]) * c for B in range(len(fields))]
            for A in range(len(fields))]


def signature_class(g: List[List[object]], mode: str) -> str:
    """'positive', 'negative', 'indefinite' for the nonzero part; 'zero' if g = 0."""
    if mode == FLOAT:
        import numpy as np
        arr = to_numpy(g)
        arr = (arr + arr.conj().T) / 2
        ev = np.linalg.eigvalsh(arr) if arr.size else np.zeros(0)
        top = max([0.0] + [abs(e) for e in ev])
        ev = [e for e in ev if abs(e) > 1e-8 * max(top, 1e-300)]
        pos = sum(1 for e in ev if e > 0)
        neg = len(ev) - pos
    else:
        pos, neg = _exact_inertia([[QI.coerce(x) for x in row] for row in g])
    if pos and neg:
        return "indefinite"
    if pos:
        return "positive"
    if neg:
        return "negative"
    return "zero"


def _exact_inertia(a: List[List[QI]]):
    """Positive/negative counts of an exact Hermitian matrix by congruence."""
    pos = neg = 0
    a = [row[:] for row in a]
    while a:
        n = len(a)
        piv = next((i for i in range(n) if a[i][i] != 0), None)
        if piv is None:
            if any(a[i][j] != 0 for i in range(n) for j in range(n)):
                # zero diagonal with a nonzero entry: replace e_i by e_i + t e_j
                i, j = next((i, j) for i in range(n) for j in range(n) if a[i][j] != 0)
                t = a[j][i]  # makes the new diagonal 2|a_ij|^2 > 0
                for c in range(n):
                    a[i][c] = a[i][c] + t.conj() * a[j][c]
                for r in range(n):
                    a[r][i] = a[r][i] + t * a[r][j]
                continue
            break
        d = a[piv][piv]
        if d.re > 0:
            pos += 1
        else:
            neg += 1
        inv = QI(1) / d
        rest = [i for i in range(n) if i != piv]
        a = [[a[i][j] - a[i][piv] * inv * a[piv][j] for j in rest] for i in rest]
    return pos, neg


def levi_form(frame: CRFrame) -> LeviData:
    """Levi matrix at p0 from the derivative formula, checked against the bracket formula."""
    mode = frame.mode
    gj = levi_jets(frame)
    g = value_matrix(gj)
    c = _inv_2i(mode)
    n = frame.n
    L = frame.L
    gb = []
    for A in range(n):
        row = []
        for B in range(n):
            br = lie_bracket(L[B], frame.L_bar[A])
            row.append(cval(pair(frame.theta, [br]) * c))
        gb.append(row)
    for A in range(n):
        for B in range(n):
            if not _close(g[A][B], gb[A][B], mode):
                raise FormulaMismatch(f"Levi form formulas disagree at ({A + 1},{B + 1}): "
                                      f"{g[A][B]} vs {gb[A][B]}")
    rk = rank(g, mode)
    null = _levi_nullspace(g, mode)
    return LeviData(g, gb, rk, null, signature_class(g, mode), mode, gj)


def _levi_nullspace(g, mode):
    # vectors v with sum_B g[A][B] v[B] = 0 for every A
    return nullspace(g, mode) if g else []


# -- nondegeneracy ------------------------------------------------------------------------

@dataclass
class NondegeneracyProfile:
    k0: Union[int, str]
    dims: List[int]


def nondegeneracy_order(frame: CRFrame, cap: int = DEFAULT_CAP) -> NondegeneracyProfile:
    """dim E_k at p0 for k = 0..cap and the first k with dim E_k = n + 1."""
    if cap < 1:
        raise ShapeMismatch("cap must be >= 1")
    if frame.theta.order < cap:
        raise JetOrderExhausted(f"cap {cap} needs jet order >= {cap + 1}")
    mode = frame.mode
    full = frame.n + 1
    rows = [reduced_vector(frame.theta, frame)]
    dims = [rank(rows, mode)]
    level = [frame.theta]
    k0: Union[int, str] = "infinite"
    for k in range(1, cap + 1):
        nxt = []
        for omega in level:
            for A in range(frame.n):
                t = t_operator(frame, A, omega, check=False)
                nxt.append(t)
                rows.append(reduced_vector(t, frame))
        level = nxt
        dims.append(rank(rows, mode))
        if dims[-1] == full:
            k0 = k
            break
    return NondegeneracyProfile(k0, dims)


# -- psi_3 ----------------------------------------------------------------------------------

@dataclass
class Psi3Data:
    """Matrices ``h[k][A][B]`` for null indices ``k`` in the adapted frame.

    ``order`` lists the original indices of the adapted fields (non-null pivot
    fields first, then null fields).  ``restricted[k]`` is the r x r block.
    """

    h: List[List[List[object]]]
    restricted: List[List[List[object]]]
    r: int
    n: int
    pivots: List[int]
    order: List[int]
    mode: str
    L_bar: List[VectorJet] = field(repr=False, default_factory=list)

    def max_offblock(self) -> float:
        out = 0.0
        for hk in self.h:
            for A in range(self.n):
                for B in range(self.n):
                    if A >= self.r or B >= self.r:
                        out = max(out, abs(complex(hk[A][B])))
        return out

    def max_asymmetry(self) -> float:
        return max([0.0] + [abs(complex(hk[A][B]) - complex(hk[B][A]))
                            for hk in self.h for A in range(self.n) for B in range(self.n)])


def _pivot_set(g, r: int, mode: str) -> List[int]:
    """Greedy principal pivot set of size r (lowest indices first)."""
    chosen: List[int] = []
    scale = 0.0
    if mode != EXACT and g:
        scale = float(np.linalg.svd(to_numpy(g), compute_uv=False)[0])
    for i in range(len(g)):
        trial = chosen + [i]
        sub = [[g[a][b] for b in trial] for a in trial]
        if mode == EXACT:
            ok = rank(sub, mode) == len(trial)
        else:
            # measured against the whole matrix, not the (possibly tiny) submatrix
            smin = float(np.linalg.svd(to_numpy(sub), compute_uv=False)[-1])
            ok = smin > RANK_RTOL * scale
        if ok:
            chosen = trial
        if len(chosen) == r:
            break
    return chosen


def null_adapted_fields(frame: CRFrame, levi: LeviData) -> tuple:
    """CR fields with the last n - r spanning the Levi null bundle along M.

    For a pivot set I with g_II invertible, the fields
    ``L_j + sum_a v^a L_a`` with ``v = -g_II^{-1} g_Ij`` are Levi-null wherever
    the rank is r.  Returns (fields, pivots, order).
    """
    n, r = frame.n, levi.rank
    piv = _pivot_set(levi.g, r, levi.mode)
    rest = [j for j in range(n) if j not in piv]
    gj = levi.g_jet
    fields = [frame.L_bar[a] for a in piv]
    if r:
        a_mat = [[gj[a][b] for b in piv] for a in piv]
        b_mat = [[gj[a][j] for j in rest] for a in piv]
        v = jet_solve(a_mat, b_mat)
    for col, j in enumerate(rest):
        f = frame.L_bar[j]
        for row, a in enumerate(piv):
            f = f - frame.L_bar[a] * v[row][col].conj()
        fields.append(f)
    return fields, piv, piv + rest


def psi3_tensor(frame: CRFrame, levi: LeviData) -> Psi3Data:
    """``h_{A B k} = <T_B T_A theta, L_k>`` in the null-adapted frame."""
    n, r = frame.n, levi.rank
    if r >= n:
        raise RankFullNoPsi3("Levi form has full rank; psi_3 is not defined")
    fields, piv, order = null_adapted_fields(frame, levi)
    L = [f.conj() for f in fields]
    t1 = [t_operator(frame, A, frame.theta, check=False, L_bar=fields) for A in range(n)]
    h = []
    for k in range(r, n):
        hk = [[None] * n for _ in range(n)]
        for A in range(n):
            for B in range(n):
                t2 = t_operator(frame, B, t1[A], check=False, L_bar=fields)
                hk[A][B] = cval(pair(t2, [L[k]]))
        h.append(hk)
    restricted = [[row[:r] for row in hk[:r]] for hk in h]
    return Psi3Data(h, restricted, r, n, piv, order, frame.mode, fields)


def two_nondeg_test(psi3: Psi3Data) -> bool:
    """True iff the r x r blocks h_{ab k}, k null, are linearly independent."""
    count = psi3.n - psi3.r
    vecs = [[x for row in blk for x in row] for blk in psi3.restricted]
    if not vecs or not vecs[0]:
        return False
    return rank(vecs, psi3.mode) == count


def bracket_closure_residual(frame: CRFrame, levi: LeviData, psi3: Psi3Data) -> float:
    """Largest component of [L_k, L_bar_l] (k, l null) outside the null span.

    The components along theta, L_a and L_bar_a (a non-null) are detected by
    theta, T_a theta and its conjugate.
    """
    fields = psi3.L_bar
    n, r = psi3.n, psi3.r
    detectors = [frame.theta]
    for a in range(r):
        t = t_operator(frame, a, frame.theta, check=False, L_bar=fields)
        detectors += [t, t.conj()]
    worst = 0.0
    for k in range(r, n):
        for l in range(r, n):
            br = lie_bracket(fields[k].conj(), fields[l])
            for d in detectors:
                worst = max(worst, abs(pair(d, [br]).cvalue()))
    return worst


# -- characteristic hypersurfaces ---------------------------------------------------------

@dataclass
class CharacteristicReport:
    characteristic: bool
    symbol_value: object
    residuals: Dict[str, float]
    null_field_tangent: Optional[bool] = None
    null_field_levi_null: Optional[bool] = None
    radial_levi_null: Optional[bool] = None


def parse_operator(src: str, m: int) -> CPoly:
    """Constant-coefficient operator symbol p(x) written with Z1..Z_m as x."""
    poly = parse_defining_function_raw(src, m)
    degs = {sum(k) for k in poly.terms}
    if len(degs) > 1:
        raise NotHomogeneous(f"{src!r} is not homogeneous")
    for k, v in poly.terms.items():
        if any(k[m:]) or v.im != 0:
            raise NotHomogeneous(f"{src!r} must be a real polynomial in x")
    return poly


def parse_defining_function_raw(src: str, m: int) -> CPoly:
    from .hypersurface import _Parser
    p = _Parser(src)
    p.m = max(m, p.max_var)
    return p.parse()


def _eval_symbol(poly: CPoly, zeta: Sequence[CJet]) -> CJet:
    m = poly.m
    total = None
    for k, c in poly.terms.items():
        term = None
        for j in range(m):
            if k[j]:
                p = zeta[j] ** k[j]
                term = p if term is None else term * p
        if term is None:
            term = CJet.constant(1, zeta[0].nvars, zeta[0].order, zeta[0].mode)
        term = term * (c.re, c.im)
        total = term if total is None else total + term
    return total


def _poly_partial_x(poly: CPoly, j: int) -> CPoly:
    out = {}
    for k, c in poly.terms.items():
        if k[j]:
            e = list(k)
            e[j] -= 1
            out[tuple(e)] = c * k[j]
    return CPoly(poly.m, out)


def cr_field_from_dbar(frame: CRFrame, coeffs: Sequence[CJet]) -> VectorJet:
    """``sum_k c_k d/dconj(Z_k)`` as a real-coordinate vector field."""
    m = frame.rho.n_plus_1
    nv = 2 * m
    mode = frame.mode
    half = Fraction(1, 2) if mode == EXACT else 0.5
    z = CJet.zero(nv, coeffs[0].order, mode)
    comps = [z] * nv
    for k, c in enumerate(coeffs):
        comps[k] = c * half
        comps[m + k] = c * (0, half)
    return VectorJet(comps)


def _levi_null_residual(frame: CRFrame, Lbar_field: VectorJet) -> float:
    dth = _d_theta(frame)
    c = _inv_2i(frame.mode)
    return max(abs((pair(dth, [Lbar_field, L]) * c).cvalue()) for L in frame.L)


def characteristic_checks(rho: DefiningFunction, p_op: Union[str, CPoly, None], point: BasePoint,
                          frame: Optional[CRFrame] = None, tol: float = 1e-9) -> CharacteristicReport:
    """Symbol test p(d rho/dZ)(p0) = 0 and Levi-nullity of the associated fields.

    With ``p_op=None`` only the radial-field test for tubes is run.
    """
    from .hypersurface import build_cr_frame
    m = rho.n_plus_1
    frame = frame or build_cr_frame(rho, point, 4)
    mode = frame.mode
    xs = ambient_coordinates(point, frame.order)
    residuals: Dict[str, float] = {}
    rep = CharacteristicReport(False, None, residuals)
    if p_op is not None:
        poly = parse_operator(p_op, m) if isinstance(p_op, str) else p_op
        if len({sum(k) for k in poly.terms}) > 1:
            raise NotHomogeneous("operator symbol is not homogeneous")
        rbar = _wirtinger_bar(rho, xs)
        zeta = [r.conj() for r in rbar]  # d rho / dZ_k
        sym = _eval_symbol(poly, zeta)
        sym_val = cval(sym)
        scale = max(1.0, max(abs(z.cvalue()) for z in zeta) ** max(poly.degree, 1))
        residuals["symbol"] = abs(complex(sym_val)) / scale
        rep.characteristic = is_zero(sym_val, mode, tol * scale)
        rep.symbol_value = sym_val
    if rep.characteristic:
        # null field: coefficients conj(dp/dx_k (d rho/dZ)) on d/dconj(Z_k)
        coeffs = [_eval_symbol(_poly_partial_x(poly, k), zeta).conj() for k in range(m)]
        Lf = cr_field_from_dbar(frame, coeffs)
        tang = abs(Lf.apply(frame.rho_jet).cvalue())
        residuals["null_field_tangent"] = tang
        residuals["null_field_levi"] = _levi_null_residual(frame, Lf)
        rep.null_field_tangent = tang <= tol
        rep.null_field_levi_null = residuals["null_field_levi"] <= tol
    if all(not any(k[m:]) for k in rho.real.terms):
        # tube over a real cone: radial field sum Re(Z_j) d/dconj(Z_j)
        coeffs = [CJet(xs[j]) for j in range(m)]
        Lf = cr_field_from_dbar(frame, coeffs)
        residuals["radial_tangent"] = abs(Lf.apply(frame.rho_jet).cvalue())
        residuals["radial_levi"] = _levi_null_residual(frame, Lf)
        rep.radial_levi_null = residuals["radial_levi"] <= tol and residuals["radial_tangent"] <= tol
    return rep
