"""The flat model: frames of the tube over the light cone and its Cartan matrix.

Frames are 4x4 matrices with columns ``Z_0 = t(1, z_0)`` and
``Z_A = (0, x_A)``; the frame group ``H`` acts on the right.  The
Maurer-Cartan matrix ``Pi = F^{-1} dF`` satisfies ``d Pi = Pi ^ Pi`` in the
index convention ``d pi^b_a = pi^c_a ^ pi^b_c`` (row index b, column a).

For a CR manifold in Case 1 with ``k_hat = 2i`` the same matrix is assembled
from the normalized coframe; its curvature ``Omega = d Pi - Pi ^ Pi``
vanishes iff the manifold is locally the flat model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .errors import FrameFamilyDegenerate, JetOrderExhausted, NotInGroup, SingularSolve, WrongCase
from .exterior import FormJet, exact_differential, ext_d, wedge
from .jetla import jet_inverse, jet_matmul
from .jets import EXACT, CJet, Jet
from .parallelism5d import ParallelismData
from .scalars import QI

LAMBDA = ((0, 0, -1), (0, 1, 0), (-1, 0, 0))
FLAT_TOL = 1e-9


def lorentz(x: Sequence, y: Sequence):
    """``{x, y} = x1 y1 + x2 y2 - x3 y3``."""
    return x[0] * y[0] + x[1] * y[1] - x[2] * y[2]


# -- frames ----------------------------------------------------------------------------------

@dataclass
class LightConeFrame:
    """``Z_0 = t (1, z0)``, ``Z_A = (0, x_A)`` with ``z0`` given by real and imaginary parts."""

    t: object
    z0_re: Tuple[object, object, object]
    z0_im: Tuple[object, object, object]
    x: Tuple[Tuple[object, object, object], ...]

    def matrix(self) -> List[List[QI]]:
        """Columns Z_0..Z_3 as a 4x4 matrix of Gaussian rationals."""
        t = QI.coerce(self.t)
        col0 = [t] + [t * QI(a, b) for a, b in zip(self.z0_re, self.z0_im)]
        cols = [col0] + [[QI(0)] + [QI(c) for c in xa] for xa in self.x]
        return [[cols[j][i] for j in range(4)] for i in range(4)]


def standard_frame() -> LightConeFrame:
    """A rational frame at the point (1, 0, 1) of the cone."""
    half = Fraction(1, 2)
    return LightConeFrame(1, (1, 0, 1), (0, 0, 0), ((1, 0, 1), (0, 1, 0), (-half, 0, half)))


def gram(x: Sequence[Sequence]) -> List[List[object]]:
    return [[lorentz(a, b) for b in x] for a in x]


def validate_frame(f: LightConeFrame, tol: float = 1e-10) -> bool:
    """Gram matrix of ``x_A`` equals Lambda and ``Re(t z0) = x_1``."""
    exact = all(not isinstance(c, float) for xa in f.x for c in xa) and not isinstance(f.t, float)
    G = gram(f.x)
    lhs = [f.t * c for c in f.z0_re]
    if exact:
        return (all(G[i][j] == LAMBDA[i][j] for i in range(3) for j in range(3))
                and all(a == b for a, b in zip(lhs, f.x[0])))
    ok = all(abs(float(G[i][j]) - LAMBDA[i][j]) <= tol for i in range(3) for j in range(3))
    return ok and all(abs(float(a) - float(b)) <= tol for a, b in zip(lhs, f.x[0]))


# -- groups ----------------------------------------------------------------------------------

def in_K(k: Sequence[Sequence], tol: float = 0.0) -> bool:
    """``k^T Lambda k = Lambda`` and ``det k = 1`` (columns are k^B_A for fixed A)."""
    for A in range(3):
        for B in range(3):
            s = sum(k[C][A] * k[D][B] * LAMBDA[C][D] for C in range(3) for D in range(3))
            if abs(s - LAMBDA[A][B]) > tol:
                return False
    d = (k[0][0] * (k[1][1] * k[2][2] - k[1][2] * k[2][1])
         - k[0][1] * (k[1][0] * k[2][2] - k[1][2] * k[2][0])
         + k[0][2] * (k[1][0] * k[2][1] - k[1][1] * k[2][0]))
    return abs(d - 1) <= tol


def h_matrix(v, vB: Sequence, k: Sequence[Sequence]) -> List[List[QI]]:
    """The frame-change matrix with entries ``v``, ``(k^B_1 - v delta^B_1) + i v^B`` and ``k``."""
    M = [[QI(0)] * 4 for _ in range(4)]
    M[0][0] = QI.coerce(v)
    for B in range(3):
        M[1 + B][0] = QI(k[B][0] - (v if B == 0 else 0), vB[B])
        for A in range(3):
            M[1 + B][1 + A] = QI.coerce(k[B][A])
    return M


def h0_matrix(v, a) -> List[List[QI]]:
    """Isotropy element: ``k = [[v, a, a^2/2v], [0, 1, a/v], [0, 0, 1/v]]``."""
    v, a = QI.coerce(v), QI.coerce(a)
    k = [[v, a, a * a / (v * 2)], [QI(0), QI(1), a / v], [QI(0), QI(0), QI(1) / v]]
    M = [[QI(0)] * 4 for _ in range(4)]
    M[0][0] = v
    for B in range(3):
        for A in range(3):
            M[1 + B][1 + A] = k[B][A]
    return M


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum((a[i][k] * b[k][j] for k in range(m)), QI(0)) for j in range(p)] for i in range(n)]


def is_h_element(M: Sequence[Sequence[QI]]) -> bool:
    """Block shape, ``v > 0``, ``k`` in K and first column ``k^B_1 - v delta^B_1 + i v^B``."""
    M = [[QI.coerce(x) for x in row] for row in M]
    if any(M[0][j] != 0 for j in range(1, 4)) or M[0][0].im != 0 or M[0][0].re <= 0:
        return False
    k = [[M[1 + B][1 + A] for A in range(3)] for B in range(3)]
    if any(x.im != 0 for row in k for x in row):
        return False
    kr = [[x.re for x in row] for row in k]
    if not in_K(kr):
        return False
    v = M[0][0].re
    return all(M[1 + B][0].re == kr[B][0] - (v if B == 0 else 0) for B in range(3))


def group_ops(m1, m2):
    """Product in H (checked on both inputs and the output)."""
    for m in (m1, m2):
        if not is_h_element(m):
            raise NotInGroup("matrix is not in H")
    out = _matmul(m1, m2)
    if not is_h_element(out):
        raise NotInGroup("product left H")
    return out


def phi_iso(n) -> List[List[QI]]:
    """``diag-block(v, k(v, a)) -> [[v^2, 0, 0], [-a v, v, 0], [-a v, 0, v]]``.

    As printed this map reverses products: ``phi(n1 n2) = phi(n2) phi(n1)``
    (frames change on the right, coframes on the left).
    """
    n = [[QI.coerce(x) for x in row] for row in n]
    v = n[0][0]
    if n[1][1] != v or n[2][1] != 0 or n[3][1] != 0 or n[2][2] != 1:
        raise NotInGroup("not an isotropy element")
    a = n[1][2]
    if _matmul(h0_matrix(v, a), [[QI(1) if i == j else QI(0) for j in range(4)] for i in range(4)]) != n:
        raise NotInGroup("not an isotropy element")
    return [[v * v, QI(0), QI(0)], [-a * v, v, QI(0)], [-a * v, QI(0), v]]


# -- Maurer-Cartan ---------------------------------------------------------------------------

def _jet_expm(X: List[List[CJet]]) -> List[List[CJet]]:
    """exp of a jet matrix vanishing at the base point (the series terminates)."""
    n = len(X)
    first = X[0][0]
    one = lambda i, j: CJet.constant(1 if i == j else 0, first.nvars, first.order, first.mode)
    out = [[one(i, j) for j in range(n)] for i in range(n)]
    term = [[one(i, j) for j in range(n)] for i in range(n)]
    for k in range(1, first.order + 1):
        term = jet_matmul(term, X)
        scale = Fraction(1, k) if first.mode == EXACT else 1.0 / k
        term = [[x * scale for x in row] for row in term]
        out = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(out, term)]
    return out


def k_algebra_element(alpha, beta, gamma) -> List[List[object]]:
    """``[[alpha, beta, 0], [gamma, 0, beta], [0, gamma, -alpha]]``."""
    z = alpha * 0
    return [[alpha, beta, z], [gamma, z, beta], [z, gamma, -alpha]]


def frame_family(base: LightConeFrame, order: int, mode: str = EXACT) -> List[List[CJet]]:
    """``F(g) = F_base M(g)`` over the 7 group coordinates (v - 1, v^1..3, alpha, beta, gamma)."""
    nv = 7
    var = lambda i: CJet(Jet.variable(i, nv, order, mode))
    v = CJet(Jet.variable(0, nv, order, mode, value=1))
    vB = [var(1), var(2), var(3)]
    k = _jet_expm(k_algebra_element(var(4), var(5), var(6)))
    iu = (0, 1)
    M = [[CJet.zero(nv, order, mode) for _ in range(4)] for _ in range(4)]
    M[0][0] = v
    for B in range(3):
        M[1 + B][0] = k[B][0] - (v if B == 0 else 0) + vB[B] * iu
        for A in range(3):
            M[1 + B][1 + A] = k[B][A]
    F0 = base.matrix()
    Fb = [[CJet.constant((x.re, x.im), nv, order, mode) for x in row] for row in F0]
    return jet_matmul(Fb, M)


@dataclass
class CartanMatrix:
    """``Pi[b][a] = pi^b_a`` as 1-forms."""

    Pi: List[List[FormJet]]
    mode: str
    source: str = ""

    def entry(self, b: int, a: int) -> FormJet:
        return self.Pi[b][a]

    @property
    def order(self) -> int:
        return min(f.order for row in self.Pi for f in row)


def maurer_cartan(F: List[List[CJet]]) -> CartanMatrix:
    """``Pi = F^{-1} dF`` for a frame family given as a jet matrix."""
    try:
        Finv = jet_inverse(F)
    except SingularSolve as exc:
        raise FrameFamilyDegenerate("frame matrix is singular at the base point") from exc
    dF = [[exact_differential(x) for x in row] for row in F]
    n = len(F)
    Pi = []
    for b in range(n):
        row = []
        for a in range(n):
            acc = None
            for c in range(n):
                if Finv[b][c].is_zero():
                    continue
                t = dF[c][a] * Finv[b][c]
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else FormJet.zero(F[0][0].nvars, 1, F[0][0].order - 1,
                                                                 F[0][0].mode))
        Pi.append(row)
    return CartanMatrix(Pi, F[0][0].mode, "maurer_cartan")


def curvature(pi: CartanMatrix) -> List[List[FormJet]]:
    """``Omega^b_a = d pi^b_a - sum_c pi^c_a ^ pi^b_c``."""
    P = pi.Pi
    n = len(P)
    if pi.order < 1:
        raise JetOrderExhausted("curvature needs Pi to order >= 1")
    out = []
    for b in range(n):
        row = []
        for a in range(n):
            om = ext_d(P[b][a])
            for c in range(n):
                if P[c][a].terms and P[b][c].terms:
                    om = om - wedge(P[c][a], P[b][c])
            row.append(om)
        out.append(row)
    return out


def frame_relations(pi: CartanMatrix) -> Dict[str, float]:
    """Residuals of the three frame relations and of the block pattern."""
    P = pi.Pi
    half = Fraction(1, 2) if pi.mode == EXACT else 0.5
    res = {
        "p11_minus_p00": (P[1][1] - P[0][0] - (P[1][0] + P[1][0].conj()) * half).max_abs(),
        "p21": (P[2][1] - (P[2][0] + P[2][0].conj()) * half).max_abs(),
        "p30_imaginary": (P[3][0] + P[3][0].conj()).max_abs(),
    }
    pattern = [P[0][1], P[0][2], P[0][3], P[2][2], P[1][3], P[3][1],
               P[2][3] - P[1][2], P[3][2] - P[2][1], P[3][3] + P[1][1]]
    res["pattern"] = max(f.max_abs() for f in pattern)
    res["real_block"] = max((P[b][a] - P[b][a].conj()).max_abs()
                            for b in range(4) for a in range(4) if a > 0 or b == 0)
    return res


def ad_transform(pi: CartanMatrix, N: Sequence[Sequence]) -> CartanMatrix:
    """``N^{-1} Pi N`` for a constant matrix N."""
    Nq = [[QI.coerce(x) for x in row] for row in N]
    Ninv = _qi_inverse(Nq)
    P = pi.Pi
    n = len(P)
    mode = pi.mode

    def sc(z):
        return (z.re, z.im) if mode == EXACT else (float(z.re), float(z.im))

    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                for l in range(n):
                    c = Ninv[i][k] * Nq[l][j]
                    if c == 0 or not P[k][l].terms:
                        continue
                    t = P[k][l] * sc(c)
                    acc = t if acc is None else acc + t
            row.append(acc if acc is not None else P[0][1] * 0)
        out.append(row)
    return CartanMatrix(out, mode, "ad")


def _qi_inverse(m):
    n = len(m)
    a = [list(row) + [QI(1) if i == j else QI(0) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise NotInGroup("singular matrix")
        a[c], a[p] = a[p], a[c]
        inv = QI(1) / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


# -- identification with the normalized coframe ------------------------------------------------

def _scal(z, mode):
    if mode == EXACT:
        z = QI.coerce(z)
        return (z.re, z.im)
    z = complex(z)
    return (z.real, z.imag)


def _khat_is_2i(pd: ParallelismData) -> bool:
    k = pd.case.k_hat
    if pd.mode == EXACT:
        return QI.coerce(k) == QI(0, 2)
    return abs(complex(k) - 2j) <= FLAT_TOL


def identify_with_parallelism(pd: ParallelismData) -> CartanMatrix:
    """Assemble Pi from omega, omega^1, theta^2, Delta, xi."""
    if pd.case.variant != "Case1" or not pd.forms or "xi" not in pd.forms:
        raise WrongCase("the Cartan matrix needs Case 1 forms")
    if not _khat_is_2i(pd):
        raise WrongCase(f"k_hat(p0) = {pd.case.k_hat} is not 2i")
    f = pd.forms
    mode = pd.mode
    w, w1, th2, D, xi = f["omega"], f["omega1"], f["theta2"], f["Delta"], f["xi"]
    s = lambda z: _scal(z, mode)
    half = Fraction(1, 2) if mode == EXACT else 0.5
    i2 = s(QI(0, 2) if mode == EXACT else 2j)
    i4 = s(QI(0, 4) if mode == EXACT else 4j)
    iu = s(QI(0, 1) if mode == EXACT else 1j)
    p00 = (D - th2 * i2 + th2.conj() * i2) * half
    p11 = (D + th2 * i2 - th2.conj() * i2) * half
    p10 = th2 * i4
    p20 = w1 * i2
    p30 = w * i2
    p21 = (w1 - w1.conj()) * iu
    p12 = -xi
    Z = FormJet.zero(w.nvars, 1, w.order, mode)
    Pi = [[p00, Z, Z, Z], [p10, p11, p12, Z], [p20, p21, Z, p12], [p30, Z, p21, -p11]]
    return CartanMatrix(Pi, mode, "parallelism")


def forms_from_cartan(pi: CartanMatrix) -> Dict[str, FormJet]:
    """Invert the identification: omega = -i/2 pi^3_0, omega^1 = pi^2_0 / 2i, ..."""
    P = pi.Pi
    mode = pi.mode
    s = lambda z: _scal(z, mode)
    q = (lambda a, b: QI(Fraction(a), Fraction(b))) if mode == EXACT else (lambda a, b: complex(a, b))
    return {
        "omega": P[3][0] * s(q(0, -0.5) if mode != EXACT else QI(0, Fraction(-1, 2))),
        "omega1": P[2][0] * s(q(0, -0.5) if mode != EXACT else QI(0, Fraction(-1, 2))),
        "theta2": P[1][0] * s(q(0, -0.25) if mode != EXACT else QI(0, Fraction(-1, 4))),
        "Delta": P[0][0] + P[1][1],
        "xi": -P[1][2],
    }


def structure_equations(pd: ParallelismData) -> Dict[str, float]:
    """Residuals of the five flat-model structure equations for the Case 1 forms.

    The coefficient of ``omega^{1 bar} ^ theta^2`` in ``d omega^1`` is 2i,
    which is what the Maurer-Cartan equations give under the identification.
    """
    f = pd.forms
    mode = pd.mode
    w, w1, th2, D, xi = f["omega"], f["omega1"], f["theta2"], f["Delta"], f["xi"]
    w1b, th2b = w1.conj(), th2.conj()
    s = lambda z: _scal(z, mode)
    i1 = s(QI(0, 1) if mode == EXACT else 1j)
    i2 = s(QI(0, 2) if mode == EXACT else 2j)
    half = Fraction(1, 2) if mode == EXACT else 0.5
    res = {}
    res["d_omega"] = ext_d(w) - wedge(D, w) - wedge(w1b, w1) * i1
    res["d_omega1"] = (ext_d(w1) - wedge(xi, w) - wedge(D, w1) * half + wedge(w1, th2) * i1
                       - wedge(th2b, w1) * i1 - wedge(w1b, th2) * i2)
    res["d_theta2"] = ext_d(th2) - wedge(xi, w1) * half - wedge(th2b, th2) * i2
    res["d_Delta"] = ext_d(D) - wedge(xi, w1) * i1 + wedge(xi, w1b) * i1
    res["d_xi"] = ext_d(xi) + wedge(D + th2 * i2 - th2b * i2, xi) * half
    return {k: v.max_abs() for k, v in res.items()}


@dataclass
class FlatnessResult:
    status: str
    max_residual: float
    order: int
    warnings: List[str] = field(default_factory=list)
    relations: Dict[str, float] = field(default_factory=dict)


def flatness_test(pd: ParallelismData, tol: float = FLAT_TOL) -> FlatnessResult:
    """Curvature of the assembled Cartan matrix; flat iff every coefficient is below tol."""
    pi = identify_with_parallelism(pd)
    warn = []
    eps = pd.raw.get("eps")
    r = pd.raw.get("r")
    if eps is not None and r is not None:
        # k_hat = 2i r e^{it}: constant iff r and e^{it/2} have no higher jets
        tol_j = 0.0 if pd.mode == EXACT else tol
        drift = max((eps - CJet.constant(_scal(1, pd.mode), eps.nvars, eps.order, pd.mode)).max_abs(),
                    (CJet(r) - CJet.constant(_scal(1, pd.mode), eps.nvars, eps.order, pd.mode)).max_abs())
        if drift > tol_j:
            warn.append("khat_only_pointwise")
    Om = curvature(pi)
    mx = max(x.max_abs() for row in Om for x in row)
    order = min(x.order for row in Om for x in row)
    status = "flat" if mx <= (0.0 if pd.mode == EXACT else tol) else "nonflat"
    return FlatnessResult(status, mx, order, warn, frame_relations(pi))
