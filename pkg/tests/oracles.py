"""Independent symbolic oracles (sympy), sharing no code with crinv.

* ``levi_rank``: rank of the complex Hessian rho_{j kbar} restricted to the
  complex tangent space {v : sum rho_j v_j = 0}.
* ``symbol_value``: p(d rho / dZ) at a point for a constant-coefficient
  operator symbol p.
* ``holomorphic_tangent_field``: whether d/dZ_k annihilates rho identically
  (a holomorphic field tangent to M, which forces k0 = infinity).
"""
import sympy as sp


def _vars(m):
    x = sp.symbols(f"x1:{m + 1}", real=True)
    y = sp.symbols(f"y1:{m + 1}", real=True)
    z = [x[j] + sp.I * y[j] for j in range(m)]
    return x, y, z


def _dz(f, x, y, j):
    return (sp.diff(f, x[j]) - sp.I * sp.diff(f, y[j])) / 2


def _dzbar(f, x, y, j):
    return (sp.diff(f, x[j]) + sp.I * sp.diff(f, y[j])) / 2


def build_rho(expr_fn, m):
    """``expr_fn(Z, Zbar, re, im)`` returns a sympy expression."""
    x, y, z = _vars(m)
    zb = [sp.conjugate(w) for w in z]
    rho = sp.expand(expr_fn(z, zb, lambda w: (w + sp.conjugate(w)) / 2,
                            lambda w: (w - sp.conjugate(w)) / (2 * sp.I)))
    return sp.simplify(rho), x, y


def _coord(c):
    """Accept sympy numbers or strings like '3/5', '4/5i', '1+2i'."""
    if isinstance(c, str):
        t = c.replace(" ", "")
        if t.endswith("i"):
            t = t[:-1] + "*I" if t[:-1] not in ("", "+", "-") else t[:-1] + "I"
        return sp.sympify(t, rational=True)
    return sp.nsimplify(c)


def _subs(point, x, y):
    sub = {}
    for j, c in enumerate(point):
        c = _coord(c)
        sub[x[j]] = sp.re(c)
        sub[y[j]] = sp.im(c)
    return sub


def levi_rank(rho, x, y, point):
    """Exact rank (points may be algebraic numbers)."""
    m = len(x)
    sub = _subs(point, x, y)
    grad = [sp.simplify(_dz(rho, x, y, j).subs(sub)) for j in range(m)]
    H = sp.Matrix(m, m, lambda j, k: sp.simplify(_dz(_dzbar(rho, x, y, k), x, y, j).subs(sub)))
    # basis of the complex tangent space: kernel of the row (rho_1..rho_m)
    basis = sp.Matrix([grad]).nullspace(simplify=True)
    B = sp.Matrix.hstack(*basis)
    L = (B.H * H.T * B).applyfunc(sp.simplify)
    return L.rank(simplify=True)


def symbol_value(rho, x, y, point, poly_fn):
    m = len(x)
    sub = _subs(point, x, y)
    zeta = [sp.simplify(_dz(rho, x, y, j).subs(sub)) for j in range(m)]
    return sp.simplify(poly_fn(zeta))


def holomorphic_tangent_field(rho, x, y, k):
    return sp.simplify(_dz(rho, x, y, k)) == 0
