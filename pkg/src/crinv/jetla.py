"""Linear algebra over complex jets (matrices whose entries are CJets).

Elimination picks pivots by their value at the base point: the largest
modulus in float mode, the first nonzero entry (diagonal preferred) in
exact mode.  A matrix whose value at the base point is singular is
singular as a jet, so that is the only failure mode.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .errors import SingularSolve
from .jets import EXACT, CJet
from .scalars import QI

JetMatrix = List[List[CJet]]


def cval(f: CJet):
    """Value at the base point as a QI (exact) or complex (float)."""
    re, im = f.value()
    if f.mode == EXACT:
        return QI(re, im)
    return complex(float(re), float(im))


def value_matrix(m: Sequence[Sequence[CJet]]):
    return [[cval(x) for x in row] for row in m]


def _pick_pivot(a: JetMatrix, col: int, start: int) -> int | None:
    rows = range(start, len(a))
    if a[start][col].mode == EXACT:
        if not _vzero(a[start][col]):
            return start
        return next((i for i in rows if not _vzero(a[i][col])), None)
    best = max(rows, key=lambda i: abs(a[i][col].cvalue()))
    return None if abs(a[best][col].cvalue()) == 0.0 else best


def _vzero(f: CJet) -> bool:
    re, im = f.value()
    return re == 0 and im == 0


def jet_solve(a: Sequence[Sequence[CJet]], b: Sequence[Sequence[CJet]]) -> JetMatrix:
    """Solve ``a x = b`` for a square jet matrix ``a`` and a jet matrix ``b``."""
    n = len(a)
    if n == 0:
        return []
    rows = [list(a[i]) + list(b[i]) for i in range(n)]
    width = len(rows[0])
    for c in range(n):
        p = _pick_pivot(rows, c, c)
        if p is None:
            raise SingularSolve(f"jet matrix singular at the base point (column {c})")
        rows[c], rows[p] = rows[p], rows[c]
        inv = rows[c][c].inverse()
        rows[c] = [x * inv if not x.is_zero() else x for x in rows[c]]
        for i in range(n):
            if i == c:
                continue
            f = rows[i][c]
            if f.is_zero():
                continue
            rows[i] = [x - f * y if not y.is_zero() else x for x, y in zip(rows[i], rows[c])]
    return [row[n:width] for row in rows]


def jet_inverse(a: Sequence[Sequence[CJet]]) -> JetMatrix:
    n = len(a)
    first = a[0][0]
    eye = [[CJet.constant(1 if i == j else 0, first.nvars, first.order, first.mode)
            for j in range(n)] for i in range(n)]
    return jet_solve(a, eye)


def jet_matmul(a: Sequence[Sequence[CJet]], b: Sequence[Sequence[CJet]]) -> JetMatrix:
    out = []
    for i in range(len(a)):
        row = []
        for j in range(len(b[0])):
            acc = None
            for k in range(len(b)):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                t = a[i][k] * b[k][j]
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else CJet.zero(a[0][0].nvars, min(a[0][0].order, b[0][0].order), a[0][0].mode))
        out.append(row)
    return out


def csqrt_scalar(z, mode: str):
    """Principal square root of a complex scalar (exact raises if irrational)."""
    import cmath
    from .jets import exact_sqrt
    if mode != EXACT:
        return cmath.sqrt(complex(z))
    z = QI.coerce(z)
    if z.im == 0 and z.re >= 0:
        return QI(exact_sqrt(z.re))
    modulus = exact_sqrt(z.abs2())
    p = exact_sqrt((modulus + z.re) / 2)
    q = exact_sqrt((modulus - z.re) / 2)
    return QI(p, q if z.im >= 0 else -q)


def csqrt_jet(f: CJet, root=None) -> CJet:
    """Square root of a complex jet with a prescribed (or principal) value.

    Newton iteration ``x <- (x + f/x)/2`` with order doubling.
    """
    mode = f.mode
    if root is None:
        root = csqrt_scalar(cval(f), mode)
    re, im = (root.re, root.im) if mode == EXACT else (root.real, root.imag)
    x = CJet.constant((re, im), f.nvars, f.order, mode)
    half = (Fraction(1, 2), 0) if mode == EXACT else (0.5, 0.0)
    done = 0
    while done < f.order:
        x = (x + f / x) * half
        done = 2 * done + 1
    return x


def scalar_to_parts(z, mode: str):
    if mode == EXACT:
        z = QI.coerce(z)
        return (z.re, z.im)
    z = complex(z)
    return (z.real, z.imag)
