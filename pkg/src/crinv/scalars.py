"""Complex scalars and small dense linear algebra over them.

Exact mode uses :class:`QI` (Gaussian rationals, components ``gmpy2.mpq``);
float mode uses Python ``complex``.  The helpers here (rank, nullspace,
solve, determinant) work for either, with exact elimination in exact mode
and an SVD-based rank in float mode.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

import gmpy2
import numpy as np

from .jets import EXACT, FLOAT, MPQ, to_scalar

RANK_RTOL = 1e-8
TIE_RTOL = 1e-9


class QI:
    """Exact complex rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, MPQ) else to_scalar(re, EXACT)
        self.im = im if isinstance(im, MPQ) else to_scalar(im, EXACT)

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, tuple):
            return cls(x[0], x[1])
        if isinstance(x, complex):
            raise TypeError("float complex cannot enter exact arithmetic")
        return cls(x, 0)

    def __add__(self, o):
        o = QI.coerce(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-QI.coerce(o))

    def __rsub__(self, o):
        return QI.coerce(o) - self

    def __mul__(self, o):
        o = QI.coerce(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    conj = conjugate

    def __truediv__(self, o):
        o = QI.coerce(o)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * QI(o.re / d, -o.im / d)

    def __rtruediv__(self, o):
        return QI.coerce(o) / self

    def __eq__(self, o):
        try:
            o = QI.coerce(o)
        except TypeError:
            return complex(self) == o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def cscalar(re, im, mode: str):
    """Build a complex scalar of the right type from parts."""
    if mode == EXACT:
        return QI(re, im)
    return complex(float(re), float(im))


def czero(mode: str):
    return QI(0, 0) if mode == EXACT else 0j


def cone(mode: str):
    return QI(1, 0) if mode == EXACT else 1 + 0j


def is_zero(x, mode: str, tol: float = 0.0) -> bool:
    if mode == EXACT:
        return QI.coerce(x) == 0
    return abs(x) <= tol


def parts(x) -> Tuple[object, object]:
    if isinstance(x, QI):
        return x.re, x.im
    x = complex(x)
    return x.real, x.imag


def abs2(x):
    if isinstance(x, QI):
        return x.abs2()
    return abs(x) ** 2


def to_complex(x) -> complex:
    return complex(x)


def fmt_scalar(x) -> str:
    """Short human string (exact rationals stay exact)."""
    if isinstance(x, QI):
        if x.im == 0:
            return str(x.re)
        if x.re == 0:
            return f"{x.im}i"
        return f"{x.re}{'+' if x.im > 0 else '-'}{abs(x.im)}i"
    x = complex(x)
    return f"{x.real:.12g}{'+' if x.imag >= 0 else '-'}{abs(x.imag):.12g}i"


# -- dense matrices ---------------------------------------------------------------

Matrix = List[List[object]]


def argmax_tied(values: Sequence[object], mode: str, last: bool = False,
                rtol: float = TIE_RTOL) -> int:
    """Index of the largest value with a fixed tie rule (first or last).

    Float values within ``rtol`` of the maximum count as ties, so that float
    and exact runs of the same input pick the same index.
    """
    if mode == EXACT:
        top = max(values)
        tied = [k for k, v in enumerate(values) if v == top]
    else:
        vals = [float(v) for v in values]
        top = max(vals)
        tied = [k for k, v in enumerate(vals) if v >= top - rtol * abs(top)]
    return tied[-1] if last else tied[0]


def to_numpy(m: Matrix) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in m], dtype=complex)


def _rref(m: Matrix, mode: str, tol: float):
    """Row reduce a copy; return (matrix, pivot columns)."""
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        if mode == EXACT:
            piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        else:
            best = max(range(r, rows), key=lambda i: abs(a[i][c]))
            piv = best if abs(a[best][c]) > tol else None
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c] if mode == FLOAT else QI(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and not is_zero(a[i][c], mode):
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix, mode: str, rtol: float = RANK_RTOL) -> int:
    if not m or not m[0]:
        return 0
    if mode == EXACT:
        return len(_rref(m, mode, 0.0)[1])
    s = np.linalg.svd(to_numpy(m), compute_uv=False)
    if len(s) == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def nullspace(m: Matrix, mode: str, rtol: float = RANK_RTOL) -> List[List[object]]:
    """Basis of {x : m x = 0}."""
    cols = len(m[0])
    if mode == EXACT:
        a, piv = _rref(m, mode, 0.0)
        free = [c for c in range(cols) if c not in piv]
        basis = []
        for f in free:
            v = [QI(0)] * cols
            v[f] = QI(1)
            for r, pc in enumerate(piv):
                v[pc] = -a[r][f]
            basis.append(v)
        return basis
    arr = to_numpy(m)
    u, s, vh = np.linalg.svd(arr)
    top = s[0] if len(s) else 0.0
    rk = int(np.sum(s > rtol * top)) if top > 0 else 0
    return [list(vh[k].conj()) for k in range(rk, cols)]


def solve(m: Matrix, b: Sequence[object], mode: str) -> List[object]:
    """Solve a square system m x = b."""
    n = len(m)
    aug = [list(m[i]) + [b[i]] for i in range(n)]
    a, piv = _rref(aug, mode, 1e-14)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [a[i][n] for i in range(n)]


def det(m: Matrix, mode: str):
    n = len(m)
    a = [list(row) for row in m]
    d = cone(mode)
    for c in range(n):
        if mode == EXACT:
            piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        else:
            piv = max(range(c, n), key=lambda i: abs(a[i][c]))
            if abs(a[piv][c]) == 0:
                piv = None
        if piv is None:
            return czero(mode)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d = d * a[c][c]
        inv = (QI(1) / a[c][c]) if mode == EXACT else 1 / a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] * inv
            if not is_zero(f, mode):
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def mat_mul(a: Matrix, b: Matrix, mode: str) -> Matrix:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), czero(mode))
             for j in range(len(b[0]))] for i in range(len(a))]


def conj_transpose(a: Matrix) -> Matrix:
    return [[a[j][i].conjugate() for j in range(len(a))] for i in range(len(a[0]))]


def max_abs_entry(a: Matrix) -> float:
    return max([0.0] + [abs(complex(x)) for row in a for x in row])


def rational(x) -> MPQ:
    """Parse '3/4', ints, Fractions into mpq."""
    if isinstance(x, str):
        return gmpy2.mpq(Fraction(x))
    return to_scalar(x, EXACT)
