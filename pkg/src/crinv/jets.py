"""Truncated multivariate Taylor series ("jets") at a base point.

A :class:`Jet` of order ``N`` in ``V`` variables stores the Taylor
coefficients of a function in the displacement variables ``dx_1..dx_V``
up to total degree ``N``.  Coefficients live in a dense array indexed by a
graded monomial basis (all degree-0 monomials, then degree 1, ...), so a
jet of order ``n`` is a prefix of the basis for any larger order.

Two scalar modes are supported:

* ``"exact"``: ``gmpy2.mpq`` rationals in an object array,
* ``"float"``: ``float64``.

Exact values never silently turn into floats.  The public ``coeffs``
mapping is the sparse canonical view (multi-index -> scalar, zeros omitted).

Products use a cached table of index pairs ``(i, j) -> k`` grouped by the
target ``k``, so the Cauchy product is a gather, an elementwise product
and a segmented sum.
"""
from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from numbers import Integral, Rational, Real
from typing import Dict, Iterable, Tuple

import gmpy2
import numpy as np

from .errors import (
    DivisionBySingularJet,
    IrrationalResult,
    JetOrderExhausted,
    ModeMismatch,
    ShapeMismatch,
)

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

DEFAULT_ORDER = 6
DIV_EPS = 1e-10

MPQ = type(gmpy2.mpq(0))
_ZERO = gmpy2.mpq(0)
_ONE = gmpy2.mpq(1)


def default_order() -> int:
    """Jet order used when none is given; ``CR_JET_ORDER`` overrides it."""
    env = os.environ.get("CR_JET_ORDER")
    if env:
        return int(env)
    return DEFAULT_ORDER


def to_scalar(x, mode: str):
    """Coerce ``x`` into the scalar type of ``mode``."""
    if mode == EXACT:
        if isinstance(x, MPQ):
            return x
        if isinstance(x, (Integral, Fraction)) or type(x).__name__ == "mpz":
            return gmpy2.mpq(x)
        if isinstance(x, Rational):
            return gmpy2.mpq(x.numerator, x.denominator)
        if isinstance(x, str):
            return gmpy2.mpq(Fraction(x))
        raise ModeMismatch(f"cannot use {type(x).__name__} value {x!r} in exact mode")
    if mode == FLOAT:
        if isinstance(x, (Real, MPQ)) or type(x).__name__ == "mpz":
            return float(x)
        raise ModeMismatch(f"cannot use {type(x).__name__} value in float mode")
    raise ModeMismatch(f"unknown mode {mode!r}")


def num_monomials(nvars: int, order: int) -> int:
    return comb(nvars + order, order)


class _Basis:
    """Graded monomial basis for ``nvars`` variables up to ``order``."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        exps = []
        self.offsets = [0]
        for d in range(order + 1):
            for combo in combinations_with_replacement(range(nvars), d):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                exps.append(tuple(e))
            self.offsets.append(len(exps))
        # within each degree, combinations_with_replacement gives reverse-lex
        # order on exponent tuples; that is fine as long as it is fixed.
        self.exps = exps
        self.exp_array = np.array(exps, dtype=np.int64).reshape(len(exps), nvars)
        self.index: Dict[Tuple[int, ...], int] = {e: i for i, e in enumerate(exps)}
        self.degrees = self.exp_array.sum(axis=1) if nvars else np.zeros(1, dtype=np.int64)

    def size(self, order: int) -> int:
        return self.offsets[order + 1]


@lru_cache(maxsize=None)
def _basis(nvars: int, order: int) -> _Basis:
    return _Basis(nvars, order)


@lru_cache(maxsize=None)
def _mul_table(nvars: int, order: int):
    """Index arrays (I, J, K, starts) for the truncated Cauchy product."""
    b = _basis(nvars, order)
    base = order + 1
    weights = base ** np.arange(nvars, dtype=np.int64)
    keys = b.exp_array @ weights
    sorter = np.argsort(keys)
    skeys = keys[sorter]
    Is, Js, Ks = [], [], []
    for d1 in range(order + 1):
        r1 = np.arange(b.offsets[d1], b.offsets[d1 + 1])
        for d2 in range(order + 1 - d1):
            r2 = np.arange(b.offsets[d2], b.offsets[d2 + 1])
            ii = np.repeat(r1, len(r2))
            jj = np.tile(r2, len(r1))
            kk_keys = (b.exp_array[ii] + b.exp_array[jj]) @ weights
            kk = sorter[np.searchsorted(skeys, kk_keys)]
            Is.append(ii)
            Js.append(jj)
            Ks.append(kk)
    I = np.concatenate(Is)
    J = np.concatenate(Js)
    K = np.concatenate(Ks)
    perm = np.argsort(K, kind="stable")
    I, J, K = I[perm], J[perm], K[perm]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(K)) + 1))
    return I, J, K, starts


@lru_cache(maxsize=None)
def _partial_table(nvars: int, order: int, var: int):
    """(src, dst, factor): d/dx_var maps coefficient src to dst times factor."""
    b = _basis(nvars, order)
    src, dst, fac = [], [], []
    for i, e in enumerate(b.exps):
        if e[var] > 0 and sum(e) <= order:
            f = list(e)
            f[var] -= 1
            src.append(i)
            dst.append(b.index[tuple(f)])
            fac.append(e[var])
    return (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
            np.array(fac, dtype=np.int64))


def _zeros(n: int, mode: str) -> np.ndarray:
    if mode == EXACT:
        out = np.empty(n, dtype=object)
        out.fill(_ZERO)
        return out
    return np.zeros(n, dtype=np.float64)


class Jet:
    """Real truncated Taylor series of order ``order`` in ``nvars`` variables."""

    __slots__ = ("nvars", "order", "mode", "c")

    def __init__(self, nvars: int, order: int, mode: str, c: np.ndarray):
        self.nvars = nvars
        self.order = order
        self.mode = mode
        self.c = c

    # -- construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, order: int, mode: str) -> "Jet":
        return cls(nvars, order, mode, _zeros(num_monomials(nvars, order), mode))

    @classmethod
    def constant(cls, value, nvars: int, order: int, mode: str) -> "Jet":
        j = cls.zero(nvars, order, mode)
        j.c[0] = to_scalar(value, mode)
        return j

    @classmethod
    def variable(cls, var: int, nvars: int, order: int, mode: str, value=0) -> "Jet":
        """The coordinate function ``value + dx_var``."""
        j = cls.constant(value, nvars, order, mode)
        if order >= 1:
            j.c[1 + var] = to_scalar(1, mode)
        return j

    @classmethod
    def from_coeffs(cls, coeffs: Dict[Tuple[int, ...], object], nvars: int,
                    order: int, mode: str) -> "Jet":
        j = cls.zero(nvars, order, mode)
        idx = _basis(nvars, order).index
        for e, v in coeffs.items():
            e = tuple(e)
            if len(e) != nvars:
                raise ShapeMismatch(f"multi-index {e} has wrong length")
            if sum(e) <= order:
                j.c[idx[e]] = j.c[idx[e]] + to_scalar(v, mode)
        return j

    def lifted(self, nvars: int) -> "Jet":
        """The same function viewed in ``nvars >= self.nvars`` variables (new ones last)."""
        if nvars == self.nvars:
            return self
        src = _basis(self.nvars, self.order).exps
        dst = _basis(nvars, self.order).index
        pad = (0,) * (nvars - self.nvars)
        out = _zeros(num_monomials(nvars, self.order), self.mode)
        out[[dst[e + pad] for e in src]] = self.c
        return Jet(nvars, self.order, self.mode, out)

    # -- views --------------------------------------------------------------
    @property
    def coeffs(self) -> Dict[Tuple[int, ...], object]:
        """Sparse canonical map multi-index -> coefficient (no zeros)."""
        exps = _basis(self.nvars, self.order).exps
        return {exps[i]: self.c[i] for i in range(len(self.c)) if self.c[i] != 0}

    def value(self):
        """Constant term, i.e. the value at the base point."""
        return self.c[0]

    def coefficient(self, exps: Tuple[int, ...]):
        return self.c[_basis(self.nvars, self.order).index[tuple(exps)]]

    def max_abs(self) -> float:
        if len(self.c) == 0:
            return 0.0
        return float(np.max(np.abs(self.c.astype(np.float64))))

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.mode == EXACT and tol == 0.0:
            return not any(x != 0 for x in self.c)
        return self.max_abs() <= tol

    def like(self, c: np.ndarray, order: int | None = None) -> "Jet":
        return Jet(self.nvars, self.order if order is None else order, self.mode, c)

    def copy(self) -> "Jet":
        return self.like(self.c.copy())

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderExhausted(f"cannot raise order {self.order} to {order}")
        if order < 0:
            raise JetOrderExhausted("negative order")
        return self.like(self.c[: num_monomials(self.nvars, order)].copy(), order)

    def to_float(self) -> "Jet":
        if self.mode == FLOAT:
            return self
        return Jet(self.nvars, self.order, FLOAT, self.c.astype(np.float64))

    def scalar(self, x):
        return to_scalar(x, self.mode)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Jet") -> None:
        if self.mode != other.mode:
            raise ModeMismatch(f"{self.mode} vs {other.mode}")
        if self.nvars != other.nvars:
            raise ShapeMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _align(self, other):
        """Return (a_coeffs, b_coeffs, order) at the common order."""
        if not isinstance(other, Jet):
            return None
        self._check(other)
        n = min(self.order, other.order)
        m = num_monomials(self.nvars, n)
        return self.c[:m], other.c[:m], n

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, n = self._align(other)
            return Jet(self.nvars, n, self.mode, a + b)
        out = self.copy()
        out.c[0] = out.c[0] + to_scalar(other, self.mode)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self.like(-self.c)

    def __sub__(self, other):
        if isinstance(other, Jet):
            a, b, n = self._align(other)
            return Jet(self.nvars, n, self.mode, a - b)
        return self + (-to_scalar(other, self.mode))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            s = to_scalar(other, self.mode)
            return self.like(self.c * s)
        a, b, n = self._align(other)
        return Jet(self.nvars, n, self.mode, _cauchy(a, b, self.nvars, n, self.mode))

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        """Multiplicative inverse by Newton iteration x <- x (2 - b x)."""
        b0 = self.c[0]
        if self.mode == EXACT:
            if b0 == 0:
                raise DivisionBySingularJet("constant term is zero")
        elif abs(b0) <= DIV_EPS:
            raise DivisionBySingularJet(f"constant term {b0!r} below div_eps")
        one = to_scalar(1, self.mode)
        x = Jet.constant(one / b0, self.nvars, 0, self.mode)
        k = 0
        while k < self.order:
            k = min(2 * k + 1, self.order)
            bk = self.truncate(k)
            xk = Jet(self.nvars, k, self.mode, _pad(x.c, num_monomials(self.nvars, k), self.mode))
            x = xk * (2 - bk * xk)
        if self.order == 0:
            return Jet.constant(one / b0, self.nvars, 0, self.mode)
        return x

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        s = to_scalar(other, self.mode)
        if s == 0:
            raise DivisionBySingularJet("division by zero scalar")
        return self.like(self.c * (to_scalar(1, self.mode) / s))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ModeMismatch("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        result = Jet.constant(1, self.nvars, self.order, self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def partial(self, var: int) -> "Jet":
        """Formal partial derivative in variable ``var``; order drops by one."""
        if not 0 <= var < self.nvars:
            raise ShapeMismatch(f"variable {var} out of range")
        if self.order == 0:
            raise JetOrderExhausted("cannot differentiate an order-0 jet")
        n = self.order - 1
        src, dst, fac = _partial_table(self.nvars, self.order, var)
        out = _zeros(num_monomials(self.nvars, n), self.mode)
        if len(src):
            if self.mode == EXACT:
                out[dst] = self.c[src] * fac.astype(object)
            else:
                out[dst] = self.c[src] * fac
        return Jet(self.nvars, n, self.mode, out)

    def sqrt(self) -> "Jet":
        """Square root with positive constant term (Newton iteration)."""
        a0 = self.c[0]
        if self.mode == EXACT:
            r = exact_sqrt(a0)
        else:
            if a0 <= 0:
                raise DivisionBySingularJet("sqrt needs a positive constant term")
            r = float(np.sqrt(a0))
        x = Jet.constant(r, self.nvars, 0, self.mode)
        k = 0
        while k < self.order:
            k = min(2 * k + 1, self.order)
            ak = self.truncate(k)
            xk = Jet(self.nvars, k, self.mode, _pad(x.c, num_monomials(self.nvars, k), self.mode))
            x = (xk + ak / xk) * to_scalar(Fraction(1, 2), self.mode)
        if self.order == 0:
            return Jet.constant(r, self.nvars, 0, self.mode)
        return x

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        shown = ", ".join(f"{e}: {v}" for e, v in terms[:6])
        more = "" if len(terms) <= 6 else f", ... ({len(terms)} terms)"
        return f"Jet(order={self.order}, nvars={self.nvars}, {self.mode}, {{{shown}{more}}})"


def exact_sqrt(q) -> MPQ:
    q = gmpy2.mpq(q)
    if q < 0:
        raise IrrationalResult(f"sqrt of negative {q}")
    n, d = gmpy2.isqrt_rem(q.numerator), gmpy2.isqrt_rem(q.denominator)
    if n[1] != 0 or d[1] != 0:
        raise IrrationalResult(f"sqrt({q}) is not rational")
    return gmpy2.mpq(n[0], d[0])


def _pad(c: np.ndarray, size: int, mode: str) -> np.ndarray:
    if len(c) >= size:
        return c[:size]
    out = _zeros(size, mode)
    out[: len(c)] = c
    return out


def _cauchy(a: np.ndarray, b: np.ndarray, nvars: int, order: int, mode: str) -> np.ndarray:
    I, J, K, starts = _mul_table(nvars, order)
    m = len(a)
    if mode == FLOAT:
        return np.bincount(K, weights=a[I] * b[J], minlength=m)
    nza = a != 0
    if not nza.any():
        return _zeros(m, mode)
    nzb = b != 0
    if nza.all() and nzb.all():
        return np.add.reduceat(a[I] * b[J], starts)
    mask = nza[I] & nzb[J]
    out = _zeros(m, mode)
    if not mask.any():
        return out
    Km = K[mask]
    prods = a[I[mask]] * b[J[mask]]
    first = np.concatenate(([0], np.flatnonzero(np.diff(Km)) + 1))
    out[Km[first]] = np.add.reduceat(prods, first)
    return out


class CJet:
    """Complex jet stored as a pair of real jets (re, im) in one mode."""

    __slots__ = ("re", "im")

    def __init__(self, re: Jet, im: Jet | None = None):
        if im is None:
            im = Jet.zero(re.nvars, re.order, re.mode)
        if re.mode != im.mode:
            raise ModeMismatch("real and imaginary parts in different modes")
        if re.nvars != im.nvars:
            raise ShapeMismatch("real and imaginary parts with different nvars")
        if re.order != im.order:
            n = min(re.order, im.order)
            re, im = re.truncate(n), im.truncate(n)
        self.re = re
        self.im = im

    # -- construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, order: int, mode: str) -> "CJet":
        return cls(Jet.zero(nvars, order, mode), Jet.zero(nvars, order, mode))

    @classmethod
    def constant(cls, value, nvars: int, order: int, mode: str) -> "CJet":
        re, im = split_complex(value)
        return cls(Jet.constant(re, nvars, order, mode), Jet.constant(im, nvars, order, mode))

    @property
    def nvars(self) -> int:
        return self.re.nvars

    @property
    def order(self) -> int:
        return self.re.order

    @property
    def mode(self) -> str:
        return self.re.mode

    def value(self) -> Tuple[object, object]:
        return self.re.c[0], self.im.c[0]

    def cvalue(self) -> complex:
        return complex(float(self.re.c[0]), float(self.im.c[0]))

    def conj(self) -> "CJet":
        return CJet(self.re, -self.im)

    def truncate(self, order: int) -> "CJet":
        return CJet(self.re.truncate(order), self.im.truncate(order))

    def lifted(self, nvars: int) -> "CJet":
        return CJet(self.re.lifted(nvars), self.im.lifted(nvars))

    def to_float(self) -> "CJet":
        return CJet(self.re.to_float(), self.im.to_float())

    def max_abs(self) -> float:
        return max(self.re.max_abs(), self.im.max_abs())

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.re.is_zero(tol) and self.im.is_zero(tol)

    def abs2(self) -> Jet:
        return self.re * self.re + self.im * self.im

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, CJet):
            return CJet(self.re + other.re, self.im + other.im)
        if isinstance(other, Jet):
            return CJet(self.re + other, self.im)
        re, im = split_complex(other)
        return CJet(self.re + re, self.im + im)

    __radd__ = __add__

    def __neg__(self):
        return CJet(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CJet):
            a, b, c, d = self.re, self.im, other.re, other.im
            k1 = c * (a + b)
            k2 = a * (d - c)
            k3 = b * (c + d)
            return CJet(k1 - k3, k1 + k2)
        if isinstance(other, Jet):
            return CJet(self.re * other, self.im * other)
        re, im = split_complex(other)
        if im == 0:
            return CJet(self.re * re, self.im * re)
        if re == 0:
            return CJet(self.im * (-im), self.re * im)
        return CJet(self.re * re - self.im * im, self.re * im + self.im * re)

    __rmul__ = __mul__

    def inverse(self) -> "CJet":
        inv = self.abs2().inverse()
        return CJet(self.re * inv, -(self.im * inv))

    def __truediv__(self, other):
        if isinstance(other, CJet):
            return self * other.inverse()
        if isinstance(other, Jet):
            inv = other.inverse()
            return CJet(self.re * inv, self.im * inv)
        re, im = split_complex(other)
        if self.mode == EXACT:
            re, im = to_scalar(re, EXACT), to_scalar(im, EXACT)
        den = re * re + im * im
        if den == 0:
            raise DivisionBySingularJet("division by zero scalar")
        return self * _make_complex(re / den, -im / den)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CJet.constant(1, self.nvars, self.order, self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def partial(self, var: int) -> "CJet":
        return CJet(self.re.partial(var), self.im.partial(var))

    def __repr__(self) -> str:
        return f"CJet(re={self.re!r}, im={self.im!r})"


def _make_complex(re, im):
    return (re, im)


def split_complex(value) -> Tuple[object, object]:
    """Split a scalar into (re, im) without losing exactness."""
    if type(value).__name__ == "QI":
        return value.re, value.im
    if isinstance(value, tuple) and len(value) == 2:
        return value
    if isinstance(value, complex):
        return value.real, value.imag
    if type(value).__name__ == "mpc":
        return float(value.real), float(value.imag)
    return value, 0


def I_UNIT(nvars: int, order: int, mode: str) -> CJet:
    return CJet.constant((0, 1), nvars, order, mode)


def common_order(*jets: Iterable) -> int:
    return min(j.order for j in jets)
