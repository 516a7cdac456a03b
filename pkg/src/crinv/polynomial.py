"""Polynomials in Z, conj(Z) with Gaussian-rational coefficients.

:class:`CPoly` is the parsed form of a defining function: a sparse map from
exponent tuples ``(a_1..a_m, b_1..b_m)`` (powers of ``Z_j`` and
``conj(Z_j)``) to :class:`~crinv.scalars.QI`.  :class:`RealPoly` is the same
function written in the real coordinates ``x_1..x_m, y_1..y_m`` with
``Z_j = x_j + i y_j``; it has rational coefficients once the reality check
has passed.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import gmpy2

from .jets import EXACT, Jet, to_scalar
from .scalars import QI

Exps = Tuple[int, ...]


class CPoly:
    """Sparse polynomial in ``Z_1..Z_m, conj(Z_1)..conj(Z_m)``."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Dict[Exps, QI] | None = None):
        self.m = m
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def constant(cls, c, m: int) -> "CPoly":
        return cls(m, {(0,) * (2 * m): QI.coerce(c)})

    @classmethod
    def variable(cls, j: int, m: int, conjugate: bool = False) -> "CPoly":
        e = [0] * (2 * m)
        e[j + (m if conjugate else 0)] = 1
        return cls(m, {tuple(e): QI(1)})

    def is_constant(self) -> bool:
        return all(sum(k) == 0 for k in self.terms)

    def constant_term(self) -> QI:
        return self.terms.get((0,) * (2 * self.m), QI(0))

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def with_dim(self, m: int) -> "CPoly":
        """Same polynomial viewed in ``m >= self.m`` complex variables."""
        if m < self.m:
            raise ValueError("cannot drop variables")
        pad = (0,) * (m - self.m)
        return CPoly(m, {k[: self.m] + pad + k[self.m:] + pad: v for k, v in self.terms.items()})

    def __add__(self, o: "CPoly") -> "CPoly":
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out[k] + v if k in out else v
        return CPoly(self.m, out)

    def __neg__(self) -> "CPoly":
        return CPoly(self.m, {k: -v for k, v in self.terms.items()})

    def __sub__(self, o: "CPoly") -> "CPoly":
        return self + (-o)

    def __mul__(self, o) -> "CPoly":
        if not isinstance(o, CPoly):
            c = QI.coerce(o)
            return CPoly(self.m, {k: v * c for k, v in self.terms.items()})
        out: Dict[Exps, QI] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                p = v1 * v2
                out[k] = out[k] + p if k in out else p
        return CPoly(self.m, out)

    def __pow__(self, n: int) -> "CPoly":
        result = CPoly.constant(1, self.m)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self) -> "CPoly":
        m = self.m
        return CPoly(m, {k[m:] + k[:m]: v.conj() for k, v in self.terms.items()})

    def __eq__(self, o) -> bool:
        return isinstance(o, CPoly) and self.m == o.m and self.terms == o.terms

    def to_real(self) -> "RealPoly":
        """Expand in x, y.  Requires a real-valued polynomial."""
        m = self.m
        cache: Dict[Tuple[int, int, int], Dict[Exps, QI]] = {}

        def power(j: int, n: int, sign: int) -> Dict[Exps, QI]:
            # (x_j + sign*i*y_j)^n via the binomial theorem
            key = (j, n, sign)
            if key not in cache:
                out = {}
                binom = 1
                for r in range(n + 1):
                    e = [0] * (2 * m)
                    e[j] = n - r
                    e[m + j] = r
                    c = QI(binom, 0) * _i_power(r * (1 if sign > 0 else 3))
                    out[tuple(e)] = c
                    binom = binom * (n - r) // (r + 1)
                cache[key] = out
            return cache[key]

        total: Dict[Exps, QI] = {}
        for k, coeff in self.terms.items():
            acc = {(0,) * (2 * m): coeff}
            for j in range(m):
                for n, sign in ((k[j], 1), (k[m + j], -1)):
                    if n == 0:
                        continue
                    p = power(j, n, sign)
                    nxt: Dict[Exps, QI] = {}
                    for e1, c1 in acc.items():
                        for e2, c2 in p.items():
                            e = tuple(a + b for a, b in zip(e1, e2))
                            v = c1 * c2
                            nxt[e] = nxt[e] + v if e in nxt else v
                    acc = nxt
            for e, c in acc.items():
                total[e] = total[e] + c if e in total else c
        out = {}
        for e, c in total.items():
            if c.im != 0:
                raise ValueError("polynomial is not real valued")
            if c.re != 0:
                out[e] = c.re
        return RealPoly(2 * m, out)


def _i_power(k: int) -> QI:
    return (QI(1), QI(0, 1), QI(-1), QI(0, -1))[k % 4]


class RealPoly:
    """Sparse polynomial with rational coefficients in ``nvars`` real variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Exps, object]):
        self.nvars = nvars
        self.terms = {k: gmpy2.mpq(v) for k, v in terms.items() if v != 0}

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def partial(self, var: int) -> "RealPoly":
        out = {}
        for k, v in self.terms.items():
            if k[var]:
                e = list(k)
                e[var] -= 1
                out[tuple(e)] = v * k[var]
        return RealPoly(self.nvars, out)

    def evaluate(self, values: Sequence, mode: str = EXACT):
        """Value at a point given by scalars in ``mode``."""
        vals = [to_scalar(x, mode) for x in values]
        zero = to_scalar(0, mode)
        total = zero
        for k, c in self.terms.items():
            term = to_scalar(c, mode)
            for x, e in zip(vals, k):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def eval_jets(self, xs: Sequence[Jet]) -> Jet:
        """Substitute jets for the variables (power caching per variable)."""
        first = xs[0]
        powers: List[Dict[int, Jet]] = [dict() for _ in xs]

        def pw(i: int, e: int) -> Jet:
            cache = powers[i]
            if e not in cache:
                if e == 1:
                    cache[e] = xs[i]
                else:
                    half = pw(i, e // 2)
                    sq = half * half
                    cache[e] = sq * xs[i] if e % 2 else sq
            return cache[e]

        total = Jet.zero(first.nvars, min(x.order for x in xs), first.mode)
        for k, c in self.terms.items():
            term = None
            for i, e in enumerate(k):
                if e:
                    p = pw(i, e)
                    term = p if term is None else term * p
            if term is None:
                total = total + to_scalar(c, first.mode)
            else:
                total = total + term * to_scalar(c, first.mode)
        return total
