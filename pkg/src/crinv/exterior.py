"""Complexified exterior algebra with jet coefficients.

Forms are stored against the coordinate basis ``dx_1..dx_V`` of whatever
real coordinates the jets use (the ambient ``2n+2`` coordinates, a
``2n+1``-dimensional chart of M, or chart plus fiber coordinates).

Pairing convention.  A k-form is evaluated on k vectors by the determinant
rule, e.g. ``(dx^dy)(v, w) = v^x w^y - v^y w^x``.  Interior products are
``(v ⌟ a)(w, ...) = a(v, w, ...)``.  With this normalization the Cartan
formula holds with coefficient one::

    da(v, w) = v(a(w)) - w(a(v)) - a([v, w])

so the two Levi form formulas ``(1/2i) <L_Ā ⌟ dθ, L_B>`` and
``(1/2i) <θ, [L_B, L_Ā]>`` agree exactly.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .errors import JetOrderExhausted, ShapeMismatch
from .jets import CJet, Jet

Index = Tuple[int, ...]


def _as_cjet(x, like: CJet) -> CJet:
    if isinstance(x, CJet):
        return x
    if isinstance(x, Jet):
        return CJet(x)
    return CJet.constant(x, like.nvars, like.order, like.mode)


def _merge_sign(a: Index, b: Index) -> Tuple[int, Index] | None:
    """Sign and sorted index of dx_a ^ dx_b, or None if they overlap."""
    if set(a) & set(b):
        return None
    merged = list(a) + list(b)
    # count inversions
    inv = 0
    for i in range(len(a)):
        for j in b:
            if a[i] > j:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(merged))


class FormJet:
    """A k-form ``sum_I f_I dx_I`` with complex jet coefficients."""

    __slots__ = ("nvars", "degree", "terms", "order", "mode")

    def __init__(self, nvars: int, degree: int, terms: Dict[Index, CJet], order: int, mode: str):
        self.nvars = nvars
        self.degree = degree
        # a coefficient is only known to the order of the form it belongs to
        self.terms = {k: (c.truncate(order) if c.order > order else c) for k, c in terms.items()}
        self.order = order
        self.mode = mode

    # -- construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, degree: int, order: int, mode: str) -> "FormJet":
        return cls(nvars, degree, {}, order, mode)

    @classmethod
    def from_terms(cls, terms: Dict[Index, object], nvars: int, degree: int,
                   order: int, mode: str) -> "FormJet":
        out: Dict[Index, CJet] = {}
        for idx, f in terms.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ShapeMismatch(f"index {idx} does not have length {degree}")
            if any(i < 0 or i >= nvars for i in idx):
                raise ShapeMismatch(f"index {idx} out of range")
            if len(set(idx)) < len(idx):
                continue
            order_idx = tuple(sorted(idx))
            sign = _perm_sign(idx)
            c = f if isinstance(f, CJet) else (CJet(f) if isinstance(f, Jet)
                                                else CJet.constant(f, nvars, order, mode))
            c = c * sign
            if order_idx in out:
                out[order_idx] = out[order_idx] + c
            else:
                out[order_idx] = c
        o = min([order] + [c.order for c in out.values()])
        return cls(nvars, degree, out, o, mode)

    @classmethod
    def one_form(cls, comps: Sequence[CJet | Jet]) -> "FormJet":
        """1-form with the given coefficients against dx_1..dx_V."""
        first = comps[0]
        nvars = len(comps)
        terms = {}
        for i, c in enumerate(comps):
            c = c if isinstance(c, CJet) else CJet(c)
            if not c.is_zero():
                terms[(i,)] = c
        order = min(c.order for c in comps)
        return cls(nvars, 1, terms, order, first.mode)

    @classmethod
    def function(cls, f: CJet | Jet) -> "FormJet":
        f = f if isinstance(f, CJet) else CJet(f)
        return cls(f.nvars, 0, {(): f}, f.order, f.mode)

    # -- basic queries ------------------------------------------------------
    def coeff(self, idx: Index) -> CJet:
        """Coefficient of dx_idx (any order of idx, with sign)."""
        s = tuple(sorted(idx))
        if len(set(idx)) < len(idx):
            return CJet.zero(self.nvars, self.order, self.mode)
        c = self.terms.get(s)
        if c is None:
            return CJet.zero(self.nvars, self.order, self.mode)
        return c * _perm_sign(idx)

    def components(self) -> List[CJet]:
        """Coefficient list of a 1-form."""
        if self.degree != 1:
            raise ShapeMismatch("components() needs a 1-form")
        return [self.coeff((i,)) for i in range(self.nvars)]

    def conj(self) -> "FormJet":
        return FormJet(self.nvars, self.degree, {k: v.conj() for k, v in self.terms.items()},
                       self.order, self.mode)

    def real_part(self) -> "FormJet":
        return (self + self.conj()) * _half(self)

    def imag_part(self) -> "FormJet":
        return (self - self.conj()) * _minus_half_i(self)

    def lifted(self, nvars: int) -> "FormJet":
        """Pull back along the projection forgetting trailing variables."""
        return FormJet(nvars, self.degree, {k: c.lifted(nvars) for k, c in self.terms.items()},
                       self.order, self.mode)

    def truncate(self, order: int) -> "FormJet":
        return FormJet(self.nvars, self.degree,
                       {k: v.truncate(order) for k, v in self.terms.items()}, order, self.mode)

    def to_float(self) -> "FormJet":
        return FormJet(self.nvars, self.degree, {k: v.to_float() for k, v in self.terms.items()},
                       self.order, "float")

    def max_abs(self) -> float:
        return max([0.0] + [c.max_abs() for c in self.terms.values()])

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(c.is_zero(tol) for c in self.terms.values())

    def value_at_base(self) -> Dict[Index, Tuple[object, object]]:
        return {k: v.value() for k, v in self.terms.items()}

    # -- linear structure ---------------------------------------------------
    def _check(self, other: "FormJet") -> None:
        if not isinstance(other, FormJet):
            raise ShapeMismatch("expected a FormJet")
        if self.nvars != other.nvars:
            raise ShapeMismatch(f"{self.nvars} vs {other.nvars} variables")
        if self.mode != other.mode:
            from .errors import ModeMismatch
            raise ModeMismatch(f"{self.mode} vs {other.mode}")

    def __add__(self, other: "FormJet") -> "FormJet":
        self._check(other)
        if self.degree != other.degree:
            raise ShapeMismatch(f"adding forms of degree {self.degree} and {other.degree}")
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        order = min(self.order, other.order)
        return FormJet(self.nvars, self.degree, terms, order, self.mode)

    def __neg__(self) -> "FormJet":
        return FormJet(self.nvars, self.degree, {k: -v for k, v in self.terms.items()},
                       self.order, self.mode)

    def __sub__(self, other: "FormJet") -> "FormJet":
        return self + (-other)

    def __mul__(self, f) -> "FormJet":
        """Multiply by a function (CJet/Jet) or a scalar."""
        if isinstance(f, FormJet):
            return wedge(self, f)
        terms = {k: v * f for k, v in self.terms.items()}
        order = self.order
        if isinstance(f, (CJet, Jet)):
            order = min(order, f.order)
        return FormJet(self.nvars, self.degree, terms, order, self.mode)

    __rmul__ = __mul__

    def __truediv__(self, f) -> "FormJet":
        if isinstance(f, CJet):
            return self * f.inverse()
        if isinstance(f, Jet):
            return self * f.inverse()
        return FormJet(self.nvars, self.degree, {k: v / f for k, v in self.terms.items()},
                       self.order, self.mode)

    def __xor__(self, other: "FormJet") -> "FormJet":
        return wedge(self, other)

    def __repr__(self) -> str:
        return f"FormJet(degree={self.degree}, nvars={self.nvars}, order={self.order}, terms={sorted(self.terms)})"


def _half(f: FormJet):
    from fractions import Fraction
    return Fraction(1, 2) if f.mode == "exact" else 0.5


def _minus_half_i(f: FormJet):
    from fractions import Fraction
    return (0, Fraction(-1, 2)) if f.mode == "exact" else (0.0, -0.5)


def _perm_sign(idx: Sequence[int]) -> int:
    inv = 0
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                inv += 1
    return -1 if inv % 2 else 1


class VectorJet:
    """Complex vector field ``sum_k v^k d/dx_k`` with jet components."""

    __slots__ = ("comps",)

    def __init__(self, comps: Sequence[CJet | Jet]):
        self.comps = [c if isinstance(c, CJet) else CJet(c) for c in comps]

    @classmethod
    def coordinate(cls, k: int, nvars: int, order: int, mode: str) -> "VectorJet":
        return cls([CJet.constant(1 if i == k else 0, nvars, order, mode) for i in range(nvars)])

    @property
    def nvars(self) -> int:
        return len(self.comps)

    @property
    def order(self) -> int:
        return min(c.order for c in self.comps)

    @property
    def mode(self) -> str:
        return self.comps[0].mode

    def __add__(self, other: "VectorJet") -> "VectorJet":
        if other.nvars != self.nvars:
            raise ShapeMismatch("vector fields of different dimension")
        return VectorJet([a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "VectorJet":
        return VectorJet([-a for a in self.comps])

    def __sub__(self, other: "VectorJet") -> "VectorJet":
        return self + (-other)

    def __mul__(self, f) -> "VectorJet":
        return VectorJet([a * f for a in self.comps])

    __rmul__ = __mul__

    def conj(self) -> "VectorJet":
        return VectorJet([a.conj() for a in self.comps])

    def truncate(self, order: int) -> "VectorJet":
        return VectorJet([a.truncate(order) for a in self.comps])

    def to_float(self) -> "VectorJet":
        return VectorJet([a.to_float() for a in self.comps])

    def apply(self, f: CJet | Jet) -> CJet:
        """Directional derivative v(f); costs one order."""
        f = f if isinstance(f, CJet) else CJet(f)
        if f.order == 0:
            raise JetOrderExhausted("cannot differentiate an order-0 jet")
        total = None
        for k, vk in enumerate(self.comps):
            if vk.is_zero():
                continue
            term = vk * f.partial(k)
            total = term if total is None else total + term
        if total is None:
            return CJet.zero(f.nvars, f.order - 1, f.mode)
        return total

    def values(self) -> List[Tuple[object, object]]:
        return [c.value() for c in self.comps]

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.comps)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(c.is_zero(tol) for c in self.comps)

    def __repr__(self) -> str:
        return f"VectorJet(nvars={self.nvars}, order={self.order})"


# -- operations -----------------------------------------------------------------

def wedge(a: FormJet, b: FormJet) -> FormJet:
    a._check(b)
    deg = a.degree + b.degree
    order = min(a.order, b.order)
    if deg > a.nvars:
        return FormJet.zero(a.nvars, deg, order, a.mode)
    terms: Dict[Index, CJet] = {}
    for ia, fa in a.terms.items():
        for ib, fb in b.terms.items():
            m = _merge_sign(ia, ib)
            if m is None:
                continue
            sign, idx = m
            prod = fa * fb
            if sign < 0:
                prod = -prod
            terms[idx] = terms[idx] + prod if idx in terms else prod
    return FormJet(a.nvars, deg, terms, order, a.mode)


def ext_d(a: FormJet) -> FormJet:
    """Exterior derivative; costs one jet order."""
    if a.order < 1:
        raise JetOrderExhausted("exterior derivative of an order-0 form")
    terms: Dict[Index, CJet] = {}
    for idx, f in a.terms.items():
        for k in range(a.nvars):
            if k in idx:
                continue
            dk = f.partial(k)
            if dk.is_zero():
                continue
            pos = sum(1 for i in idx if i < k)
            new = tuple(sorted(idx + (k,)))
            if pos % 2:
                dk = -dk
            terms[new] = terms[new] + dk if new in terms else dk
    return FormJet(a.nvars, a.degree + 1, terms, a.order - 1, a.mode)


def interior(v: VectorJet, a: FormJet) -> FormJet:
    """Contraction v ⌟ a, inserting v in the first slot."""
    if a.degree < 1:
        raise ShapeMismatch("interior product needs degree >= 1")
    if v.nvars != a.nvars:
        raise ShapeMismatch("vector field and form of different dimension")
    terms: Dict[Index, CJet] = {}
    for idx, f in a.terms.items():
        for p, i in enumerate(idx):
            vi = v.comps[i]
            if vi.is_zero():
                continue
            rest = idx[:p] + idx[p + 1:]
            c = vi * f
            if p % 2:
                c = -c
            terms[rest] = terms[rest] + c if rest in terms else c
    order = min(a.order, v.order)
    return FormJet(a.nvars, a.degree - 1, terms, order, a.mode)


def pair(a: FormJet, vs: Sequence[VectorJet]) -> CJet:
    """Full contraction <a, (v_1, ..., v_k)> with the determinant convention."""
    if len(vs) != a.degree:
        raise ShapeMismatch(f"{a.degree}-form paired with {len(vs)} vectors")
    cur = a
    for v in vs:
        cur = interior(v, cur)
    c = cur.terms.get(())
    order = min([a.order] + [v.order for v in vs])
    if c is None:
        return CJet.zero(a.nvars, order, a.mode)
    return c


def lie_bracket(v: VectorJet, w: VectorJet) -> VectorJet:
    """[v, w]^k = v(w^k) - w(v^k); costs one order."""
    if v.nvars != w.nvars:
        raise ShapeMismatch("vector fields of different dimension")
    return VectorJet([v.apply(wk) - w.apply(vk) for vk, wk in zip(v.comps, w.comps)])


def exact_differential(f: CJet | Jet) -> FormJet:
    """df as a 1-form."""
    f = f if isinstance(f, CJet) else CJet(f)
    return FormJet.one_form([f.partial(k) for k in range(f.nvars)])


def coordinate_form(k: int, nvars: int, order: int, mode: str) -> FormJet:
    return FormJet.one_form([CJet.constant(1 if i == k else 0, nvars, order, mode)
                             for i in range(nvars)])


def form_matrix(forms: Sequence[FormJet]) -> List[List[CJet]]:
    """Rows of 1-form coefficients."""
    return [f.components() for f in forms]
