"""Defining functions, base points and the CR frame of a real hypersurface.

Grammar of a defining function (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := INT | VAR | FUNC '(' expr ')' | '(' expr ')'
    VAR    := 'Z1' .. 'Z9'
    FUNC   := 'conj' | 're' | 'im'

``p/q`` rational literals are ordinary division by a constant.  Division by
anything that involves a variable is rejected.  ``re`` and ``im`` desugar
to ``(e + conj e)/2`` and ``(e - conj e)/(2i)``.

Real coordinates are ordered ``x_1..x_m, y_1..y_m`` with ``Z_j = x_j + i y_j``.

Two realizations of the CR structure are built here:

* the ambient frame (:class:`CRFrame`): vector fields
  ``L_bar_j = d/dconj(Z_j) - (rho_{conj Z_j}/rho_{conj Z_k}) d/dconj(Z_k)``
  and ``theta = (i/2)(d'rho - d''rho)``, as jets in the ``2m`` real
  coordinates.  ``L_bar_j`` annihilates ``rho`` identically, so the fields are
  tangent to every level set and the Section-1 pairings can be computed
  ambiently;
* a chart of M (:class:`Chart`): one real coordinate is solved from
  ``rho = 0`` as a jet in the other ``2m - 1`` by Newton's method.  Identities
  that hold only on M (structure equations, curvature) are checked there.
"""
from __future__ import annotations

import re as _re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import gmpy2

from .errors import (
    DefiningFunctionSyntaxError,
    DegenerateCompletion,
    JetOrderExhausted,
    NotOnSurface,
    NotRealValued,
    ShapeMismatch,
    SingularPoint,
    UnsupportedOperation,
)
from .exterior import FormJet, VectorJet, exact_differential, interior, wedge
from .jets import EXACT, FLOAT, CJet, Jet, to_scalar
from .polynomial import CPoly, RealPoly
from .scalars import QI, argmax_tied

ON_SURFACE_TOL = 1e-10

_TOKEN = _re.compile(r"\s*(?:(\d+)|(Z[1-9])|(conj|re|im)|(.))")


# -- parsing -------------------------------------------------------------------------

class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(src):
            if src[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(src, pos)
            start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
            if m.group(1):
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2):
                self.tokens.append(("var", m.group(2), start))
            elif m.group(3):
                self.tokens.append(("func", m.group(3), start))
            else:
                ch = m.group(4)
                if ch not in "+-*/^()":
                    raise DefiningFunctionSyntaxError(f"unexpected character {ch!r}", start)
                self.tokens.append(("op", ch, start))
            pos = m.end()
        self.i = 0
        self.max_var = 0
        for kind, text, _ in self.tokens:
            if kind == "var":
                self.max_var = max(self.max_var, int(text[1:]))
        self.m = max(self.max_var, 1)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.src))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text: str):
        tok = self.take()
        if tok[1] != text:
            raise DefiningFunctionSyntaxError(f"expected {text!r}, found {tok[1] or 'end of input'!r}", tok[2])

    def parse(self) -> CPoly:
        if not self.tokens:
            raise DefiningFunctionSyntaxError("empty expression", 0)
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise DefiningFunctionSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self) -> CPoly:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> CPoly:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op, _, pos = self.take()[1], None, self.peek()[2]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if not rhs.is_constant():
                    raise UnsupportedOperation(f"division by a non-constant expression at position {pos}")
                c = rhs.constant_term()
                if c == 0:
                    raise UnsupportedOperation(f"division by zero at position {pos}")
                e = e * (QI(1) / c)
        return e

    def unary(self) -> CPoly:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self) -> CPoly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "-":
                raise UnsupportedOperation(f"negative exponent at position {tok[2]}")
            paren = False
            if tok[0] == "op" and tok[1] == "(":
                self.take()
                paren = True
                tok = self.peek()
            if tok[0] != "int":
                raise DefiningFunctionSyntaxError("exponent must be a non-negative integer", tok[2])
            self.take()
            if paren:
                self.expect(")")
            return base ** int(tok[1])
        return base

    def atom(self) -> CPoly:
        tok = self.take()
        kind, text, pos = tok
        if kind == "int":
            return CPoly.constant(int(text), self.m)
        if kind == "var":
            return CPoly.variable(int(text[1:]) - 1, self.m)
        if kind == "func":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            if text == "conj":
                return inner.conj()
            if text == "re":
                return (inner + inner.conj()) * QI(Fraction(1, 2))
            return (inner - inner.conj()) * QI(0, Fraction(-1, 2))
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise DefiningFunctionSyntaxError("unexpected end of input", pos)
        raise DefiningFunctionSyntaxError(f"unexpected {text!r}", pos)


@dataclass(frozen=True)
class DefiningFunction:
    """A parsed, real-valued polynomial defining function."""

    src: str
    n_plus_1: int
    poly: CPoly
    real: RealPoly
    degree: int
    reality_checked: bool = True

    def with_dim(self, m: int) -> "DefiningFunction":
        """The same function viewed in ``C^m`` (extra variables unused)."""
        if m == self.n_plus_1:
            return self
        p = self.poly.with_dim(m)
        return DefiningFunction(self.src, m, p, p.to_real(), self.degree)

    @property
    def n(self) -> int:
        return self.n_plus_1 - 1


def parse_defining_function(src: str, dim: Optional[int] = None) -> DefiningFunction:
    """Parse and reality-check ``src``; ``dim`` forces the ambient dimension."""
    parser = _Parser(src)
    if dim is not None:
        if dim < parser.max_var:
            raise ShapeMismatch(f"expression uses Z{parser.max_var} but dim = {dim}")
        parser.m = dim
    poly = parser.parse()
    if poly != poly.conj():
        raise NotRealValued(f"{src!r} is not real valued")
    return DefiningFunction(src, poly.m, poly, poly.to_real(), poly.degree)


# -- base points -----------------------------------------------------------------------

_COMPLEX_LIT = _re.compile(r"^\s*([+-]?[^+\-i]+?)?\s*(?:([+-])\s*([^+\-i]*)\s*\*?\s*i)?\s*$")


def parse_scalar(text: str, mode: str):
    """Parse '3', '-3/4', '0.5' (float mode), '1+2i', '3i' into (re, im)."""
    t = text.strip().replace(" ", "")
    if t.endswith("i"):
        body = t[:-1]
        # split at the last sign that is not a leading sign or exponent sign
        cut = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                cut = k
                break
        if cut is None:
            re_s, im_s = "0", body
        else:
            re_s, im_s = body[:cut], body[cut:]
        if im_s in ("", "+"):
            im_s = "1"
        elif im_s == "-":
            im_s = "-1"
        return _real_scalar(re_s, mode), _real_scalar(im_s, mode)
    return _real_scalar(t, mode), to_scalar(0, mode)


def _real_scalar(t: str, mode: str):
    if mode == EXACT:
        try:
            return gmpy2.mpq(Fraction(t))
        except (ValueError, ZeroDivisionError) as exc:
            raise DefiningFunctionSyntaxError(f"bad number {t!r}", 0) from exc
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise DefiningFunctionSyntaxError(f"bad number {t!r}", 0) from exc


def _coerce_coord(c, mode: str):
    if isinstance(c, str):
        return parse_scalar(c, mode)
    if isinstance(c, QI):
        return to_scalar(c.re, mode), to_scalar(c.im, mode)
    if isinstance(c, tuple):
        return to_scalar(c[0], mode), to_scalar(c[1], mode)
    if isinstance(c, complex):
        if mode == EXACT:
            raise ShapeMismatch("complex floats are not allowed in exact mode")
        return c.real, c.imag
    return to_scalar(c, mode), to_scalar(0, mode)


@dataclass(frozen=True)
class BasePoint:
    """A validated point p0 of M."""

    coords: Tuple[Tuple[object, object], ...]
    mode: str
    rho_value: object
    gradient: Tuple[object, ...]
    on_surface: bool = True
    grad_nonzero: bool = True

    @property
    def real(self) -> List[object]:
        """Real coordinates x_1..x_m, y_1..y_m."""
        return [c[0] for c in self.coords] + [c[1] for c in self.coords]

    def label(self) -> str:
        out = []
        for re_, im_ in self.coords:
            out.append(str(re_) if im_ == 0 else f"{re_}{'+' if im_ >= 0 else '-'}{abs(im_)}i")
        return "(" + ", ".join(out) + ")"


def validate_point(rho: DefiningFunction, p: Sequence, mode: str = EXACT) -> BasePoint:
    """Check that ``p`` lies on M and that d(rho) does not vanish there."""
    if len(p) != rho.n_plus_1:
        raise ShapeMismatch(f"point has {len(p)} coordinates, expected {rho.n_plus_1}")
    coords = tuple(_coerce_coord(c, mode) for c in p)
    real = [c[0] for c in coords] + [c[1] for c in coords]
    val = rho.real.evaluate(real, mode)
    grad = tuple(rho.real.partial(v).evaluate(real, mode) for v in range(2 * rho.n_plus_1))
    if mode == EXACT:
        if val != 0:
            raise NotOnSurface(f"rho(p) = {val} != 0")
        if all(g == 0 for g in grad):
            raise SingularPoint("d(rho) vanishes at p")
    else:
        if abs(val) > ON_SURFACE_TOL:
            raise NotOnSurface(f"|rho(p)| = {abs(val):.3e} > {ON_SURFACE_TOL}")
        if max(abs(g) for g in grad) <= ON_SURFACE_TOL:
            raise SingularPoint("d(rho) vanishes at p")
    return BasePoint(coords, mode, val, grad)


# -- frames ----------------------------------------------------------------------------

def _solved_index(grad: Sequence, m: int) -> int:
    """argmax_k |rho_{conj Z_k}|, ties to the lowest index (0-based)."""
    mags = [grad[k] * grad[k] + grad[m + k] * grad[m + k] for k in range(m)]
    return argmax_tied(mags, FLOAT if isinstance(mags[0], float) else EXACT)


@dataclass
class CRFrame:
    """Ambient CR frame near p0.

    ``L_bar`` holds the n CR vector fields (complex jets against d/dx, d/dy),
    ``theta`` the real characteristic form, ``drho`` the differential of the
    defining function.  ``solved_index`` is 1-based; ``k`` is the 0-based
    index of the eliminated d/dconj(Z_k).
    """

    rho: DefiningFunction
    point: BasePoint
    order: int
    mode: str
    k: int
    L_bar: List[VectorJet]
    theta: FormJet
    drho: FormJet
    rho_jet: Jet
    others: List[int]
    _chart: Optional["Chart"] = field(default=None, repr=False)

    @property
    def solved_index(self) -> int:
        return self.k + 1

    @property
    def n(self) -> int:
        return self.rho.n

    @property
    def nvars(self) -> int:
        return 2 * self.rho.n_plus_1

    @property
    def L(self) -> List[VectorJet]:
        return [v.conj() for v in self.L_bar]

    def chart(self, order: Optional[int] = None) -> "Chart":
        order = self.order if order is None else order
        if self._chart is None or self._chart.order != order:
            self._chart = build_chart(self.rho, self.point, order)
        return self._chart


def ambient_coordinates(point: BasePoint, order: int) -> List[Jet]:
    real = point.real
    nv = len(real)
    return [Jet.variable(i, nv, order, point.mode, value=real[i]) for i in range(nv)]


def _wirtinger_bar(rho: DefiningFunction, xs: Sequence[Jet]) -> List[CJet]:
    """rho_{conj Z_j} = (rho_x + i rho_y)/2 evaluated on the given coordinates."""
    m = rho.n_plus_1
    half = to_scalar(Fraction(1, 2), xs[0].mode)
    out = []
    for j in range(m):
        rx = rho.real.partial(j).eval_jets(xs)
        ry = rho.real.partial(m + j).eval_jets(xs)
        out.append(CJet(rx * half, ry * half))
    return out


def build_cr_frame(rho: DefiningFunction, p: BasePoint, order: int) -> CRFrame:
    """Ambient frame (L_bar, theta, drho) as jets of the given order."""
    if order < 2:
        raise JetOrderExhausted("build_cr_frame needs order >= 2")
    m = rho.n_plus_1
    mode = p.mode
    xs = ambient_coordinates(p, order)
    nv = 2 * m
    k = _solved_index(p.gradient, m)
    rbar = _wirtinger_bar(rho, xs)
    inv_k = rbar[k].inverse()
    half = to_scalar(Fraction(1, 2), mode)

    def dbar(j: int, coeff: CJet) -> List[CJet]:
        # coeff * d/dconj(Z_j) = coeff/2 (d/dx_j + i d/dy_j)
        comps = [CJet.zero(nv, order, mode) for _ in range(nv)]
        comps[j] = coeff * half
        comps[m + j] = coeff * (0, half) if mode == EXACT else coeff * (0.0, 0.5)
        return comps

    one = CJet.constant(1, nv, order, mode)
    others = [j for j in range(m) if j != k]
    L_bar = []
    for j in others:
        a = dbar(j, one)
        b = dbar(k, -(rbar[j] * inv_k))
        L_bar.append(VectorJet([x + y for x, y in zip(a, b)]))
    # theta = (1/2) sum (rho_y dx - rho_x dy)
    comps = []
    for j in range(m):
        comps.append(CJet(rho.real.partial(m + j).eval_jets(xs) * half))
    for j in range(m):
        comps.append(CJet(-(rho.real.partial(j).eval_jets(xs) * half)))
    theta = FormJet.one_form(comps)
    drho = FormJet.one_form([CJet(rho.real.partial(v).eval_jets(xs)) for v in range(nv)])
    return CRFrame(rho, p, order, mode, k, L_bar, theta, drho, rho.real.eval_jets(xs), others)


def _solved_real(frame_or_grad, m: int, k: int) -> int:
    grad = frame_or_grad
    gx, gy = grad[k], grad[m + k]
    return k if gx * gx >= gy * gy else m + k


def reduce_mod_drho(a: FormJet, frame: CRFrame) -> FormJet:
    """Remove the d(rho) component relative to the completion {dx_i, i != s}.

    ``s`` is the real coordinate with the larger partial of rho in the solved
    complex direction.  The result is ``a - d(rho) ^ (d/dx_s ⌟ a)/rho_s`` and
    has no ``dx_s`` component.
    """
    m = frame.rho.n_plus_1
    s = _solved_real(frame.point.gradient, m, frame.k)
    rho_s = frame.drho.coeff((s,))
    v0 = rho_s.value()
    if v0[0] == 0 and v0[1] == 0:
        raise DegenerateCompletion("d(rho) has no component along the solved coordinate")
    if a.degree == 0:
        return a
    e_s = VectorJet.coordinate(s, a.nvars, a.order, a.mode)
    contracted = interior(e_s, a)
    if contracted.is_zero():
        return a
    return a - wedge(frame.drho, contracted) * rho_s.inverse()


# -- chart -------------------------------------------------------------------------------

@dataclass
class Chart:
    """M near p0 as a graph over 2m - 1 real coordinates.

    ``coords[i]`` is the jet of the i-th ambient real coordinate restricted to
    M, as a function of the chart variables; ``s`` is the solved coordinate.
    """

    rho: DefiningFunction
    point: BasePoint
    order: int
    mode: str
    s: int
    k: int
    chart_vars: List[int]
    coords: List[Jet]

    @property
    def nvars(self) -> int:
        return len(self.chart_vars)

    def eval(self, poly: RealPoly) -> Jet:
        return poly.eval_jets(self.coords)

    def d_coord(self, i: int) -> FormJet:
        return exact_differential(self.coords[i])

    def dZ(self, j: int) -> FormJet:
        m = self.rho.n_plus_1
        dx = self.d_coord(j)
        dy = self.d_coord(m + j)
        return dx + dy * ((0, 1) if self.mode == EXACT else (0.0, 1.0))

    def theta(self) -> FormJet:
        """Pullback of (1/2) sum (rho_y dx - rho_x dy)."""
        m = self.rho.n_plus_1
        half = to_scalar(Fraction(1, 2), self.mode)
        total = None
        for j in range(m):
            ry = self.eval(self.rho.real.partial(m + j)) * half
            rx = self.eval(self.rho.real.partial(j)) * half
            term = self.d_coord(j) * CJet(ry) - self.d_coord(m + j) * CJet(rx)
            total = term if total is None else total + term
        return total

    def pullback(self, a: FormJet) -> FormJet:
        """Pull an ambient form (jets centred at p0) back to the chart."""
        shifted = [c - c.value() for c in self.coords]
        comp = {}
        for idx, f in a.terms.items():
            g = CJet(compose(f.re, shifted), compose(f.im, shifted))
            comp[idx] = g
        d = [self.d_coord(i) for i in range(len(self.coords))]
        total = FormJet.zero(self.nvars, a.degree, self.order - 1, self.mode)
        for idx, g in comp.items():
            term = FormJet.function(g)
            for i in idx:
                term = wedge(term, d[i])
            total = total + term
        return total


def compose(f: Jet, subs: Sequence[Jet]) -> Jet:
    """f(subs) for jets ``subs`` with zero constant term (Horner by monomial)."""
    from .jets import _basis
    b = _basis(f.nvars, f.order)
    first = subs[0]
    order = min(f.order, min(s.order for s in subs))
    powers = [[Jet.constant(1, first.nvars, order, first.mode)] for _ in subs]
    total = Jet.zero(first.nvars, order, first.mode)
    for i, e in enumerate(b.exps[: len(f.c)]):
        c = f.c[i]
        if c == 0 or sum(e) > order:
            continue
        term = None
        for v, ev in enumerate(e):
            if ev:
                while len(powers[v]) <= ev:
                    powers[v].append(powers[v][-1] * subs[v])
                term = powers[v][ev] if term is None else term * powers[v][ev]
        total = total + (term * c if term is not None else c)
    return total


def build_chart(rho: DefiningFunction, p: BasePoint, order: int) -> Chart:
    """Solve rho = 0 for the solved real coordinate by Newton iteration."""
    m = rho.n_plus_1
    mode = p.mode
    k = _solved_index(p.gradient, m)
    s = _solved_real(p.gradient, m, k)
    real = p.real
    chart_vars = [i for i in range(2 * m) if i != s]
    nv = len(chart_vars)
    coords: List[Jet] = [None] * (2 * m)  # type: ignore[list-item]
    for c, i in enumerate(chart_vars):
        coords[i] = Jet.variable(c, nv, order, mode, value=real[i])
    rho_s = rho.real.partial(s)
    phi = Jet.zero(nv, order, mode)
    correct = 0
    while True:
        coords[s] = phi + real[s]
        f = rho.real.eval_jets(coords)
        g = rho_s.eval_jets(coords)
        phi = phi - f / g
        correct = 2 * correct + 1
        if correct > order:
            break
    coords[s] = phi + real[s]
    return Chart(rho, p, order, mode, s, k, chart_vars, coords)
