"""Quick built-in identity checks behind ``crinv selftest``.

A seeded, smaller version of the property suites in ``tests/``: it needs
no test framework, and it exits with code 4 if any identity fails.
"""
from __future__ import annotations

import random
import sys
import warnings
from typing import Callable, List, Tuple

from .exterior import FormJet, VectorJet, ext_d, lie_bracket, pair
from .jets import EXACT, CJet, Jet, _basis

TRIALS = 25
NV = 3
ORDER = 4


def random_cjet(rng: random.Random, nvars: int = NV, order: int = ORDER) -> CJet:
    exps = _basis(nvars, order).exps
    re = {e: rng.randint(-3, 3) for e in exps if rng.random() < 0.5}
    im = {e: rng.randint(-3, 3) for e in exps if rng.random() < 0.5}
    return CJet(Jet.from_coeffs(re, nvars, order, EXACT), Jet.from_coeffs(im, nvars, order, EXACT))


def random_form(rng: random.Random, degree: int, nvars: int = NV, order: int = ORDER) -> FormJet:
    from itertools import combinations
    terms = {idx: random_cjet(rng, nvars, order) for idx in combinations(range(nvars), degree)}
    return FormJet.from_terms(terms, nvars, degree, order, EXACT)


def random_field(rng: random.Random, nvars: int = NV, order: int = ORDER) -> VectorJet:
    return VectorJet([random_cjet(rng, nvars, order) for _ in range(nvars)])


def _check_d_squared(rng) -> float:
    a = random_form(rng, rng.randint(0, 1))
    return ext_d(ext_d(a)).max_abs()


def _check_cartan(rng) -> float:
    a = random_form(rng, 1)
    v, w = random_field(rng), random_field(rng)
    lhs = pair(ext_d(a), [v, w])
    rhs = v.apply(pair(a, [w])) - w.apply(pair(a, [v])) - pair(a, [lie_bracket(v, w)])
    o = min(lhs.order, rhs.order)
    return (lhs.truncate(o) - rhs.truncate(o)).max_abs()


def _check_cone() -> float:
    from .cr_core import levi_form
    from .hypersurface import build_cr_frame, parse_defining_function, validate_point
    from .normalize import build_adapted_coframe, structure_scalars
    rho = parse_defining_function("(re(Z1))^2 + (re(Z2))^2 - (re(Z3))^2")
    frame = build_cr_frame(rho, validate_point(rho, ["3", "4", "5"], EXACT), 6)
    levi_form(frame)  # raises if the two Levi formulas disagree
    ss = structure_scalars(build_adapted_coframe(frame))
    return abs(complex(ss.k_hat) - 2j)


def _check_case2() -> float:
    from .parallelism5d import SyntheticScalars, solve_case2
    pd = solve_case2(SyntheticScalars(k_hat=0j, k_hat_bar1=1 + 0j))
    return abs(complex(pd.params["c1"]) - 0.5j) + pd.max_residual()


def _check_ambiguous() -> float:
    from .parallelism5d import AmbiguousCaseWarning, SyntheticScalars, classify_case
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        classify_case(SyntheticScalars(k_hat=(2 + 1e-7) * 1j))
    return 0.0 if any(issubclass(w.category, AmbiguousCaseWarning) for w in caught) else 1.0


def run_selftest(seed: int = 0, out=None) -> int:
    out = out or sys.stdout
    rng = random.Random(seed)
    checks: List[Tuple[str, Callable[[], float]]] = [
        ("d^2 = 0", lambda: max(_check_d_squared(rng) for _ in range(TRIALS))),
        ("Cartan formula", lambda: max(_check_cartan(rng) for _ in range(TRIALS))),
        ("light cone k_hat = 2i", _check_cone),
        ("synthetic c1 = i/2", _check_case2),
        ("ambiguous case warning", _check_ambiguous),
    ]
    failed = 0
    for name, fn in checks:
        try:
            worst = fn()
            ok = worst <= 1e-12
            detail = f"max residual {worst:.2e}"
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})", file=out)
    return 0 if not failed else 4

