"""CR invariants of real hypersurfaces in C^{n+1}, computed on truncated jets.

Typical use::

    from crinv import analyze, AnalyzeOptions
    rep = analyze("(re(Z1))^2 + (re(Z2))^2 - (re(Z3))^2", ["3", "4", "5"])
    rep.to_dict()["k_hat"]   # {"re": "0", "im": "2"}
"""
from .cli_report import AnalyzeOptions, InvariantReport, analyze, compare_reports, run_corpus
from .corpus import CorpusEntry, Expectation, builtin_corpus, load_manifest, write_manifest
from .cr_core import (characteristic_checks, levi_form, nondegeneracy_order, psi3_tensor,
                      two_nondeg_test)
from .errors import CRError, Obstruction
from .exterior import FormJet, VectorJet, ext_d, interior, lie_bracket, pair, wedge
from .hypersurface import build_cr_frame, parse_defining_function, validate_point
from .jets import EXACT, FLOAT, CJet, Jet
from .lightcone import flatness_test, maurer_cartan, structure_equations
from .normalize import build_adapted_coframe, structure_scalars
from .parallelism5d import classify_case, solve, solve_case1, solve_case2

__all__ = [
    "AnalyzeOptions", "InvariantReport", "analyze", "compare_reports", "run_corpus",
    "CorpusEntry", "Expectation", "builtin_corpus", "load_manifest", "write_manifest",
    "characteristic_checks", "levi_form", "nondegeneracy_order", "psi3_tensor", "two_nondeg_test",
    "CRError", "Obstruction",
    "FormJet", "VectorJet", "ext_d", "interior", "lie_bracket", "pair", "wedge",
    "build_cr_frame", "parse_defining_function", "validate_point",
    "EXACT", "FLOAT", "CJet", "Jet",
    "flatness_test", "maurer_cartan", "structure_equations",
    "build_adapted_coframe", "structure_scalars",
    "classify_case", "solve", "solve_case1", "solve_case2",
]
