"""The eight acceptance criteria, one test each.

Every test records a single ``criterion N: PASS/FAIL`` line that is printed
in the terminal summary.  Tolerances are pinned here, not inherited.
"""
import time
import warnings
from contextlib import contextmanager


from crinv.cli_report import AnalyzeOptions, analyze, compare_reports
from crinv.corpus import LAPLACE, WAVE, builtin_corpus
from crinv.lightcone import (curvature, flatness_test, frame_family, frame_relations,
                             identify_with_parallelism, maurer_cartan, standard_frame,
                             structure_equations)
from crinv.parallelism5d import AmbiguousCaseWarning, SyntheticScalars, classify_case, solve_case2
from crinv.scalars import QI

import test_cr_core
import test_exterior
import test_normalize
from conftest import ACCEPTANCE_LINES, CYLINDER, FREEMAN, HYPERPLANE, LIE_BALL, LIGHT_CONE, SPHERE

FLOAT_TOL = 1e-9          # criteria 1, 2, 3, 7
PROP_TOL = 1e-8           # criterion 4 structure residuals
CASE_BAND = 1e-6          # criterion 6
XVAL_RTOL = 1e-9          # criterion 8
SECONDS_PER_POINT = 5.0   # criterion 1
MIN_TRIALS = 200
MIN_GROUP_ELEMENTS = 20

PYTHAGOREAN = [["3", "4", "5"], ["5", "12", "13"], ["8", "15", "17"]]
FREEMAN_POINTS = [["1", "6/5", repr(float(1 + 1.2 ** 3) ** (1 / 3))],
                  ["1", "2", repr(float(9) ** (1 / 3))]]
LIE_BALL_POINTS = [["3/4", "1/4i", "0"], ["2/3", "1/3i", "0"]]


@contextmanager
def criterion(n, title):
    detail = []
    try:
        yield detail
    except BaseException as exc:
        ACCEPTANCE_LINES[n] = f"criterion {n}: FAIL  {title}  ({type(exc).__name__}: {str(exc)[:160]})"
        raise
    ACCEPTANCE_LINES[n] = f"criterion {n}: PASS  {title}" + (f"  ({'; '.join(detail)})" if detail else "")


def test_criterion_1_light_cone_invariants():
    with criterion(1, "light cone: rank 1, k0 = 2, 2-nondegenerate, k_hat = 2i") as detail:
        worst = 0.0
        for point in PYTHAGOREAN:
            for mode in ("exact", "float"):
                t0 = time.perf_counter()
                rep = analyze(LIGHT_CONE, point, AnalyzeOptions(mode, order=6, parallelism=False))
                secs = time.perf_counter() - t0
                d = rep.to_dict()
                assert d["obstruction"] is None, d["obstruction"]
                assert d["levi"]["rank"] == 1
                assert d["k0"] == 2
                assert d["psi3_summary"]["two_nondeg"] is True
                if mode == "exact":
                    assert d["k_hat"] == {"re": "0", "im": "2"}
                else:
                    assert abs(complex(d["k_hat"]["re"], d["k_hat"]["im"]) - 2j) < FLOAT_TOL
                assert secs < SECONDS_PER_POINT, f"{point} {mode}: {secs:.2f} s"
                worst = max(worst, secs)
        detail.append(f"slowest point {worst:.2f} s at order 6")


def test_criterion_2_flat_model_curvature(cone_pd_exact, cone_pd_float):
    with criterion(2, "light cone curvature Omega = 0") as detail:
        fe = flatness_test(cone_pd_exact)
        assert fe.status == "flat" and fe.max_residual == 0
        ff = flatness_test(cone_pd_float)
        assert ff.status == "flat" and ff.max_residual < FLOAT_TOL
        detail.append(f"exact 0, float {ff.max_residual:.1e}")


def test_criterion_3_structure_equations(cone_pd_exact, cone_pd_float):
    with criterion(3, "five structure equations and frame relations") as detail:
        se = structure_equations(cone_pd_exact)
        assert len(se) == 5 and all(v == 0 for v in se.values()), se
        sf = structure_equations(cone_pd_float)
        assert max(sf.values()) < FLOAT_TOL, sf
        # relations for every Cartan matrix the package computes
        mats = [identify_with_parallelism(cone_pd_exact), identify_with_parallelism(cone_pd_float),
                maurer_cartan(frame_family(standard_frame(), 3, "exact"))]
        worst = max(max(frame_relations(pi).values()) for pi in mats)
        assert worst < FLOAT_TOL
        assert all(x.is_zero() for row in curvature(mats[2]) for x in row)
        detail.append(f"float structure {max(sf.values()):.1e}, relations {worst:.1e}")


def _counted(test_fn):
    """Run a hypothesis test and return how many examples it executed."""
    inner = test_fn.hypothesis.inner_test
    calls = [0]

    def counting(*a, **kw):
        calls[0] += 1
        return inner(*a, **kw)

    test_fn.hypothesis.inner_test = counting
    try:
        test_fn()
    finally:
        test_fn.hypothesis.inner_test = inner
    return calls[0]


IDENTITY_SUITES = [
    ("d^2 = 0", test_exterior.test_d_squared_vanishes),
    ("Cartan formula", test_exterior.test_cartan_formula),
    ("two Levi formulas agree", test_cr_core.test_levi_formulas_agree_at_random_points),
    ("psi_3 block structure", test_cr_core.test_psi3_block_structure),
    ("structure residuals", test_normalize.test_structure_residuals_vanish),
    ("null-row identities", test_normalize.test_null_row_identities),
    ("gauge covariance and k_hat fiber constancy", test_normalize.test_gauge_covariance),
    ("k_hat under theta^n shift", test_normalize.test_k_hat_invariant_under_theta_n_shift),
]


def test_criterion_4_identity_suites():
    with criterion(4, "randomized identity suites") as detail:
        counts = []
        for name, fn in IDENTITY_SUITES:
            n = _counted(fn)
            assert n >= MIN_TRIALS, f"{name}: only {n} trials"
            counts.append(n)
        # every gauge trial draws a fresh (u, u^alpha), so the element count is the trial count
        assert counts[6] >= MIN_GROUP_ELEMENTS
        assert test_normalize.PROPERTY.max_examples >= MIN_TRIALS
        assert PROP_TOL >= 1e-8
        detail.append(f"{len(counts)} suites, min {min(counts)} trials")


def test_criterion_5_negative_controls():
    with criterion(5, "negative controls are typed obstructions"):
        sphere = analyze(SPHERE, ["1", "0", "0"]).to_dict()
        assert sphere["obstruction"]["name"] == "NotRankNMinus1" and sphere["k0"] == 1
        plane = analyze(HYPERPLANE, ["0", "0", "0"]).to_dict()
        assert plane["obstruction"] is not None and plane["levi"]["rank"] == 0
        cyl = analyze(CYLINDER, ["1", "0", "0"], AnalyzeOptions(dim=3)).to_dict()
        assert cyl["obstruction"] is not None and cyl["k0"] == "infinite"


def test_criterion_6_case_machinery():
    with criterion(6, "synthetic Case 2 and the ambiguous band") as detail:
        pd = solve_case2(SyntheticScalars(k_hat=QI(0), k_hat_bar1=QI(1), mode="exact"))
        assert QI.coerce(pd.params["c1"]) == QI(0, 1) / 2
        assert pd.max_residual() == 0
        fired = []
        for k in ((2 + 0.5 * CASE_BAND) * 1j, (2 - 0.5 * CASE_BAND) * 1j, 2j, (2 + 2 * CASE_BAND) * 1j):
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                classify_case(SyntheticScalars(k_hat=k))
            fired.append(any(issubclass(w.category, AmbiguousCaseWarning) for w in caught))
        assert fired == [True, True, False, False]
        detail.append("c1 = i/2 exactly")


def test_criterion_7_characteristic_suite():
    with criterion(7, "characteristic hypersurfaces") as detail:
        worst = 0.0
        for src, points, op, mode in [(LIGHT_CONE, PYTHAGOREAN, WAVE, "exact"),
                                      (LIE_BALL, LIE_BALL_POINTS, LAPLACE, "exact"),
                                      (FREEMAN, FREEMAN_POINTS, None, "float")]:
            for point in points:
                ch = analyze(src, point, AnalyzeOptions(mode, operator=op, parallelism=False)).to_dict()["characteristic"]
                if op is not None:
                    assert ch["characteristic"] is True
                    assert ch["null_field_levi_null"] is True
                if src != LIE_BALL:
                    assert ch["radial_levi_null"] is True
                assert ch["max_residual"] < FLOAT_TOL
                worst = max(worst, ch["max_residual"])
        detail.append(f"max residual {worst:.1e}")


def test_criterion_8_exact_float_agreement():
    with criterion(8, "float reports agree with exact") as detail:
        compared = 0
        for entry in builtin_corpus():
            if "exact" not in entry.modes:
                continue
            for point in entry.points:
                opts = dict(dim=entry.dim, operator=entry.operator, parallelism=entry.parallelism)
                ex = analyze(entry.rho_src, point, AnalyzeOptions("exact", **opts)).to_dict()
                fl = analyze(entry.rho_src, point, AnalyzeOptions("float", **opts)).to_dict()
                diffs = compare_reports(ex, fl, XVAL_RTOL)
                assert not diffs, f"{entry.name} {point}: {diffs[:3]}"
                compared += 1
        detail.append(f"{compared} corpus points")
