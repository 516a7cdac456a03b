"""Pipeline driver, JSON reports and the ``crinv`` command line.

``analyze`` runs every stage it can and stops at the first geometric
obstruction, which becomes part of the report.  Only malformed input
aborts.  Exit codes: 0 success, 2 syntax or input error, 3 an expectation
failed, 4 an internal consistency check failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import gmpy2

from . import cr_core
from .corpus import CorpusEntry, check_expectation, load_manifest
from .errors import (ConditionDistinctFails, CRError, DefiningFunctionSyntaxError, FormulaMismatch, IrrationalResult,
                     ManifestError, NotOnSurface, NotRealValued, Obstruction, ShapeMismatch,
                     SingularPoint, UnsupportedOperation)
from .hypersurface import build_cr_frame, parse_defining_function, validate_point
from .jets import EXACT, FLOAT
from .lightcone import flatness_test
from .normalize import build_adapted_coframe, structure_scalars
from .parallelism5d import AmbiguousCaseWarning, classify_case, higher_dim_gate, solve
from .scalars import QI

SCHEMA = 1
DEFAULT_ORDER = 6
PARALLELISM_ORDER = 9
EXIT_OK, EXIT_SYNTAX, EXIT_EXPECTATION, EXIT_INTERNAL = 0, 2, 3, 4

INPUT_ERRORS = (DefiningFunctionSyntaxError, NotRealValued, UnsupportedOperation, NotOnSurface,
                SingularPoint, ShapeMismatch, ManifestError)


def default_order() -> int:
    env = os.environ.get("CR_JET_ORDER")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise DefiningFunctionSyntaxError(f"CR_JET_ORDER={env!r} is not an integer", 0)
        if value < 2:
            raise DefiningFunctionSyntaxError("CR_JET_ORDER must be >= 2", 0)
        return value
    return DEFAULT_ORDER


@dataclass
class AnalyzeOptions:
    mode: str = EXACT
    order: Optional[int] = None
    orientation: int = 1
    dim: Optional[int] = None
    operator: Optional[str] = None
    parallelism: bool = True
    parallelism_order: int = PARALLELISM_ORDER

    def resolved_order(self) -> int:
        return self.order if self.order is not None else default_order()


# -- JSON conversion ---------------------------------------------------------------------------

def _q(x) -> str:
    return str(gmpy2.mpq(x))


def to_jsonable(x: Any) -> Any:
    """Exact rationals as "p/q" strings, complex values as {"re", "im"}."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, QI):
        return {"re": _q(x.re), "im": _q(x.im)}
    if isinstance(x, int):
        return x
    if type(x).__name__ == "mpq" or hasattr(x, "denominator"):
        return _q(x)
    if isinstance(x, complex):
        return {"re": _clean(x.real), "im": _clean(x.imag)}
    if isinstance(x, float):
        return _clean(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "real") and hasattr(x, "imag"):
        return to_jsonable(complex(x))
    return str(x)


def _clean(v: float) -> float:
    # no negative zeros, so repeated runs and modes print the same bytes
    v = float(v)
    return 0.0 if v == 0 else v


def _point_json(point) -> List[Any]:
    return [to_jsonable(QI(re, im)) if point.mode == EXACT else
            {"re": _clean(re), "im": _clean(im)} for re, im in point.coords]


# -- report ---------------------------------------------------------------------------------------

@dataclass
class InvariantReport:
    input_hash: str
    rho: str
    point: List[Any]
    scalar_mode: str
    jet_order: int
    orientation: str
    levi: Optional[Dict[str, Any]] = None
    k0: Any = None
    nondegeneracy_dims: List[int] = field(default_factory=list)
    psi3_summary: Any = "n/a"
    conditions: Dict[str, Any] = field(default_factory=dict)
    lambdas: Any = None
    k_hat: Any = None
    scalar_residuals: Dict[str, float] = field(default_factory=dict)
    case: Any = None
    parallelism: Any = "n/a"
    flatness: Any = "n/a"
    characteristic: Any = None
    obstruction: Optional[Dict[str, str]] = None
    warnings: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> Dict[str, Any]:
        out = {"schema": SCHEMA}
        for name in self.__dataclass_fields__:
            out[name] = getattr(self, name)
        if not timings:
            out["timings"] = None
        return to_jsonable(out)

    def to_json(self, timings: Optional[bool] = None) -> str:
        """Serialized report; exact mode drops timings by default so the bytes are reproducible."""
        if timings is None:
            timings = self.scalar_mode != EXACT
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"


def input_hash(rho_src: str, point: Sequence[str], opts: AnalyzeOptions, order: int) -> str:
    key = json.dumps({"rho": rho_src, "point": [str(c) for c in point], "mode": opts.mode,
                      "order": order, "orientation": opts.orientation, "dim": opts.dim,
                      "operator": opts.operator, "parallelism": opts.parallelism,
                      "parallelism_order": opts.parallelism_order}, sort_keys=True)
    return hashlib.sha256(key.encode()).hexdigest()


def _float_max(d: Dict[str, Any]) -> float:
    vals = [float(v) for v in d.values() if isinstance(v, (int, float))]
    return max(vals) if vals else 0.0


def _phase(t: float) -> float:
    # principal argument in (-pi, pi]
    return math.pi if t <= -math.pi + 1e-15 else t


class _Stop(Exception):
    pass


def analyze(rho_src: str, point: Sequence[str], options: Optional[AnalyzeOptions] = None) -> InvariantReport:
    """Run the pipeline at one point.  Geometric obstructions end up in ``report.obstruction``."""
    opts = options or AnalyzeOptions()
    if opts.mode not in (EXACT, FLOAT):
        raise DefiningFunctionSyntaxError(f"unknown mode {opts.mode!r}", 0)
    if opts.orientation not in (1, -1):
        raise DefiningFunctionSyntaxError("orientation must be + or -", 0)
    order = opts.resolved_order()
    rep = InvariantReport(input_hash(rho_src, point, opts, order), rho_src, [], opts.mode, order,
                          "+" if opts.orientation == 1 else "-")
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        rep.timings[name] = now - clock
        clock = now

    rho = parse_defining_function(rho_src, opts.dim)
    p = validate_point(rho, list(point), opts.mode)
    rep.point = _point_json(p)
    lap("parse")
    frame = build_cr_frame(rho, p, order)
    try:
        _run_stages(rep, rho, p, frame, opts, order, lap)
    except _Stop:
        pass
    except Obstruction as exc:
        rep.obstruction = {"name": exc.name, "message": str(exc)}
    return rep


def _run_stages(rep, rho, p, frame, opts, order, lap):
    mode = opts.mode
    n = frame.n
    levi = cr_core.levi_form(frame)
    rep.levi = {"matrix": levi.g, "rank": levi.rank, "definiteness": levi.definite_on_complement}
    lap("levi")
    prof = cr_core.nondegeneracy_order(frame, cap=max(1, min(cr_core.DEFAULT_CAP, frame.theta.order)))
    rep.k0 = prof.k0
    rep.nondegeneracy_dims = prof.dims
    lap("nondegeneracy")
    if opts.operator is not None or _is_tube(rho):
        ch = cr_core.characteristic_checks(rho, opts.operator, p, frame=frame)
        rep.characteristic = {
            "operator": opts.operator, "characteristic": ch.characteristic,
            "symbol_value": ch.symbol_value, "null_field_tangent": ch.null_field_tangent,
            "null_field_levi_null": ch.null_field_levi_null,
            "radial_levi_null": ch.radial_levi_null,
            "residuals": ch.residuals, "max_residual": _float_max(ch.residuals)}
        lap("characteristic")
    if levi.rank < n:
        psi3 = cr_core.psi3_tensor(frame, levi)
        rep.psi3_summary = {
            "blocks": psi3.restricted,
            "two_nondeg": cr_core.two_nondeg_test(psi3),
            "max_offblock": psi3.max_offblock(),
            "max_asymmetry": psi3.max_asymmetry(),
            "bracket_closure": cr_core.bracket_closure_residual(frame, levi, psi3)}
        lap("psi3")
    rank_ok = levi.rank == n - 1 and n >= 2
    rep.conditions = {
        "definite": rank_ok and levi.definite_on_complement in ("positive", "negative"),
        "distinct": None}
    try:
        cof = build_adapted_coframe(frame, levi, orientation=opts.orientation)
    except ConditionDistinctFails:
        rep.conditions["distinct"] = False
        raise
    except IrrationalResult as exc:
        rep.warnings.append("exact_normalization_unavailable")
        rep.obstruction = {"name": "IrrationalResult", "message": str(exc)}
        raise _Stop
    rep.conditions["distinct"] = True
    rep.lambdas = cof.lambdas
    ss = structure_scalars(cof)
    rep.k_hat = ss.k_hat
    rep.scalar_residuals = ss.residuals
    lap("normalize")
    if _float_max(ss.residuals) > (1e-8 if mode == FLOAT else 0.0):
        raise FormulaMismatch(f"normalization residuals {ss.residuals}")
    if n != 2:
        rep.case = {"variant": None, "gate": higher_dim_gate(ss, [float(x) for x in cof.lambdas])}
        raise _Stop
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AmbiguousCaseWarning)
        tag = classify_case(ss)
    if any(issubclass(w.category, AmbiguousCaseWarning) for w in caught):
        rep.warnings.append("AmbiguousCase")
    rep.case = {"variant": tag.variant, "r": tag.r, "t": _phase(tag.t),
                "ambiguous": tag.ambiguous, "group_dim": tag.group_dim}
    if not opts.parallelism:
        raise _Stop
    porder = max(order, opts.parallelism_order)
    if porder != order:
        frame = build_cr_frame(rho, p, porder)
        cof = build_adapted_coframe(frame, orientation=opts.orientation)
        ss = structure_scalars(cof)
    pd = solve(ss, cof)
    rep.parallelism = {"group_dim": pd.group_dim, "jet_order": porder,
                       "residuals": pd.residuals, "max_residual": pd.max_residual(),
                       "params": pd.params, "coframe_det": pd.coframe_det}
    rep.warnings.extend(w for w in pd.warnings if w not in rep.warnings)
    lap("parallelism")
    if tag.variant == "Case1" and _is_two_i(ss.k_hat, mode):
        fl = flatness_test(pd)
        rep.flatness = {"status": fl.status, "max_residual": fl.max_residual,
                        "curvature_order": fl.order, "relations": fl.relations}
        rep.warnings.extend(w for w in fl.warnings if w not in rep.warnings)
        lap("flatness")



def _is_two_i(k, mode) -> bool:
    if mode == EXACT:
        return QI.coerce(k) == QI(0, 2)
    return abs(complex(k) - 2j) < 1e-9


def _is_tube(rho) -> bool:
    m = rho.n_plus_1
    return all(not any(k[m:]) for k in rho.real.terms)


# -- exact / float comparison ------------------------------------------------------------------------

_SKIP = {"timings", "input_hash", "scalar_mode", "schema", "warnings"}


def _num(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(float(gmpy2.mpq(v["re"])) if isinstance(v["re"], str) else v["re"],
                       float(gmpy2.mpq(v["im"])) if isinstance(v["im"], str) else v["im"])
    if isinstance(v, bool) or v is None:
        return None
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(float(gmpy2.mpq(v)))
        except ValueError:
            return None
    return None


def compare_reports(exact: Dict[str, Any], approx: Dict[str, Any], rtol: float = 1e-9) -> List[str]:
    """Paths where a float report differs from the exact one (relative tolerance, floor 1)."""
    bad: List[str] = []

    def walk(a, b, path):
        if path.split(".")[0] in _SKIP:
            return
        na, nb = _num(a), _num(b)
        if na is not None and nb is not None:
            if abs(na - nb) > rtol * max(1.0, abs(na)):
                bad.append(f"{path}: {a} vs {b}")
            return
        if isinstance(a, dict) and isinstance(b, dict):
            for k in sorted(set(a) | set(b)):
                if k not in a or k not in b:
                    bad.append(f"{path}.{k}: missing")
                else:
                    walk(a[k], b[k], f"{path}.{k}" if path else k)
            return
        if isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                bad.append(f"{path}: length {len(a)} vs {len(b)}")
                return
            for i, (x, y) in enumerate(zip(a, b)):
                walk(x, y, f"{path}[{i}]")
            return
        if a != b:
            bad.append(f"{path}: {a!r} vs {b!r}")

    walk(exact, approx, "")
    return bad


# -- corpus runner -----------------------------------------------------------------------------------

@dataclass
class CorpusRow:
    entry: str
    point: int
    mode: str
    status: str
    failures: List[str]
    checks: int
    seconds: float
    max_residual: float = 0.0


def _corpus_task(args):
    entry, idx, mode = args
    opts = AnalyzeOptions(mode=mode, order=entry.order, dim=entry.dim, operator=entry.operator,
                          parallelism=entry.parallelism)
    t0 = time.perf_counter()
    try:
        rep = analyze(entry.rho_src, entry.points[idx], opts).to_dict()
    except INPUT_ERRORS as exc:
        return entry.name, idx, mode, "input-error", f"{type(exc).__name__}: {exc}", time.perf_counter() - t0
    except FormulaMismatch as exc:
        return entry.name, idx, mode, "internal", f"FormulaMismatch: {exc}", time.perf_counter() - t0
    except Exception as exc:  # any other failure is an internal breach
        return entry.name, idx, mode, "internal", f"{type(exc).__name__}: {exc}", time.perf_counter() - t0
    return entry.name, idx, mode, "ok", rep, time.perf_counter() - t0


def run_entries(entries: Sequence[CorpusEntry], jobs: int = 1) -> List[CorpusRow]:
    tasks = [(e, i, m) for e in entries for i in range(len(e.points)) for m in e.modes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_corpus_task, tasks))
    else:
        results = [_corpus_task(t) for t in tasks]
    by_name = {e.name: e for e in entries}
    rows = []
    for name, idx, mode, status, payload, secs in results:
        if status != "ok":
            rows.append(CorpusRow(name, idx, mode, status, [payload], 0, secs))
            continue
        exps = [x for x in by_name[name].expected if x.applies(idx, mode)]
        checks = [check_expectation(payload, x) for x in exps]
        fails = [f"{c.path}: expected {c.expected}, got {c.actual}" for c in checks if not c.ok]
        resid = max([c.residual for c in checks if c.residual is not None] + [0.0])
        rows.append(CorpusRow(name, idx, mode, "pass" if not fails else "fail", fails,
                              len(checks), secs, resid))
    return rows


def format_table(rows: Sequence[CorpusRow]) -> str:
    head = f"{'entry':<18} {'pt':>2} {'mode':<5} {'status':<11} {'checks':>6} {'max resid':>10} {'sec':>7}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.entry:<18} {r.point:>2} {r.mode:<5} {r.status:<11} {r.checks:>6} "
                     f"{r.max_residual:>10.2e} {r.seconds:>7.2f}")
        lines.extend(f"    {f}" for f in r.failures)
    return "\n".join(lines)


def rows_exit_code(rows: Sequence[CorpusRow]) -> int:
    if any(r.status == "internal" for r in rows):
        return EXIT_INTERNAL
    if any(r.status == "input-error" for r in rows):
        return EXIT_SYNTAX
    if any(r.status == "fail" for r in rows):
        return EXIT_EXPECTATION
    return EXIT_OK


def run_corpus(manifest_path: str, jobs: int = 1, out=None) -> int:
    """Analyze every manifest entry, print the summary table and return the exit code."""
    out = out or sys.stdout
    entries = load_manifest(manifest_path)
    rows = run_entries(entries, jobs)
    print(format_table(rows), file=out)
    return rows_exit_code(rows)


# -- command line -------------------------------------------------------------------------------------

def _read_rho(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read().strip()
    return arg


def _split_point(text: str) -> List[str]:
    parts = [c.strip() for c in text.split(",")]
    if not parts or any(not c for c in parts):
        raise DefiningFunctionSyntaxError(f"bad point {text!r}", 0)
    return parts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crinv", description="CR invariants of real hypersurfaces")
    sub = ap.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="analyze one hypersurface at one point")
    a.add_argument("--rho", required=True, help="defining function, or a file containing it")
    a.add_argument("--point", required=True, help="comma-separated coordinates, e.g. 3,4,5 or 1/2,1i,0")
    a.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT)
    a.add_argument("--order", type=int, default=None, help="jet order (default $CR_JET_ORDER or 6)")
    a.add_argument("--orientation", choices=("+", "-"), default="+")
    a.add_argument("--json", dest="json_out", default=None, help="write the report here ('-' for stdout)")
    a.add_argument("--dim", type=int, default=None, help="ambient dimension n + 1 if larger than the variables used")
    a.add_argument("--operator", default=None, help="constant-coefficient operator symbol for the characteristic test")
    a.add_argument("--no-parallelism", action="store_true", help="stop after the case split")
    a.add_argument("--parallelism-order", type=int, default=PARALLELISM_ORDER)
    a.add_argument("--timings", action="store_true", help="keep timings in exact-mode JSON")
    c = sub.add_parser("corpus", help="run a corpus manifest")
    c.add_argument("--manifest", required=True)
    c.add_argument("--jobs", type=int, default=1)
    m = sub.add_parser("manifest", help="write the built-in corpus manifest")
    m.add_argument("--out", required=True)
    sub.add_parser("selftest", help="run the built-in identity checks")
    return ap


def _summary(rep: InvariantReport) -> str:
    d = rep.to_dict()
    flat = d["flatness"]["status"] if isinstance(d["flatness"], dict) else d["flatness"]
    case = d["case"]["variant"] if isinstance(d["case"], dict) else None
    obs = d["obstruction"]["name"] if d["obstruction"] else "none"
    return (f"rank={d['levi']['rank']} k0={d['k0']} k_hat={d['k_hat']} case={case} "
            f"flatness={flat} obstruction={obs}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_SYNTAX if exc.code else EXIT_OK
    try:
        if args.command == "analyze":
            opts = AnalyzeOptions(args.mode, args.order, 1 if args.orientation == "+" else -1,
                                  args.dim, args.operator, not args.no_parallelism,
                                  args.parallelism_order)
            rep = analyze(_read_rho(args.rho), _split_point(args.point), opts)
            text = rep.to_json(True if args.timings else None)
            if args.json_out in (None, "-"):
                sys.stdout.write(text)
            else:
                with open(args.json_out, "w", encoding="utf-8") as fh:
                    fh.write(text)
                print(_summary(rep))
            return EXIT_OK
        if args.command == "corpus":
            return run_corpus(args.manifest, max(1, args.jobs))
        if args.command == "manifest":
            from .corpus import write_manifest
            write_manifest(args.out)
            return EXIT_OK
        from .selftest import run_selftest
        return run_selftest()
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except FormulaMismatch as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except CRError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
