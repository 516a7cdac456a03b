"""Shipped example hypersurfaces and their expected report fields.

Each :class:`Expectation` names a dotted path into an analysis report
(``"levi.rank"``, ``"k_hat"``, ``"characteristic.null_field_levi_null"``)
and either a value to match or an upper bound.  ``provenance`` is one of

* ``"published"``: the value is stated in the literature the package follows;
* ``"trivial"``: immediate from the definitions;
* ``"derived"``: computed by the oracle named in ``oracle`` and frozen.

The JSON manifest written by :func:`write_manifest` is the format
``crinv corpus --manifest`` consumes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import ManifestError

PROVENANCES = ("published", "trivial", "derived")
MODES = ("exact", "float")
SCHEMA = 1


@dataclass(frozen=True)
class Expectation:
    path: str
    value: Any = None
    le: Optional[float] = None
    provenance: str = "trivial"
    oracle: Optional[str] = None
    tol: float = 1e-9
    points: Optional[Tuple[int, ...]] = None
    modes: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ManifestError(f"{self.path}: unknown provenance {self.provenance!r}")
        if self.provenance == "derived" and not self.oracle:
            raise ManifestError(f"{self.path}: derived expectations must name their oracle")
        if self.le is None and self.value is None and self.path != "obstruction":
            raise ManifestError(f"{self.path}: needs a value or an upper bound")

    def applies(self, point_index: int, mode: str) -> bool:
        return ((self.points is None or point_index in self.points)
                and (self.modes is None or mode in self.modes))

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"path": self.path, "provenance": self.provenance}
        if self.le is not None:
            out["le"] = self.le
        else:
            out["value"] = self.value
        for key in ("oracle", "points", "modes"):
            v = getattr(self, key)
            if v is not None:
                out[key] = list(v) if isinstance(v, tuple) else v
        if self.tol != 1e-9:
            out["tol"] = self.tol
        return out


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    rho_src: str
    points: Tuple[Tuple[str, ...], ...]
    expected: Tuple[Expectation, ...]
    dim: Optional[int] = None
    modes: Tuple[str, ...] = MODES
    operator: Optional[str] = None
    order: Optional[int] = None
    parallelism: bool = True
    notes: str = ""

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "name": self.name,
            "rho": self.rho_src,
            "points": [list(p) for p in self.points],
            "modes": list(self.modes),
            "expected": [e.to_json() for e in self.expected],
        }
        for key in ("dim", "operator", "order"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        if not self.parallelism:
            out["parallelism"] = False
        if self.notes:
            out["notes"] = self.notes
        return out


def _e(path, value=None, **kw) -> Expectation:
    return Expectation(path, value, **kw)


LIGHT_CONE = "(re(Z1))^2 + (re(Z2))^2 - (re(Z3))^2"
SPHERE = "Z1*conj(Z1)+Z2*conj(Z2)+Z3*conj(Z3)-1"
HYPERPLANE = "im(Z3)"
CYLINDER = "Z1*conj(Z1)+Z2*conj(Z2)-1"
FREEMAN = "(re(Z1))^3+(re(Z2))^3-(re(Z3))^3"
LIE_BALL = ("2*(Z1*conj(Z1)+Z2*conj(Z2)+Z3*conj(Z3)) "
            "- (Z1^2+Z2^2+Z3^2)*conj(Z1^2+Z2^2+Z3^2) - 1")
WAVE = "Z1^2+Z2^2-Z3^2"
LAPLACE = "Z1^2+Z2^2+Z3^2"

# real cube roots for the Freeman points (1, 6/5, c) and (2, 1, c)
_FREEMAN_C1 = repr(float(1 + Fraction(6, 5) ** 3) ** (1 / 3))
_FREEMAN_C2 = repr(9.0 ** (1 / 3))

_SELF = "self-consistency: residuals recomputed from the final coframe"
_REGRESSION = "regression baseline: first certified float run, frozen"


def builtin_corpus() -> List[CorpusEntry]:
    """The shipped examples (light cone, sphere, hyperplane, cylinder, Freeman cubic, Lie ball)."""
    two_i = {"re": "0", "im": "2"}
    return [
        CorpusEntry(
            "light_cone", LIGHT_CONE,
            (("3", "4", "5"), ("5", "12", "13"), ("8", "15", "17")),
            (
                _e("obstruction", None),
                _e("levi.rank", 1, provenance="published"),
                _e("k0", 2, provenance="published"),
                _e("psi3_summary.two_nondeg", True, provenance="published"),
                _e("conditions.definite", True, provenance="published"),
                _e("conditions.distinct", True, provenance="published"),
                _e("k_hat", two_i, provenance="published"),
                _e("case.variant", "Case1", provenance="published"),
                _e("parallelism.group_dim", 2, provenance="published"),
                _e("parallelism.max_residual", le=1e-9, provenance="derived", oracle=_SELF),
                _e("flatness.status", "flat", provenance="published"),
                _e("flatness.max_residual", le=1e-9, provenance="published"),
                _e("characteristic.characteristic", True, provenance="published"),
                _e("characteristic.null_field_levi_null", True, provenance="published"),
                _e("characteristic.radial_levi_null", True, provenance="published"),
                _e("characteristic.max_residual", le=1e-9, provenance="published"),
            ),
            operator=WAVE,
            notes="Pythagorean points (a, b, c) with a^2 + b^2 = c^2.",
        ),
        CorpusEntry(
            "sphere", SPHERE,
            (("1", "0", "0"), ("3/5", "4/5i", "0")),
            (
                _e("obstruction", "NotRankNMinus1"),
                _e("levi.rank", 2),
                _e("levi.definiteness", "positive"),
                _e("k0", 1),
                _e("flatness", "n/a"),
            ),
        ),
        CorpusEntry(
            "hyperplane", HYPERPLANE,
            (("0", "0", "0"), ("1", "2i", "3")),
            (
                _e("obstruction", "NotRankNMinus1"),
                _e("levi.rank", 0),
                _e("k0", "infinite"),
            ),
        ),
        CorpusEntry(
            "cylinder_times_C", CYLINDER,
            (("1", "0", "0"), ("3/5", "4/5", "7i")),
            (
                _e("levi.rank", 1, provenance="derived",
                   oracle="symbolic Levi matrix on the complex tangent space (tests/oracles.py)"),
                _e("k0", "infinite", provenance="derived",
                   oracle="d/dZ3 is a holomorphic vector field tangent to M, so E_k never fills"),
                _e("obstruction", "Not2Nondegenerate", provenance="derived",
                   oracle="third-order block vanishes for a product with C"),
            ),
            dim=3,
            notes="{|Z1|^2 + |Z2|^2 = 1} x C inside C^3.",
        ),
        CorpusEntry(
            "freeman_cubic", FREEMAN,
            (("1", "6/5", _FREEMAN_C1), ("2", "1", _FREEMAN_C2)),
            (
                _e("obstruction", None),
                _e("levi.rank", 1, provenance="derived",
                   oracle="symbolic Levi matrix on the complex tangent space (tests/oracles.py)"),
                _e("psi3_summary.bracket_closure", le=1e-9, provenance="derived", oracle=_SELF),
                _e("characteristic.radial_levi_null", True, provenance="published"),
                _e("characteristic.max_residual", le=1e-9, provenance="published"),
                _e("k_hat", two_i, provenance="derived", oracle=_REGRESSION, tol=1e-8),
                _e("case.variant", "Case1", provenance="derived", oracle=_REGRESSION),
                _e("parallelism.max_residual", le=1e-9, provenance="derived", oracle=_SELF),
                _e("flatness.status", "nonflat", provenance="derived", oracle=_REGRESSION),
            ),
            modes=("float",),
            notes="Tube over the cone x1^3 + x2^3 = x3^3; points have an irrational coordinate.",
        ),
        CorpusEntry(
            "lie_ball", LIE_BALL,
            (("3/4", "1/4i", "0"), ("2/3", "1/3i", "0")),
            (
                _e("obstruction", None),
                _e("levi.rank", 1, provenance="published"),
                _e("characteristic.characteristic", True, provenance="published"),
                _e("characteristic.null_field_levi_null", True, provenance="published"),
                _e("characteristic.max_residual", le=1e-9, provenance="published"),
                _e("k_hat", {"re": "0", "im": "-1"}, points=(0,),
                   provenance="derived", oracle=_REGRESSION),
                _e("k_hat", {"re": "0", "im": "-2/3"}, points=(1,),
                   provenance="derived", oracle=_REGRESSION),
                _e("case.variant", "Case2", provenance="derived", oracle=_REGRESSION),
                _e("parallelism.max_residual", le=1e-9, provenance="derived", oracle=_SELF),
            ),
            operator=LAPLACE,
            notes=("Points (a, b i, 0) with a^2 - b^2 = d, a^2 + b^2 = (1 + d^2)/2 "
                   "(d = 1/2 and d = 1/3) so that 2|Z|^2 - |Z.Z|^2 = 1 exactly."),
        ),
    ]


# -- manifest I/O ---------------------------------------------------------------------------

def corpus_to_manifest(entries: Sequence[CorpusEntry]) -> Dict[str, Any]:
    return {"schema": SCHEMA, "entries": [e.to_json() for e in entries]}


def write_manifest(path: str, entries: Optional[Sequence[CorpusEntry]] = None) -> None:
    data = corpus_to_manifest(builtin_corpus() if entries is None else entries)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _tuple(v):
    return None if v is None else tuple(v)


def parse_manifest(data: Dict[str, Any]) -> List[CorpusEntry]:
    """Validate a manifest dictionary and build its entries."""
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise ManifestError(f"manifest must be an object with schema {SCHEMA}")
    raw = data.get("entries")
    if not isinstance(raw, list):
        raise ManifestError("manifest needs an 'entries' list")
    out = []
    names = set()
    for i, ent in enumerate(raw):
        try:
            name = ent["name"]
            if name in names:
                raise ManifestError(f"duplicate entry name {name!r}")
            names.add(name)
            modes = tuple(ent.get("modes", MODES))
            if any(m not in MODES for m in modes):
                raise ManifestError(f"{name}: unknown mode in {modes}")
            exps = []
            for x in ent.get("expected", []):
                exps.append(Expectation(
                    x["path"], x.get("value"), le=x.get("le"),
                    provenance=x.get("provenance", "trivial"), oracle=x.get("oracle"),
                    tol=float(x.get("tol", 1e-9)), points=_tuple(x.get("points")),
                    modes=_tuple(x.get("modes"))))
            points = tuple(tuple(str(c) for c in p) for p in ent["points"])
            out.append(CorpusEntry(
                name, str(ent["rho"]), points, tuple(exps), dim=ent.get("dim"), modes=modes,
                operator=ent.get("operator"), order=ent.get("order"),
                parallelism=bool(ent.get("parallelism", True)), notes=ent.get("notes", "")))
        except (KeyError, TypeError) as exc:
            raise ManifestError(f"entry {i}: malformed ({exc})") from exc
    return out


def load_manifest(path: str) -> List[CorpusEntry]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    return parse_manifest(data)


# -- expectation checking ---------------------------------------------------------------------

def lookup(report: Dict[str, Any], path: str):
    cur: Any = report
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def _as_number(v):
    """JSON scalar ({"re","im"} with strings or floats, number, "p/q") to complex."""
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(float(Fraction(str(v["re"]))), float(Fraction(str(v["im"]))))
    if isinstance(v, bool):
        return None
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(float(Fraction(v)))
        except (ValueError, ZeroDivisionError):
            return None
    return None


@dataclass
class CheckResult:
    path: str
    ok: bool
    expected: Any
    actual: Any
    residual: Optional[float] = None
    provenance: str = "trivial"


def check_expectation(report: Dict[str, Any], exp: Expectation) -> CheckResult:
    try:
        actual = lookup(report, exp.path)
    except KeyError:
        if exp.path == "obstruction" and exp.value is None:
            actual = None
        else:
            return CheckResult(exp.path, False, exp.value if exp.le is None else f"<= {exp.le}",
                               "<missing>", None, exp.provenance)
    if exp.le is not None:
        try:
            val = float(actual)
        except (TypeError, ValueError):
            return CheckResult(exp.path, False, f"<= {exp.le}", actual, None, exp.provenance)
        return CheckResult(exp.path, val <= exp.le, f"<= {exp.le}", actual, val, exp.provenance)
    if exp.path == "obstruction" and isinstance(actual, dict):
        actual = actual.get("name")
    a, e = _as_number(actual), _as_number(exp.value)
    if a is not None and e is not None and not isinstance(exp.value, str):
        res = abs(a - e) / max(1.0, abs(e))
        return CheckResult(exp.path, res <= exp.tol, exp.value, actual, res, exp.provenance)
    return CheckResult(exp.path, actual == exp.value, exp.value, actual, None, exp.provenance)
