import json
import os

import pytest

from crinv.corpus import (CorpusEntry, Expectation, builtin_corpus, check_expectation,
                          corpus_to_manifest, load_manifest, lookup, parse_manifest, write_manifest)
from crinv.errors import ManifestError

MANIFEST = os.path.join(os.path.dirname(__file__), "..", "corpus", "manifest.json")


def test_builtin_corpus_members():
    names = [e.name for e in builtin_corpus()]
    assert len(names) >= 6
    for required in ("light_cone", "sphere", "hyperplane", "cylinder_times_C", "freeman_cubic",
                     "lie_ball"):
        assert required in names


def test_every_expectation_has_provenance():
    for entry in builtin_corpus():
        assert entry.points and entry.expected
        for x in entry.expected:
            assert x.provenance in ("published", "trivial", "derived")
            if x.provenance == "derived":
                assert x.oracle


def test_derived_needs_oracle():
    with pytest.raises(ManifestError):
        Expectation("k_hat", 1, provenance="derived")
    with pytest.raises(ManifestError):
        Expectation("k_hat", 1, provenance="folklore")
    with pytest.raises(ManifestError):
        Expectation("k_hat")


def test_shipped_manifest_matches_builtin():
    with open(MANIFEST, encoding="utf-8") as fh:
        shipped = json.load(fh)
    assert shipped == json.loads(json.dumps(corpus_to_manifest(builtin_corpus())))


def test_manifest_round_trip(tmp_path):
    p = tmp_path / "m.json"
    write_manifest(str(p))
    entries = load_manifest(str(p))
    assert [e.to_json() for e in entries] == [e.to_json() for e in builtin_corpus()]


@pytest.mark.parametrize("data", [
    [],
    {"schema": 2, "entries": []},
    {"schema": 1},
    {"schema": 1, "entries": [{"name": "x"}]},
    {"schema": 1, "entries": [{"name": "x", "rho": "im(Z2)", "points": [["0", "0"]], "modes": ["fast"]}]},
    {"schema": 1, "entries": [{"name": "x", "rho": "im(Z2)", "points": []},
                              {"name": "x", "rho": "im(Z2)", "points": []}]},
])
def test_malformed_manifests(data):
    with pytest.raises(ManifestError):
        parse_manifest(data)


def test_unreadable_manifest(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ManifestError):
        load_manifest(str(bad))


def test_lookup_and_checks():
    report = {"levi": {"rank": 1}, "k_hat": {"re": "0", "im": "2"}, "obstruction": None,
              "flatness": {"max_residual": 3e-12}}
    assert lookup(report, "levi.rank") == 1
    assert check_expectation(report, Expectation("levi.rank", 1)).ok
    assert not check_expectation(report, Expectation("levi.rank", 2)).ok
    assert check_expectation(report, Expectation("k_hat", {"re": "0", "im": "2"})).ok
    assert check_expectation(report, Expectation("flatness.max_residual", le=1e-9)).ok
    assert check_expectation(report, Expectation("obstruction")).ok
    assert not check_expectation(report, Expectation("case.variant", "Case1")).ok


def test_float_tolerance_in_checks():
    report = {"k_hat": {"re": 1e-15, "im": 2.0000000001}}
    assert check_expectation(report, Expectation("k_hat", {"re": "0", "im": "2"})).ok
    assert not check_expectation(report, Expectation("k_hat", {"re": "0", "im": "2"}, tol=1e-12)).ok


def test_applies_filters():
    x = Expectation("k_hat", 1, points=(1,), modes=("float",))
    assert x.applies(1, "float")
    assert not x.applies(0, "float")
    assert not x.applies(1, "exact")


def test_entry_json_omits_defaults():
    e = CorpusEntry("t", "im(Z2)", (("0", "0"),), (Expectation("levi.rank", 0),))
    j = e.to_json()
    assert "dim" not in j and "parallelism" not in j
