import pytest

from builders import a_infinity, bouquet_diagram, branch, diagram, xk_family
from milnorfibre import corpus
from milnorfibre.diagram import load_diagram, validate
from milnorfibre.errors import DataMissingError
from milnorfibre.report import AnalysisConfig, Report, analyze, render_text
from milnorfibre.zlattice import AbelianGroup


def example(name):
    return load_diagram(corpus.path(name))


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        AnalysisConfig(mode="fast")
    with pytest.raises(ValueError):
        AnalysisConfig(checks=("magic",))
    with pytest.raises(ValueError):
        AnalysisConfig(prime=2**63 + 1)


def test_f1a3_all():
    r = analyze(example("f1a3"), AnalysisConfig(mode="all"))
    loop = r.per_loop[0]
    assert (loop.h_upper, loop.h_lower) == (AbelianGroup(1), AbelianGroup(1))
    assert r.chi_f.value == 0
    assert r.exact.group == AbelianGroup(1)
    assert r.betti_n_minus_1.lower == r.betti_n_minus_1.upper == 1
    assert r.oracle.passed and r.ok


def test_arrangement_mod2():
    r = analyze(example("arrangement"), AnalysisConfig(mode="exact", prime=2))
    assert r.exact.dimension == 3
    assert (r.exact.source_rank, r.exact.target_rank) == (12, 14)
    assert r.oracle is None


def test_minimal_flag():
    r = analyze(example("xyz"))
    by = {b.method: b for b in r.bounds}
    assert by["special_cover"].minimal and not by["vertical_min"].minimal


def test_default_checks_skip_missing_data():
    r = analyze(a_infinity())
    assert any(s.startswith("special_bound") for s in r.skipped)
    with pytest.raises(DataMissingError):
        analyze(a_infinity(), AnalysisConfig(checks=("special_bound",)))


def test_exact_requires_j1():
    with pytest.raises(DataMissingError):
        analyze(example("steiner"), AnalysisConfig(mode="exact"))


def test_contradiction_marks_report():
    d = diagram(2, [branch("x", 1, [[[1]]])], isolated=[("r", 1)], claims_vanishing_homology_zero=True)
    assert not analyze(d).ok


def test_bouquet_count_reported():
    r = analyze(bouquet_diagram(3))
    v = {v.check: v for v in r.verdicts}["bouquet"]
    assert v.status == "bouquet"
    assert "count = 2" in v.detail


def test_json_round_trip_is_byte_identical():
    for name in corpus.names():
        e = corpus.entry(name)
        r = analyze(example(name), AnalysisConfig(mode=e["mode"], prime=e.get("prime")))
        text = r.to_json()
        back = Report.from_json(text)
        assert back == r
        assert back.to_json() == text


def test_deterministic():
    d = xk_family(3)
    assert analyze(d).to_json() == analyze(d).to_json()


def test_text_mentions_sources():
    text = render_text(analyze(example("steiner")))
    assert "chi(F) = 16" in text
    assert "b_2(F) = 15" in text
    assert "Euler characteristic override" in text
