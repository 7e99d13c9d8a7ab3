import json
import random

import pytest

from builders import H, branch, diagram, point, random_diagram
from milnorfibre import corpus
from milnorfibre.diagram import diagram_from_dict, diagram_to_dict, load_diagram, validate
from milnorfibre.errors import DiagramValidationError, ParseError


def raw(**over):
    data = {"n": 2, "branches": [branch("x", 1, [[[1]]])], "special_points": [], "isolated_points": []}
    data.update(over)
    return data


def errors_of(data):
    with pytest.raises(DiagramValidationError) as info:
        validate(diagram_from_dict(data))
    return info.value.errors


def test_parse_requires_n():
    data = raw()
    del data["n"]
    with pytest.raises(ParseError, match="n"):
        diagram_from_dict(data)


def test_parse_reports_field_path():
    data = raw(branches=[{"id": "x", "genus": "one", "transversal_milnor_number": 1, "outside_loops": []}])
    with pytest.raises(ParseError) as info:
        diagram_from_dict(data)
    assert info.value.where == "branches[0].genus"


def test_parse_rejects_unknown_keys():
    with pytest.raises(ParseError, match="colour"):
        diagram_from_dict(raw(colour="red"))


def test_parse_ragged_matrix():
    with pytest.raises(ParseError, match=r"outside_loops\[0\]"):
        diagram_from_dict(raw(branches=[branch("x", 2, [[[1, 0], [0]]])]))


def test_load_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "n": 2,\n  "branches": [,]\n}\n')
    with pytest.raises(ParseError, match="line 3"):
        load_diagram(p)


def test_validation_collects_everything():
    data = raw(
        n=1,
        branches=[branch("x", 2, [], genus=1), branch("x", 1, [[[2]]])],
        special_points=[point("q", [("nowhere", [[1]])])],
        isolated_points=[{"id": "r", "milnor_number": 0}],
    )
    errs = errors_of(data)
    text = "\n".join(errs)
    assert "n must be >= 2" in text
    assert "duplicate branch id 'x'" in text
    assert "genus 1 needs 2 genus loops" in text
    assert "tau_i > 0" in text
    assert "unknown branch 'nowhere'" in text
    assert "Milnor number must be >= 1" in text
    assert any("unimodular" in e or "det" in e for e in errs)


def test_monodromy_size_mismatch():
    errs = errors_of(raw(special_points=[point("q", [("x", [[1, 0], [0, 1]])])]))
    assert any("loop 'q/0'" in e for e in errs)


def test_j1_rows_must_match_betti():
    errs = errors_of(raw(special_points=[point("q", [("x", [[1]])], betti=2, j1=[[1]])]))
    assert any("j1_block has 1 rows" in e for e in errs)


def test_j1_must_vanish_on_image():
    # lattice coordinates: coker(h - I) = Z, the block must kill Im(h - I)
    data = raw(
        branches=[branch("x", 3, [H])],
        special_points=[point("q", [("x", H)], betti=1, j1=[[1, 0, 0]])],
    )
    assert any("does not vanish" in e for e in errors_of(data))
    ok = raw(
        branches=[branch("x", 3, [H])],
        special_points=[point("q", [("x", H)], betti=1, j1=[[1, 0, 1]])],
    )
    assert validate(diagram_from_dict(ok)).j1_coordinates("q") == "lattice"


def test_j1_cokernel_coordinates():
    d = diagram(2, [branch("x", 3, [H])], [point("q", [("x", H)], betti=1, j1=[[1]])])
    assert d.j1_coordinates("q") == "cokernel"


def test_validate_idempotent():
    d = validate(diagram_from_dict(json.loads(corpus.path("arrangement").read_text())))
    assert validate(d) == d


def test_round_trip_all_corpus():
    for name in corpus.names():
        d = load_diagram(corpus.path(name))
        assert diagram_from_dict(diagram_to_dict(d)) == d


def test_loop_counts():
    rng = random.Random(11)
    for _ in range(40):
        d = random_diagram(rng)
        for b in d.branches:
            c = d.counts(b.id)
            assert c.loop_count == 2 * b.genus + c.tau + c.gamma
            assert c.gamma == len(d.loops_on(b.id))


def test_counts_need_validation():
    d = diagram_from_dict(raw())
    with pytest.raises(ValueError):
        d.counts("x")
