import random

import pytest

from builders import BOUQUET_A, H, diagram, branch, eye, random_diagram
from milnorfibre import corpus, cw_oracle
from milnorfibre.cw_oracle import (
    ChainComplexSlice,
    OracleMismatch,
    build_branch_complex,
    build_loop_complex,
    cross_validate,
    homology_of_slice,
)
from milnorfibre.diagram import load_diagram, validate
from milnorfibre.zlattice import AbelianGroup, IntMatrix

Z = AbelianGroup(1)


def m(rows):
    return IntMatrix.from_rows(rows)


def test_loop_complex():
    c = build_loop_complex(m(H))
    assert c.boundary == m(H).minus_identity()
    assert homology_of_slice(c) == (Z, Z)
    assert homology_of_slice(build_loop_complex(IntMatrix.identity(3))) == (AbelianGroup(3), AbelianGroup(3))
    assert homology_of_slice(build_loop_complex(m(BOUQUET_A))) == (AbelianGroup(), AbelianGroup())


def test_slice_homology():
    assert homology_of_slice(ChainComplexSlice(3, 2, IntMatrix.zeros(2, 3))) == (AbelianGroup(3), AbelianGroup(2))
    assert homology_of_slice(ChainComplexSlice(1, 1, m([[2]]))) == (AbelianGroup(), AbelianGroup(0, (2,)))
    with pytest.raises(ValueError):
        ChainComplexSlice(2, 2, IntMatrix.zeros(1, 2))


def test_branch_complex():
    d = validate(load_diagram(corpus.path("xyz")))
    b = d.branch("x")
    c = build_branch_complex(b, d.loops_on("x"))
    assert c.boundary == IntMatrix.zeros(1, 2)
    assert homology_of_slice(c) == (AbelianGroup(2), Z)
    d = validate(load_diagram(corpus.path("xk_k4")))
    assert homology_of_slice(build_branch_complex(d.branches[0], d.loops_on("x-axis")))[1] == Z
    d = diagram(2, [branch("u", 2, [BOUQUET_A, eye(2)])])
    assert homology_of_slice(build_branch_complex(d.branches[0], [])) == (AbelianGroup(2), AbelianGroup())


def test_corpus_passes():
    for name in corpus.names():
        report = cross_validate(validate(load_diagram(corpus.path(name))), strict=True)
        assert report.passed and report.checks


def test_branch_slice_euler():
    rng = random.Random(17)
    for _ in range(30):
        d = random_diagram(rng)
        for b in d.branches:
            c = build_branch_complex(b, d.loops_on(b.id))
            w = d.counts(b.id).loop_count
            assert c.euler(d.n) == (-1) ** (d.n - 1) * (w - 1) * b.mu


def test_loop_order_invariance():
    rng = random.Random(23)
    for _ in range(30):
        d = random_diagram(rng)
        for b in d.branches:
            loops = [s.monodromy for s in d.loops_on(b.id)]
            a = homology_of_slice(build_branch_complex(b, loops))
            rng.shuffle(loops)
            assert homology_of_slice(build_branch_complex(b, loops[::-1])) == a


def test_corrupted_boundary_is_caught(monkeypatch):
    d = validate(load_diagram(corpus.path("f1a3")))
    real = cw_oracle.build_loop_complex

    def corrupted(a):
        c = real(a)
        rows = c.boundary.to_rows()
        rows[0][0] += 2
        return ChainComplexSlice(c.upper_rank, c.lower_rank, IntMatrix.from_rows(rows))

    monkeypatch.setattr(cw_oracle, "build_loop_complex", corrupted)
    report = cross_validate(d)
    assert not report.passed
    assert {f.object_id for f in report.failures} == {"loop origin/0", "loop x-axis.u0"}
    with pytest.raises(OracleMismatch, match="origin/0"):
        cross_validate(d, strict=True)


def test_corrupted_branch_is_caught(monkeypatch):
    d = validate(load_diagram(corpus.path("xyz")))
    real = cw_oracle.build_branch_complex

    def corrupted(b, loops):
        c = real(b, loops)
        return ChainComplexSlice(c.upper_rank, c.lower_rank, IntMatrix.from_rows([[3] * c.upper_rank]))

    monkeypatch.setattr(cw_oracle, "build_branch_complex", corrupted)
    failures = cross_validate(d).failures
    assert {f.object_id for f in failures} == {"branch x", "branch y", "branch z"}
