"""Combinatorial data of an admissible deformation, plus parsing and validation.

A diagram lists the curve branches of the deformed singular locus (with
genus, transversal Milnor number and the monodromies of genus and outside
loops), the special points (each with its small loops, one per local
branch, and local Milnor fibre data) and the isolated critical points.

The extra puncture used to retract a branch onto a bouquet of loops is not
represented: its contribution cancels in the cokernel of the
Mayer-Vietoris map, so it carries no computable content.

JSON schema (all matrices are row-major lists of integer lists)::

    {
      "n": 2,
      "branches": [{"id", "genus", "transversal_milnor_number",
                    "genus_loops": [matrix, ...], "outside_loops": [matrix, ...]}],
      "special_points": [{"id",
                          "loops": [{"branch": id, "monodromy": matrix, "id"?: str}],
                          "fibre": {"euler_char"?, "betti_n_minus_1"?,
                                    "h_n_minus_1_is_zero_over_Z"?},
                          "j1_block"?: matrix}],
      "isolated_points": [{"id", "milnor_number", "on_zero_fibre"}],
      "irreducible_components_of_zero_set"?: int,
      "claims_vanishing_homology_zero"?: bool,
      "euler_char_override"?: int
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import DiagramValidationError, ParseError
from .zlattice import IntMatrix, cokernel_generators

Monodromy = IntMatrix

TOP_LEVEL_KEYS = {
    "n",
    "branches",
    "special_points",
    "isolated_points",
    "irreducible_components_of_zero_set",
    "claims_vanishing_homology_zero",
    "euler_char_override",
}


@dataclass(frozen=True)
class LocalLoop:
    id: str
    branch_id: str
    special_point_id: str
    monodromy: Monodromy


@dataclass(frozen=True)
class Branch:
    id: str
    genus: int
    transversal_milnor_number: int
    genus_loops: tuple[Monodromy, ...] = ()
    outside_loops: tuple[Monodromy, ...] = ()

    @property
    def mu(self) -> int:
        return self.transversal_milnor_number


@dataclass(frozen=True)
class SpecialPointFibreData:
    euler_char: int | None = None
    betti_n_minus_1: int | None = None
    h_n_minus_1_is_zero_over_Z: bool | None = None


@dataclass(frozen=True)
class SpecialPoint:
    id: str
    loops: tuple[LocalLoop, ...]
    fibre: SpecialPointFibreData = field(default_factory=SpecialPointFibreData)
    j1_block: IntMatrix | None = None


@dataclass(frozen=True)
class IsolatedPoint:
    id: str
    milnor_number: int
    on_zero_fibre: bool = False


@dataclass(frozen=True)
class BranchCounts:
    """Loop counts of one branch: ``loop_count == 2*genus + tau + gamma``."""

    tau: int
    gamma: int
    loop_count: int
    special_points: tuple[str, ...]


@dataclass(frozen=True)
class Derived:
    branch_counts: tuple[tuple[str, BranchCounts], ...]
    # "lattice": block columns index Z^mu per loop; "cokernel": they index
    # the cyclic generators of coker(A_s - I) from cokernel_generators().
    j1_coordinates: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class DeformationDiagram:
    n: int
    branches: tuple[Branch, ...]
    special_points: tuple[SpecialPoint, ...] = ()
    isolated_points: tuple[IsolatedPoint, ...] = ()
    irreducible_components_of_zero_set: int | None = None
    claims_vanishing_homology_zero: bool | None = None
    euler_char_override: int | None = None
    derived: Derived | None = None

    @property
    def is_validated(self) -> bool:
        return self.derived is not None

    def branch(self, branch_id: str) -> Branch:
        for b in self.branches:
            if b.id == branch_id:
                return b
        raise KeyError(branch_id)

    def special_point(self, point_id: str) -> SpecialPoint:
        for q in self.special_points:
            if q.id == point_id:
                return q
        raise KeyError(point_id)

    def loops_on(self, branch_id: str) -> list[LocalLoop]:
        return [s for q in self.special_points for s in q.loops if s.branch_id == branch_id]

    def all_loops(self) -> list[LocalLoop]:
        return [s for q in self.special_points for s in q.loops]

    def points_on(self, branch_id: str) -> list[SpecialPoint]:
        return [q for q in self.special_points if any(s.branch_id == branch_id for s in q.loops)]

    def counts(self, branch_id: str) -> BranchCounts:
        if self.derived is None:
            raise ValueError("diagram has not been validated")
        return dict(self.derived.branch_counts)[branch_id]

    def j1_coordinates(self, point_id: str) -> str | None:
        if self.derived is None:
            raise ValueError("diagram has not been validated")
        return dict(self.derived.j1_coordinates).get(point_id)


# -- parsing ----------------------------------------------------------------


def _require(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping):
        raise ParseError("expected an object", where)
    if key not in obj:
        raise ParseError(f"missing required field '{key}'", where)
    return obj[key]


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", where)
    if minimum is not None and value < minimum:
        raise ParseError(f"must be >= {minimum}, got {value}", where)
    return value


def _bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise ParseError(f"expected true/false, got {value!r}", where)
    return value


def _ident(value, where: str) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ParseError(f"expected a string identifier, got {value!r}", where)
    return str(value)


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"expected a list, got {type(value).__name__}", where)
    return value


def parse_matrix(value, where: str) -> IntMatrix:
    rows = _list(value, where)
    for i, row in enumerate(rows):
        for j, x in enumerate(_list(row, f"{where}[{i}]")):
            _int(x, f"{where}[{i}][{j}]")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError("rows have different lengths", where)
    return IntMatrix.from_rows(rows)


def diagram_from_dict(data: Any) -> DeformationDiagram:
    """Parse the JSON object form; raises :class:`ParseError` with a field path."""
    if not isinstance(data, Mapping):
        raise ParseError("top level must be an object", "$")
    unknown = sorted(set(data) - TOP_LEVEL_KEYS)
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(unknown)}", "$")
    n = _int(_require(data, "n", "$"), "n")

    branches = []
    for k, b in enumerate(_list(_require(data, "branches", "$"), "branches")):
        w = f"branches[{k}]"
        branches.append(
            Branch(
                id=_ident(_require(b, "id", w), f"{w}.id"),
                genus=_int(_require(b, "genus", w), f"{w}.genus"),
                transversal_milnor_number=_int(
                    _require(b, "transversal_milnor_number", w), f"{w}.transversal_milnor_number"
                ),
                genus_loops=tuple(
                    parse_matrix(m, f"{w}.genus_loops[{t}]")
                    for t, m in enumerate(_list(b.get("genus_loops", []), f"{w}.genus_loops"))
                ),
                outside_loops=tuple(
                    parse_matrix(m, f"{w}.outside_loops[{t}]")
                    for t, m in enumerate(_list(_require(b, "outside_loops", w), f"{w}.outside_loops"))
                ),
            )
        )

    points = []
    for k, q in enumerate(_list(data.get("special_points", []), "special_points")):
        w = f"special_points[{k}]"
        qid = _ident(_require(q, "id", w), f"{w}.id")
        loops = []
        for t, s in enumerate(_list(_require(q, "loops", w), f"{w}.loops")):
            ws = f"{w}.loops[{t}]"
            loops.append(
                LocalLoop(
                    id=_ident(s["id"], f"{ws}.id") if isinstance(s, Mapping) and "id" in s else f"{qid}/{t}",
                    branch_id=_ident(_require(s, "branch", ws), f"{ws}.branch"),
                    special_point_id=qid,
                    monodromy=parse_matrix(_require(s, "monodromy", ws), f"{ws}.monodromy"),
                )
            )
        fib = q.get("fibre", {})
        if not isinstance(fib, Mapping):
            raise ParseError("expected an object", f"{w}.fibre")
        fibre = SpecialPointFibreData(
            euler_char=_int(fib["euler_char"], f"{w}.fibre.euler_char") if fib.get("euler_char") is not None else None,
            betti_n_minus_1=(
                _int(fib["betti_n_minus_1"], f"{w}.fibre.betti_n_minus_1", 0)
                if fib.get("betti_n_minus_1") is not None
                else None
            ),
            h_n_minus_1_is_zero_over_Z=(
                _bool(fib["h_n_minus_1_is_zero_over_Z"], f"{w}.fibre.h_n_minus_1_is_zero_over_Z")
                if fib.get("h_n_minus_1_is_zero_over_Z") is not None
                else None
            ),
        )
        j1 = q.get("j1_block")
        points.append(
            SpecialPoint(
                id=qid,
                loops=tuple(loops),
                fibre=fibre,
                j1_block=parse_matrix(j1, f"{w}.j1_block") if j1 is not None else None,
            )
        )

    isolated = []
    for k, r in enumerate(_list(data.get("isolated_points", []), "isolated_points")):
        w = f"isolated_points[{k}]"
        isolated.append(
            IsolatedPoint(
                id=_ident(_require(r, "id", w), f"{w}.id"),
                milnor_number=_int(_require(r, "milnor_number", w), f"{w}.milnor_number"),
                on_zero_fibre=_bool(r.get("on_zero_fibre", False), f"{w}.on_zero_fibre"),
            )
        )

    def opt_int(key):
        return _int(data[key], key) if data.get(key) is not None else None

    claims = data.get("claims_vanishing_homology_zero")
    return DeformationDiagram(
        n=n,
        branches=tuple(branches),
        special_points=tuple(points),
        isolated_points=tuple(isolated),
        irreducible_components_of_zero_set=opt_int("irreducible_components_of_zero_set"),
        claims_vanishing_homology_zero=_bool(claims, "claims_vanishing_homology_zero") if claims is not None else None,
        euler_char_override=opt_int("euler_char_override"),
    )


def load_diagram(path: str | Path) -> DeformationDiagram:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}: line {exc.lineno}, column {exc.colno}") from None
    return diagram_from_dict(data)


def diagram_to_dict(d: DeformationDiagram) -> dict:
    """Inverse of :func:`diagram_from_dict` (derived data is not serialized)."""
    out: dict[str, Any] = {
        "n": d.n,
        "branches": [
            {
                "id": b.id,
                "genus": b.genus,
                "transversal_milnor_number": b.transversal_milnor_number,
                "genus_loops": [m.to_rows() for m in b.genus_loops],
                "outside_loops": [m.to_rows() for m in b.outside_loops],
            }
            for b in d.branches
        ],
        "special_points": [],
        "isolated_points": [
            {"id": r.id, "milnor_number": r.milnor_number, "on_zero_fibre": r.on_zero_fibre}
            for r in d.isolated_points
        ],
    }
    for q in d.special_points:
        fibre = {
            k: v
            for k, v in (
                ("euler_char", q.fibre.euler_char),
                ("betti_n_minus_1", q.fibre.betti_n_minus_1),
                ("h_n_minus_1_is_zero_over_Z", q.fibre.h_n_minus_1_is_zero_over_Z),
            )
            if v is not None
        }
        entry = {
            "id": q.id,
            "loops": [{"id": s.id, "branch": s.branch_id, "monodromy": s.monodromy.to_rows()} for s in q.loops],
            "fibre": fibre,
        }
        if q.j1_block is not None:
            entry["j1_block"] = q.j1_block.to_rows()
        out["special_points"].append(entry)
    for key in ("irreducible_components_of_zero_set", "claims_vanishing_homology_zero", "euler_char_override"):
        if getattr(d, key) is not None:
            out[key] = getattr(d, key)
    return out


# -- validation -------------------------------------------------------------


def _check_monodromy(m: IntMatrix, mu: int, label: str, errors: list[str]) -> bool:
    if m.shape != (mu, mu):
        errors.append(f"{label}: monodromy is {m.rows}x{m.cols}, branch has transversal Milnor number {mu}")
        return False
    det = m.det()
    if det not in (1, -1):
        errors.append(f"{label}: monodromy is not unimodular (det = {det})")
        return False
    return True


def _duplicates(ids):
    seen, dup = set(), []
    for x in ids:
        if x in seen and x not in dup:
            dup.append(x)
        seen.add(x)
    return dup


def validate(d: DeformationDiagram) -> DeformationDiagram:
    """Check every invariant and attach derived loop counts.

    All problems are collected and raised together as
    :class:`DiagramValidationError`. Validating an already validated
    diagram returns an equal object.
    """
    errors: list[str] = []
    if d.n < 2:
        errors.append(f"n must be >= 2, got {d.n}")
    for kind, items in (("branch", d.branches), ("special point", d.special_points), ("isolated point", d.isolated_points)):
        for x in _duplicates(i.id for i in items):
            errors.append(f"duplicate {kind} id '{x}'")
    for x in _duplicates(s.id for s in d.all_loops()):
        errors.append(f"duplicate loop id '{x}'")

    mus = {}
    for b in d.branches:
        label = f"branch '{b.id}'"
        if b.genus < 0:
            errors.append(f"{label}: genus must be >= 0, got {b.genus}")
        if b.transversal_milnor_number < 1:
            errors.append(f"{label}: transversal Milnor number must be >= 1, got {b.transversal_milnor_number}")
            continue
        mus[b.id] = b.mu
        if len(b.genus_loops) != 2 * max(b.genus, 0):
            errors.append(f"{label}: genus {b.genus} needs {2 * b.genus} genus loops, got {len(b.genus_loops)}")
        if not b.outside_loops:
            errors.append(f"{label}: tau_i > 0 required, every branch needs at least one outside loop")
        for t, m in enumerate(b.genus_loops):
            _check_monodromy(m, b.mu, f"{label} genus loop {t}", errors)
        for t, m in enumerate(b.outside_loops):
            _check_monodromy(m, b.mu, f"{label} outside loop {t}", errors)

    j1_modes = []
    for q in d.special_points:
        label = f"special point '{q.id}'"
        if not q.loops:
            errors.append(f"{label}: needs at least one local loop")
        loops_ok = True
        for s in q.loops:
            if s.branch_id not in mus:
                if not any(b.id == s.branch_id for b in d.branches):
                    errors.append(f"{label} loop '{s.id}': references unknown branch '{s.branch_id}'")
                loops_ok = False
                continue
            loops_ok &= _check_monodromy(s.monodromy, mus[s.branch_id], f"{label} loop '{s.id}'", errors)
        f = q.fibre
        if f.h_n_minus_1_is_zero_over_Z and f.betti_n_minus_1 not in (None, 0):
            errors.append(f"{label}: fibre flagged H_(n-1) = 0 over Z but betti_n_minus_1 = {f.betti_n_minus_1}")
        if f.betti_n_minus_1 is not None and f.betti_n_minus_1 < 0:
            errors.append(f"{label}: betti_n_minus_1 must be >= 0")
        if q.j1_block is not None:
            if f.betti_n_minus_1 is None:
                errors.append(f"{label}: j1_block given but fibre.betti_n_minus_1 is missing")
            elif q.j1_block.rows != f.betti_n_minus_1:
                errors.append(
                    f"{label}: j1_block has {q.j1_block.rows} rows, fibre.betti_n_minus_1 = {f.betti_n_minus_1}"
                )
            if loops_ok and q.loops:
                mode = _j1_mode(q, errors, label)
                if mode is not None:
                    j1_modes.append((q.id, mode))

    for r in d.isolated_points:
        if r.milnor_number < 1:
            errors.append(f"isolated point '{r.id}': Milnor number must be >= 1, got {r.milnor_number}")
    if d.irreducible_components_of_zero_set is not None and d.irreducible_components_of_zero_set < 1:
        errors.append("irreducible_components_of_zero_set must be >= 1")

    if errors:
        raise DiagramValidationError(errors)

    counts = []
    for b in d.branches:
        on_b = d.loops_on(b.id)
        gamma = len(on_b)
        tau = len(b.outside_loops)
        counts.append(
            (
                b.id,
                BranchCounts(
                    tau=tau,
                    gamma=gamma,
                    loop_count=2 * b.genus + tau + gamma,
                    special_points=tuple(sorted({s.special_point_id for s in on_b})),
                ),
            )
        )
    return replace(d, derived=Derived(branch_counts=tuple(counts), j1_coordinates=tuple(j1_modes)))


def _j1_mode(q: SpecialPoint, errors: list[str], label: str) -> str | None:
    """Decide how the columns of ``q.j1_block`` are indexed and check it is well defined."""
    block = q.j1_block
    if block.rows == 0:
        # zero target: any column count is the zero map
        return "lattice"
    lattice_cols = sum(s.monodromy.rows for s in q.loops)
    gens = [cokernel_generators(s.monodromy.minus_identity()) for s in q.loops]
    coker_cols = sum(len(g) for g in gens)
    if block.cols == lattice_cols:
        start = 0
        for s in q.loops:
            mu = s.monodromy.rows
            piece = IntMatrix.from_rows([row[start:start + mu] for row in block.to_rows()], cols=mu)
            if not (piece @ s.monodromy.minus_identity()).is_zero():
                errors.append(f"{label}: j1_block does not vanish on Im(A - I) of loop '{s.id}'")
            start += mu
        return "lattice"
    if block.cols == coker_cols:
        start = 0
        for s, g in zip(q.loops, gens):
            for k, (_, order) in enumerate(g):
                if order and any(block.column(start + k)):
                    errors.append(
                        f"{label}: j1_block sends a torsion generator (order {order}) of loop '{s.id}' to a nonzero vector"
                    )
            start += len(g)
        return "cokernel"
    errors.append(
        f"{label}: j1_block has {block.cols} columns; expected {lattice_cols} (lattice coordinates)"
        f" or {coker_cols} (cokernel generators)"
    )
    return None
