"""Homology of the Milnor fibre from deformation data.

The pieces are the relative homology of the loop bundles (a Wang
sequence), the branch groups ``Z^mu / <Im(A_w - I)>``, the Euler
characteristic formula, the two families of upper bounds for
``b_(n-1)(F)``, and the exact computation of ``H_(n-1)(F)`` as the cokernel
of the Mayer-Vietoris map ``j = j1 + j2`` when the local maps ``j1`` are
known.

Every function expects a diagram returned by :func:`milnorfibre.diagram.validate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cover import min_weight_cover
from .diagram import Branch, DeformationDiagram, LocalLoop
from .errors import CoverageError, DataMissingError, DimensionError, InconsistentDataError
from .zlattice import (
    AbelianGroup,
    IntMatrix,
    cokernel,
    cokernel_generators,
    cokernel_multi,
    kernel_rank,
    rank,
    rank_mod_p,
)

# provenance tags carried into reports
SRC_WANG = "Wang sequence of a loop bundle"
SRC_BRANCH = "branch presentation Z^mu / <Im(A_w - I)>"
SRC_BRANCH_EULER = "branch Euler characteristic"
SRC_EULER = "Euler characteristic formula"
SRC_EULER_OVERRIDE = "Euler characteristic override"
SRC_VERTICAL = "vertical monodromy bound"
SRC_VERTICAL_RANK = "vertical monodromy vanishing (det(A_w - I) != 0)"
SRC_VERTICAL_UNIMODULAR = "vertical monodromy vanishing (det(A_w - I) = +-1)"
SRC_SPECIAL = "special point cover bound"
SRC_TRIVIAL = "transversal Milnor number sum"
SRC_CONCENTRATION = "local fibre concentration criterion"
SRC_BOUQUET = "bouquet criterion"
SRC_NONSPLITTING = "non-splitting criterion"
SRC_MV = "Mayer-Vietoris cokernel of j"
SRC_COMPONENTS = "irreducible component lower bound"
SRC_NONNEG = "non-negativity of Betti numbers"


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


# -- loops and Wang groups --------------------------------------------------


@dataclass(frozen=True)
class WangGroups:
    """``h_upper = H_(n+1)(Z_s, C_s)`` (free) and ``h_lower = H_n(Z_s, C_s)``."""

    h_upper: AbelianGroup
    h_lower: AbelianGroup


def wang_groups(monodromy: IntMatrix) -> WangGroups:
    a = monodromy.minus_identity()
    return WangGroups(AbelianGroup.free(kernel_rank(a)), cokernel(a))


@dataclass(frozen=True)
class BranchLoop:
    label: str
    kind: str  # genus | special | outside
    monodromy: IntMatrix
    special_point: str | None = None


def branch_loops(d: DeformationDiagram, b: Branch) -> list[BranchLoop]:
    """All loops of a branch: genus loops, then special loops, then outside loops."""
    out = [BranchLoop(f"{b.id}.g{k}", "genus", m) for k, m in enumerate(b.genus_loops)]
    out += [BranchLoop(s.id, "special", s.monodromy, s.special_point_id) for s in d.loops_on(b.id)]
    out += [BranchLoop(f"{b.id}.u{k}", "outside", m) for k, m in enumerate(b.outside_loops)]
    return out


def branch_group(b: Branch, loops_on_b: Sequence[LocalLoop | IntMatrix]) -> AbelianGroup:
    """``Z^mu`` modulo the images of ``A_w - I`` over genus, special and outside loops."""
    special = [s.monodromy if isinstance(s, LocalLoop) else s for s in loops_on_b]
    mats = [m.minus_identity() for m in (*b.genus_loops, *special, *b.outside_loops)]
    return cokernel_multi(b.mu, mats)


def branch_euler(b: Branch, n: int, gamma: int) -> int:
    """Euler characteristic of the branch pair: ``(-1)^(n-1) (2g + tau + gamma - 1) mu``."""
    return _sign(n - 1) * (2 * b.genus + len(b.outside_loops) + gamma - 1) * b.mu


# -- Euler characteristic ---------------------------------------------------


def euler_characteristic(d: DeformationDiagram) -> int:
    """Euler characteristic of ``F`` from the local data (ignores any override)."""
    missing = [q.id for q in d.special_points if q.fibre.euler_char is None]
    if missing:
        raise DataMissingError("fibre.euler_char needed on special point(s)", missing)
    chi = 1 + sum(q.fibre.euler_char - 1 for q in d.special_points)
    chi += _sign(d.n) * sum(
        (2 * b.genus + len(b.outside_loops) + d.counts(b.id).gamma - 2) * b.mu for b in d.branches
    )
    chi += _sign(d.n) * sum(r.milnor_number for r in d.isolated_points)
    return chi


@dataclass(frozen=True)
class EulerValue:
    value: int
    source: str
    computed: int | None = None
    override: int | None = None
    missing: tuple[str, ...] = ()


def euler_summary(d: DeformationDiagram) -> EulerValue:
    """The Euler characteristic to use, preferring an explicit override."""
    try:
        computed, missing = euler_characteristic(d), ()
    except DataMissingError as exc:
        computed, missing = None, tuple(exc.missing)
    if d.euler_char_override is not None:
        return EulerValue(d.euler_char_override, SRC_EULER_OVERRIDE, computed, d.euler_char_override, missing)
    if computed is None:
        raise DataMissingError("fibre.euler_char needed on special point(s)", missing)
    return EulerValue(computed, SRC_EULER, computed, None, ())


# -- upper bounds for b_(n-1) -----------------------------------------------


@dataclass(frozen=True)
class BettiBound:
    value: int
    method: str  # vertical_min | special_cover | trivial_mu_sum | exact_mod_p
    witness: tuple[str, ...]
    source: str
    optimal: bool = True


@dataclass(frozen=True)
class BranchVertical:
    branch_id: str
    min_corank: int
    witness_loop: str
    rank_zero_loop: str | None  # some det(A_w - I) != 0
    group_zero_loop: str | None  # some det(A_w - I) = +-1


@dataclass(frozen=True)
class VerticalBound:
    bound: BettiBound
    per_branch: tuple[BranchVertical, ...]

    @property
    def betti_zero(self) -> bool:
        return all(b.rank_zero_loop is not None for b in self.per_branch)

    @property
    def h_zero(self) -> bool:
        return all(b.group_zero_loop is not None for b in self.per_branch)


def betti_bound_vertical(d: DeformationDiagram) -> VerticalBound:
    per_branch = []
    for b in d.branches:
        best = None
        rank_zero = group_zero = None
        for w in branch_loops(d, b):
            a = w.monodromy.minus_identity()
            corank = cokernel(a).free_rank
            if best is None or corank < best[0]:
                best = (corank, w.label)
            det = a.det()
            if det != 0 and rank_zero is None:
                rank_zero = w.label
            if det in (1, -1) and group_zero is None:
                group_zero = w.label
        per_branch.append(BranchVertical(b.id, best[0], best[1], rank_zero, group_zero))
    value = sum(p.min_corank for p in per_branch)
    witness = tuple(p.witness_loop for p in per_branch)
    return VerticalBound(BettiBound(value, "vertical_min", witness, SRC_VERTICAL), tuple(per_branch))


def _point_branches(d: DeformationDiagram) -> dict[str, frozenset[str]]:
    return {q.id: frozenset(s.branch_id for s in q.loops) for q in d.special_points}


def betti_bound_special(d: DeformationDiagram, q_prime: Sequence[str] | None = None) -> BettiBound:
    """Sum of ``b_(n-1)(A_q)`` over a set of special points meeting every branch.

    With ``q_prime`` the given set is checked and summed; otherwise the
    cheapest covering set is searched for.
    """
    touches = _point_branches(d)
    universe = {b.id for b in d.branches}
    if q_prime is not None:
        unknown = [q for q in q_prime if q not in touches]
        if unknown:
            raise KeyError(f"unknown special point(s): {', '.join(unknown)}")
        missing = [q for q in q_prime if d.special_point(q).fibre.betti_n_minus_1 is None]
        if missing:
            raise DataMissingError("fibre.betti_n_minus_1 needed on special point(s)", missing)
        covered = set().union(*(touches[q] for q in q_prime))
        if universe - covered:
            raise CoverageError(sorted(universe - covered))
        chosen = tuple(sorted(set(q_prime)))
        value = sum(d.special_point(q).fibre.betti_n_minus_1 for q in chosen)
        return BettiBound(value, "special_cover", chosen, SRC_SPECIAL)

    known = {q.id: q.fibre.betti_n_minus_1 for q in d.special_points if q.fibre.betti_n_minus_1 is not None}
    cover = min_weight_cover(universe, {q: touches[q] for q in known}, known)
    if cover is None:
        reachable = set().union(*(touches[q] for q in known))
        lacking = sorted(universe - reachable)
        raise DataMissingError(
            "no special point with fibre.betti_n_minus_1 on branch(es) " + ", ".join(lacking),
            [q.id for q in d.special_points if q.fibre.betti_n_minus_1 is None and touches[q.id] & set(lacking)],
        )
    return BettiBound(cover.weight, "special_cover", cover.chosen, SRC_SPECIAL, cover.optimal)


def trivial_bound(d: DeformationDiagram) -> BettiBound:
    return BettiBound(sum(b.mu for b in d.branches), "trivial_mu_sum", tuple(b.id for b in d.branches), SRC_TRIVIAL)


# -- verdicts ---------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    check: str
    status: str
    source: str
    detail: str = ""


def vertical_verdict(vb: VerticalBound) -> Verdict:
    if vb.h_zero:
        loops = ", ".join(p.group_zero_loop for p in vb.per_branch)
        return Verdict("vertical_bound", "h_zero", SRC_VERTICAL_UNIMODULAR, f"H_(n-1)(F) = 0; loops {loops}")
    if vb.betti_zero:
        loops = ", ".join(p.rank_zero_loop for p in vb.per_branch)
        return Verdict("vertical_bound", "betti_zero", SRC_VERTICAL_RANK, f"b_(n-1)(F) = 0; loops {loops}")
    return Verdict("vertical_bound", "inconclusive", SRC_VERTICAL, f"b_(n-1)(F) <= {vb.bound.value}")


def concentration_check(d: DeformationDiagram) -> Verdict:
    h_zero, b_zero = True, True
    witnesses_h, witnesses_b = [], []
    for b in d.branches:
        pts = d.points_on(b.id)
        hq = next((q.id for q in pts if q.fibre.h_n_minus_1_is_zero_over_Z), None)
        bq = next(
            (q.id for q in pts if q.fibre.h_n_minus_1_is_zero_over_Z or q.fibre.betti_n_minus_1 == 0),
            None,
        )
        h_zero &= hq is not None
        b_zero &= bq is not None
        witnesses_h.append(f"{b.id}:{hq}")
        witnesses_b.append(f"{b.id}:{bq}")
    if h_zero:
        return Verdict("concentration", "h_zero", SRC_CONCENTRATION, "H_(n-1)(F) = 0; " + ", ".join(witnesses_h))
    if b_zero:
        return Verdict("concentration", "betti_zero", SRC_CONCENTRATION, "b_(n-1)(F) = 0; " + ", ".join(witnesses_b))
    lacking = [b.id for b, w in zip(d.branches, witnesses_b) if w.endswith(":None")]
    return Verdict(
        "concentration", "inconclusive", SRC_CONCENTRATION, "no qualifying special point on " + ", ".join(lacking)
    )


def bouquet_check(d: DeformationDiagram, b_n: tuple[int, int] | None = None) -> Verdict:
    """Homotopy bouquet of n-spheres, when ``n >= 3`` and ``H_(n-1)(F) = 0`` is certified."""
    vb = betti_bound_vertical(d)
    via_monodromy = vb.h_zero
    via_fibres = concentration_check(d).status == "h_zero"
    if d.n < 3:
        return Verdict("bouquet", "not_established", SRC_BOUQUET, f"needs n >= 3, have n = {d.n}")
    if not (via_monodromy or via_fibres):
        return Verdict("bouquet", "not_established", SRC_BOUQUET, "H_(n-1)(F) = 0 not certified over Z")
    how = "unimodular A_w - I on every branch" if via_monodromy else "H_(n-1)(A_q) = 0 point on every branch"
    if b_n is None:
        count = "count b_n(F) unknown"
    elif b_n[0] == b_n[1]:
        count = f"count = {b_n[0]}"
    else:
        count = f"count in [{b_n[0]}, {b_n[1]}]"
    return Verdict("bouquet", "bouquet", SRC_BOUQUET, f"F is a bouquet of {d.n}-spheres ({how}); {count}")


def nonsplitting_check(d: DeformationDiagram) -> Verdict:
    if not d.claims_vanishing_homology_zero:
        return Verdict("nonsplitting", "skipped", SRC_NONSPLITTING, "claims_vanishing_homology_zero not set")
    if d.isolated_points:
        ids = ", ".join(r.id for r in d.isolated_points)
        return Verdict(
            "nonsplitting",
            "contradiction",
            SRC_NONSPLITTING,
            f"b_n = 0 for the original germ forbids isolated critical points in any admissible deformation, found: {ids}",
        )
    return Verdict("nonsplitting", "pass", SRC_NONSPLITTING, "no isolated critical points")


# -- monodromy helpers ------------------------------------------------------


def compose_vertical(loops: Sequence[IntMatrix]) -> IntMatrix:
    """Product ``A_1 @ A_2 @ ... @ A_k`` (the leftmost factor acts last)."""
    if not loops:
        raise ValueError("need at least one monodromy")
    size = loops[0].rows
    out = IntMatrix.identity(size)
    for k, m in enumerate(loops):
        if m.shape != (size, size):
            raise DimensionError(f"monodromy {k} is {m.rows}x{m.cols}, expected {size}x{size}")
        out = out @ m
    return out


def vertical_from_homogeneous(h: IntMatrix, degree: int) -> IntMatrix:
    """Vertical monodromy ``A`` of a homogeneous germ of degree ``d``: ``A @ h^d = I``."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    return h.inverse().power(degree)


# -- exact mode -------------------------------------------------------------


@dataclass(frozen=True)
class JMap:
    """Presentation of ``j``: ``H_(n-1)(F) = coker [matrix | relations]``.

    Rows: ``Z^(b_(n-1)(A_q))`` per special point (sorted by id), then
    ``Z^mu_i`` per branch (sorted by id). Columns of ``matrix``: generators
    of ``H_n(Z_s, C_s)`` loop by loop in assembly order. ``relations`` holds
    the images of ``A_w - I`` inside the branch summands.
    """

    matrix: IntMatrix
    relations: IntMatrix
    source_labels: tuple[str, ...]
    target_labels: tuple[str, ...]
    loop_order: tuple[str, ...]
    signs: tuple[int, ...]

    @property
    def source_rank(self) -> int:
        return self.matrix.cols

    @property
    def target_rank(self) -> int:
        return self.matrix.rows

    def presentation(self) -> IntMatrix:
        return IntMatrix.hstack([self.matrix, self.relations], rows=self.matrix.rows)


def loop_assembly_order(d: DeformationDiagram) -> list[LocalLoop]:
    return [s for q in sorted(d.special_points, key=lambda q: q.id) for s in q.loops]


def _resolve_signs(d, j2_signs) -> tuple[int, ...]:
    order = loop_assembly_order(d)
    if j2_signs is None:
        signs = [1] * len(order)
    elif isinstance(j2_signs, Mapping):
        unknown = sorted(set(j2_signs) - {s.id for s in order})
        if unknown:
            raise KeyError(f"signs given for unknown loop(s): {', '.join(unknown)}")
        signs = [j2_signs.get(s.id, 1) for s in order]
    else:
        signs = list(j2_signs)
        if len(signs) != len(order):
            raise DimensionError(f"sign list has {len(signs)} entries, diagram has {len(order)} local loops")
    for s, e in zip(order, signs):
        if e not in (1, -1):
            raise ValueError(f"sign for loop '{s.id}' must be +1 or -1, got {e!r}")
    return tuple(signs)


def require_exact_data(d: DeformationDiagram) -> None:
    missing = [f"special_points['{q.id}'].j1_block" for q in d.special_points if q.j1_block is None]
    missing += [
        f"special_points['{q.id}'].fibre.betti_n_minus_1" for q in d.special_points if q.fibre.betti_n_minus_1 is None
    ]
    if missing:
        raise DataMissingError("exact mode needs", missing)


def assemble_j(d: DeformationDiagram, j2_signs=None) -> JMap:
    require_exact_data(d)
    signs = _resolve_signs(d, j2_signs)
    points = sorted(d.special_points, key=lambda q: q.id)
    branches = sorted(d.branches, key=lambda b: b.id)

    q_offset, target_labels, row = {}, [], 0
    for q in points:
        q_offset[q.id] = row
        target_labels += [f"{q.id}#{k}" for k in range(q.fibre.betti_n_minus_1)]
        row += q.fibre.betti_n_minus_1
    b_offset = {}
    for b in branches:
        b_offset[b.id] = row
        target_labels += [f"{b.id}#{k}" for k in range(b.mu)]
        row += b.mu
    height = row

    columns, source_labels = [], []
    sign_iter = iter(signs)
    for q in points:
        mode = d.j1_coordinates(q.id) or "lattice"
        block = q.j1_block
        col = 0
        for s in q.loops:
            sign = next(sign_iter)
            mu = s.monodromy.rows
            if mode == "cokernel":
                gens = [v for v, _ in cokernel_generators(s.monodromy.minus_identity())]
            else:
                gens = [[int(i == k) for i in range(mu)] for k in range(mu)]
            for k, v in enumerate(gens):
                c = [0] * height
                if block.rows:
                    for i in range(block.rows):
                        c[q_offset[q.id] + i] = block[i, col]
                base = b_offset[s.branch_id]
                for i in range(mu):
                    c[base + i] += sign * v[i]
                columns.append(c)
                source_labels.append(f"{s.id}#{k}")
                col += 1

    rel_cols = []
    for b in branches:
        base = b_offset[b.id]
        for w in branch_loops(d, b):
            a = w.monodromy.minus_identity()
            for j in range(b.mu):
                c = [0] * height
                for i in range(b.mu):
                    c[base + i] = a[i, j]
                if any(c):
                    rel_cols.append(c)

    def from_cols(cols):
        return IntMatrix.from_rows([list(r) for r in zip(*cols)], cols=len(cols)) if cols else IntMatrix.zeros(height, 0)

    return JMap(
        matrix=from_cols(columns) if height else IntMatrix.zeros(0, len(columns)),
        relations=from_cols(rel_cols) if height else IntMatrix.zeros(0, 0),
        source_labels=tuple(source_labels),
        target_labels=tuple(target_labels),
        loop_order=tuple(s.id for s in loop_assembly_order(d)),
        signs=signs,
    )


def cokernel_over(pres: IntMatrix, prime: int | None) -> AbelianGroup:
    """Cokernel over Z, or over the prime field (returned as ``(Z/p)^dim``)."""
    if prime is None:
        return cokernel(pres)
    dim = pres.rows - rank_mod_p(pres, prime)
    return AbelianGroup(0, (prime,) * dim)


def mv_exact(d: DeformationDiagram, j2_signs=None, prime: int | None = None) -> AbelianGroup:
    """``H_(n-1)(F) = coker j`` over the integers, or over ``Z/prime``."""
    return cokernel_over(assemble_j(d, j2_signs).presentation(), prime)


def image_rank(j: JMap) -> int:
    """Rank over Q of the image of ``j`` in the target modulo relations."""
    return rank(j.presentation()) - rank(j.relations)


# -- Betti intervals --------------------------------------------------------


@dataclass(frozen=True)
class ExactResult:
    group: AbelianGroup
    prime: int | None = None


@dataclass(frozen=True)
class BettiIntervals:
    lower: int
    upper: int
    lower_source: str
    upper_source: str
    n_lower: int | None = None
    n_upper: int | None = None
    chi: int | None = None
    forced_by_nonnegativity: bool = False
    notes: tuple[str, ...] = field(default=())


def collect_bounds(d: DeformationDiagram) -> list[BettiBound]:
    """Every upper bound that the data supports."""
    bounds = [betti_bound_vertical(d).bound]
    try:
        bounds.append(betti_bound_special(d))
    except DataMissingError:
        pass
    bounds.append(trivial_bound(d))
    return bounds


def betti_intervals(
    d: DeformationDiagram,
    bounds: Sequence[BettiBound] | None = None,
    chi: int | None = None,
    exact: ExactResult | None = None,
    use_chi: bool = True,
) -> BettiIntervals:
    """Intervals for ``b_(n-1)(F)`` and ``b_n(F)``.

    ``b_n - b_(n-1) = (-1)^n (chi - 1)``, so non-negativity of ``b_n`` can
    raise the lower end for ``b_(n-1)``; when that happens the result is
    flagged. Contradictory data raises :class:`InconsistentDataError`.
    """
    if bounds is None:
        bounds = collect_bounds(d)
    if chi is None and use_chi:
        chi = euler_summary(d).value
    notes = []
    cands = [(b.value, f"{b.source} ({b.method})") for b in bounds]
    lower, lower_src = 0, SRC_NONNEG
    if d.n == 2 and d.irreducible_components_of_zero_set is not None:
        r = d.irreducible_components_of_zero_set - 1
        if r > lower:
            lower, lower_src = r, f"{SRC_COMPONENTS} (components - 1)"
    if exact is not None:
        if exact.prime is None:
            v = exact.group.free_rank
            best = min(cands) if cands else None
            if best is not None and v > best[0]:
                raise InconsistentDataError(
                    f"exact b_(n-1) = {v} ({SRC_MV}) exceeds upper bound {best[0]} from {best[1]}"
                )
            if v < lower:
                raise InconsistentDataError(f"exact b_(n-1) = {v} ({SRC_MV}) is below lower bound {lower} from {lower_src}")
            cands = [(v, f"{SRC_MV} over Z")]
            lower, lower_src = v, f"{SRC_MV} over Z"
        else:
            cands.append((exact.group.dimension_mod(exact.prime), f"{SRC_MV} over Z/{exact.prime}"))
    upper, upper_src = min(cands, key=lambda c: c[0])
    forced = False
    shift = None
    if chi is not None:
        shift = _sign(d.n) * (chi - 1)
        if -shift > lower:
            lower, lower_src, forced = -shift, f"{SRC_NONNEG} of b_n with chi = {chi}", True
            notes.append(f"b_n >= 0 and b_n - b_(n-1) = {shift} force b_(n-1) >= {-shift}")
    if lower > upper:
        raise InconsistentDataError(
            f"lower bound b_(n-1) >= {lower} ({lower_src}) contradicts upper bound b_(n-1) <= {upper} ({upper_src})"
        )
    return BettiIntervals(
        lower=lower,
        upper=upper,
        lower_source=lower_src,
        upper_source=upper_src,
        n_lower=None if shift is None else lower + shift,
        n_upper=None if shift is None else upper + shift,
        chi=chi,
        forced_by_nonnegativity=forced,
        notes=tuple(notes),
    )
