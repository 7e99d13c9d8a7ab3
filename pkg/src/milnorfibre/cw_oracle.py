"""Brute-force check of the closed-form groups through explicit cell complexes.

Each loop bundle pair is modelled relative to its fibre by ``mu`` n-cells
(thimbles killing the vanishing cycles) and ``mu`` (n+1)-cells, the
(n+1)-cell over ``c_k`` being a cylinder glued from ``c_k`` to ``A(c_k)``.
A branch pair shares one cluster of n-cells and carries ``mu`` (n+1)-cells
per loop. Homology of these two-term complexes is computed here without
the Smith normal form code: the image lattice is brought to echelon form
with Euclid steps and the torsion is read from determinantal divisors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, gcd

from . import homology
from .diagram import Branch, DeformationDiagram, LocalLoop
from .zlattice import AbelianGroup, IntMatrix, smith_normal_form

# above this many minors fall back to the generic normal form
MINOR_BUDGET = 60_000


@dataclass(frozen=True)
class ChainComplexSlice:
    """Cellular boundary ``C_(n+1) -> C_n`` of a relative CW pair."""

    upper_rank: int
    lower_rank: int
    boundary: IntMatrix

    def __post_init__(self):
        if self.boundary.shape != (self.lower_rank, self.upper_rank):
            raise ValueError(
                f"boundary is {self.boundary.rows}x{self.boundary.cols}, "
                f"expected {self.lower_rank}x{self.upper_rank}"
            )

    def euler(self, n: int) -> int:
        """Euler characteristic from cell counts, cells living in degrees n and n+1."""
        s = -1 if n % 2 else 1
        return s * self.lower_rank - s * self.upper_rank


def _attach_cells(monodromy: IntMatrix) -> list[list[int]]:
    """Boundaries of the (n+1)-cells over one loop: ``A(c_k) - c_k`` for each thimble ``c_k``."""
    mu = monodromy.rows
    cells = []
    for k in range(mu):
        image = monodromy.column(k)
        image[k] -= 1
        cells.append(image)
    return cells


def _slice_from_cells(cells: list[list[int]], mu: int) -> ChainComplexSlice:
    if cells:
        boundary = IntMatrix.from_rows([list(r) for r in zip(*cells)], cols=len(cells))
    else:
        boundary = IntMatrix.zeros(mu, 0)
    return ChainComplexSlice(upper_rank=len(cells), lower_rank=mu, boundary=boundary)


def build_loop_complex(monodromy: IntMatrix) -> ChainComplexSlice:
    if not monodromy.is_square:
        raise ValueError("monodromy must be square")
    return _slice_from_cells(_attach_cells(monodromy), monodromy.rows)


def build_branch_complex(b: Branch, loops_on_b) -> ChainComplexSlice:
    special = [s.monodromy if isinstance(s, LocalLoop) else s for s in loops_on_b]
    cells = []
    for m in (*b.genus_loops, *special, *b.outside_loops):
        cells.extend(_attach_cells(m))
    return _slice_from_cells(cells, b.mu)


def _echelon(vectors: list[list[int]]) -> list[list[int]]:
    """Echelon basis of the lattice spanned by ``vectors`` (Euclid row steps)."""
    rows = [list(v) for v in vectors if any(v)]
    basis = []
    width = len(rows[0]) if rows else 0
    for c in range(width):
        live = [r for r in rows if r[c]]
        rest = [r for r in rows if not r[c]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[c] // p[c]
                r = [x - q * y for x, y in zip(r, p)]
                (nxt if r[c] else rest).append(r)
            live = nxt
        if live:
            basis.append(live[0])
        rows = [r for r in rest if any(r)]
    return basis


def _det(m: list[list[int]]) -> int:
    return IntMatrix.from_rows(m).det() if m else 1


def _invariant_factors(basis: list[list[int]], width: int) -> list[int]:
    r = len(basis)
    if sum(comb(r, k) * comb(width, k) for k in range(1, r + 1)) > MINOR_BUDGET:
        return list(smith_normal_form(IntMatrix.from_rows(basis)).invariant_factors)
    factors, prev = [], 1
    for k in range(1, r + 1):
        g = 0
        for ri in combinations(range(r), k):
            for ci in combinations(range(width), k):
                g = gcd(g, _det([[basis[i][j] for j in ci] for i in ri]))
                if g == prev:
                    break
            if g == prev:
                break
        factors.append(g // prev)
        prev = g
    return factors


def homology_of_slice(c: ChainComplexSlice) -> tuple[AbelianGroup, AbelianGroup]:
    """``(H_(n+1), H_n)`` of the two-term complex: kernel and cokernel of the boundary."""
    cols = [c.boundary.column(j) for j in range(c.boundary.cols)]
    basis = _echelon(cols)
    r = len(basis)
    factors = _invariant_factors(basis, c.lower_rank)
    return AbelianGroup.free(c.upper_rank - r), AbelianGroup.from_orders(c.lower_rank - r, factors)


@dataclass(frozen=True)
class OracleCheck:
    object_id: str
    check: str
    expected: str
    observed: str

    @property
    def passed(self) -> bool:
        return self.expected == self.observed


@dataclass(frozen=True)
class OracleReport:
    checks: tuple[OracleCheck, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[OracleCheck]:
        return [c for c in self.checks if not c.passed]


class OracleMismatch(AssertionError):
    """Closed form and cell complex disagree: an implementation bug, not bad data."""


def cross_validate(d: DeformationDiagram, strict: bool = False) -> OracleReport:
    """Compare every Wang group and branch group against the cell-complex computation.

    ``expected`` holds the closed-form value, ``observed`` the oracle's.
    With ``strict`` the first report containing a failure raises
    :class:`OracleMismatch` naming the objects.
    """
    checks = []
    for b in d.branches:
        for s in homology.branch_loops(d, b):
            up, low = homology_of_slice(build_loop_complex(s.monodromy))
            w = homology.wang_groups(s.monodromy)
            checks.append(OracleCheck(f"loop {s.label}", "H_(n+1)", str(w.h_upper), str(up)))
            checks.append(OracleCheck(f"loop {s.label}", "H_n", str(w.h_lower), str(low)))

    for b in d.branches:
        loops = d.loops_on(b.id)
        sl = build_branch_complex(b, loops)
        up, low = homology_of_slice(sl)
        group = homology.branch_group(b, loops)
        chi = homology.branch_euler(b, d.n, d.counts(b.id).gamma)
        sign = -1 if d.n % 2 else 1
        # rank H_(n+1) from exactness: chi = (-1)^n (r_n - r_(n+1))
        upper_rank = group.free_rank - sign * chi
        checks.append(OracleCheck(f"branch {b.id}", "H_n", str(group), str(low)))
        checks.append(OracleCheck(f"branch {b.id}", "H_(n+1) rank", str(upper_rank), str(up.free_rank)))
        checks.append(OracleCheck(f"branch {b.id}", "euler (cells)", str(chi), str(sl.euler(d.n))))
        checks.append(
            OracleCheck(
                f"branch {b.id}", "euler (homology)", str(chi), str(sign * low.free_rank - sign * up.free_rank)
            )
        )
    report = OracleReport(tuple(checks))
    if strict and not report.passed:
        names = sorted({f.object_id for f in report.failures})
        raise OracleMismatch("oracle disagreement on " + ", ".join(names))
    return report
