"""Exact integer linear algebra.

Everything here works on Python ints, so nothing overflows. The central
routine is :func:`smith_normal_form`; kernels, cokernels and quotients of
free lattices by sums of images are read off from it. Ranks over the
rationals use a separate fraction-free elimination, which gives the test
suite a second route to the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from sympy import isprime

from .errors import DimensionError

__all__ = [
    "IntMatrix",
    "SmithForm",
    "AbelianGroup",
    "smith_normal_form",
    "rank",
    "rank_mod_p",
    "kernel_rank",
    "cokernel",
    "cokernel_multi",
    "cokernel_generators",
]


@dataclass(frozen=True)
class IntMatrix:
    """Dense ``rows x cols`` integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        """Build from nested lists. ``cols`` is only needed for 0-row matrices."""
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, cols or 0, ())
        width = len(rows[0])
        if cols is not None and cols != width:
            raise DimensionError(f"expected {cols} columns, got {width}")
        for k, r in enumerate(rows):
            if len(r) != width:
                raise DimensionError(f"row {k} has length {len(r)}, expected {width}")
        return cls(len(rows), width, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        return cls.diagonal([1] * size, size, size)

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int, cols: int) -> "IntMatrix":
        """``rows x cols`` matrix with ``values`` down the main diagonal, zeros elsewhere."""
        if len(values) > min(rows, cols):
            raise DimensionError("too many diagonal values for the shape")
        data = [0] * (rows * cols)
        for i, v in enumerate(values):
            data[i * cols + i] = int(v)
        return cls(rows, cols, tuple(data))

    @classmethod
    def hstack(cls, blocks: Sequence["IntMatrix"], rows: int | None = None) -> "IntMatrix":
        """Column-wise concatenation. ``rows`` fixes the height when ``blocks`` is empty."""
        if not blocks:
            return cls.zeros(rows or 0, 0)
        height = blocks[0].rows if rows is None else rows
        for k, b in enumerate(blocks):
            if b.rows != height:
                raise DimensionError(f"block {k} has {b.rows} rows, expected {height}")
        out = [[] for _ in range(height)]
        for b in blocks:
            for i in range(height):
                out[i].extend(b.entries[i * b.cols:(i + 1) * b.cols])
        return cls(height, sum(b.cols for b in blocks), tuple(x for r in out for x in r))

    @classmethod
    def vstack(cls, blocks: Sequence["IntMatrix"], cols: int | None = None) -> "IntMatrix":
        if not blocks:
            return cls.zeros(0, cols or 0)
        width = blocks[0].cols if cols is None else cols
        for k, b in enumerate(blocks):
            if b.cols != width:
                raise DimensionError(f"block {k} has {b.cols} columns, expected {width}")
        return cls(sum(b.rows for b in blocks), width, tuple(x for b in blocks for x in b.entries))

    # -- access -----------------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    def max_abs(self) -> int:
        return max((abs(x) for x in self.entries), default=0)

    # -- arithmetic -------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        a, b = self.to_rows(), other.to_rows()
        bt = list(zip(*b)) if b else [()] * other.cols
        data = [sum(x * y for x, y in zip(row, colv)) for row in a for colv in bt]
        return IntMatrix(self.rows, other.cols, tuple(data))

    def _same_shape(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scaled(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(c * x for x in self.entries))

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([list(c) for c in zip(*self.to_rows())], cols=self.rows) if self.rows else IntMatrix.zeros(self.cols, 0)

    def minus_identity(self) -> "IntMatrix":
        if not self.is_square:
            raise DimensionError("A - I needs a square matrix")
        return self - IntMatrix.identity(self.rows)

    def power(self, k: int) -> "IntMatrix":
        """Non-negative power by repeated squaring; negative powers need a unimodular matrix."""
        if not self.is_square:
            raise DimensionError("power of a non-square matrix")
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = IntMatrix.identity(self.rows)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self) -> int:
        """Determinant by Bareiss fraction-free elimination."""
        if not self.is_square:
            raise DimensionError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse(self) -> "IntMatrix":
        """Inverse of a unimodular matrix (determinant +1 or -1)."""
        d = self.det()
        if d not in (1, -1):
            raise ValueError(f"matrix is not unimodular (det = {d})")
        n = self.rows
        # Gauss-Jordan over Z; unimodularity guarantees unit pivots after gcd steps.
        a = [row + [int(i == j) for j in range(n)] for i, row in enumerate(self.to_rows())]
        for c in range(n):
            while True:
                live = [i for i in range(c, n) if a[i][c] != 0]
                p = min(live, key=lambda i: (abs(a[i][c]), i))
                a[c], a[p] = a[p], a[c]
                if all(a[i][c] % a[c][c] == 0 for i in range(c + 1, n)):
                    break
                for i in range(c + 1, n):
                    q = a[i][c] // a[c][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[c])]
            if a[c][c] < 0:
                a[c] = [-x for x in a[c]]
            for i in range(n):
                if i != c and a[i][c]:
                    q = a[i][c] // a[c][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[c])]
        return IntMatrix.from_rows([row[n:] for row in a])

    def __str__(self) -> str:
        return str(self.to_rows())


def _as_matrix(m) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)


@dataclass(frozen=True)
class SmithForm:
    """``left_transform @ M @ right_transform`` is diagonal with ``invariant_factors``."""

    invariant_factors: tuple[int, ...]
    rank: int
    left_transform: IntMatrix
    right_transform: IntMatrix

    def diagonal(self) -> IntMatrix:
        return IntMatrix.diagonal(self.invariant_factors, self.left_transform.rows, self.right_transform.cols)


def _first_smallest(a, t, rows, cols):
    best = None
    for i in range(t, rows):
        for j in range(t, cols):
            x = a[i][j]
            if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Smith normal form by row/column elimination with smallest-entry pivoting.

    The pivot at each stage is the first entry of least nonzero magnitude
    in row-major order, so transforms are reproducible.
    """
    m = _as_matrix(m)
    R, C = m.rows, m.cols
    a = m.to_rows()
    U = IntMatrix.identity(R).to_rows()
    V = IntMatrix.identity(C).to_rows()

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(R, C):
        piv = _first_smallest(a, t, R, C)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            p = a[t][t]
            for i in range(t + 1, R):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, C):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            # Remainders smaller than the pivot become the next pivot.
            cands = [(abs(a[i][t]), 0, i) for i in range(t + 1, R) if a[i][t]]
            cands += [(abs(a[t][j]), 1, j) for j in range(t + 1, C) if a[t][j]]
            if cands:
                _, kind, k = min(cands)
                if kind == 0:
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(
                (i for i in range(t + 1, R) for j in range(t + 1, C) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    return SmithForm(
        invariant_factors=tuple(a[i][i] for i in range(t)),
        rank=t,
        left_transform=IntMatrix.from_rows(U, cols=R),
        right_transform=IntMatrix.from_rows(V, cols=C),
    )


def rank(m: IntMatrix) -> int:
    """Rank over the rationals (fraction-free elimination, independent of the SNF code)."""
    m = _as_matrix(m)
    a = m.to_rows()
    r = 0
    for c in range(m.cols):
        p = next((i for i in range(r, m.rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(r + 1, m.rows):
            if a[i][c]:
                f, g = a[r][c], a[i][c]
                row = [f * x - g * y for x, y in zip(a[i], a[r])]
                cont = reduce(gcd, row, 0)
                a[i] = [x // cont for x in row] if cont > 1 else row
        r += 1
        if r == m.rows:
            break
    return r


def rank_mod_p(m: IntMatrix, p: int) -> int:
    """Rank of ``m`` with entries reduced modulo the prime ``p``."""
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise ValueError(f"modulus must be a prime, got {p!r}")
    m = _as_matrix(m)
    a = [[x % p for x in row] for row in m.to_rows()]
    r = 0
    for c in range(m.cols):
        piv = next((i for i in range(r, m.rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == m.rows:
            break
    return r


def kernel_rank(m: IntMatrix) -> int:
    m = _as_matrix(m)
    return m.cols - rank(m)


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank`` plus ``Z/d1 + Z/d2 + ...`` with ``d1 | d2 | ...``.

    Unit factors are dropped on construction, so two groups are isomorphic
    exactly when they compare equal.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = field(default=())

    def __post_init__(self):
        tor = tuple(int(d) for d in self.torsion if d != 1)
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        if any(d < 2 for d in tor):
            raise ValueError(f"torsion coefficients must be >= 2, got {self.torsion}")
        if any(b % a for a, b in zip(tor, tor[1:])):
            raise ValueError(f"torsion {tor} is not a divisibility chain; use AbelianGroup.from_orders")
        object.__setattr__(self, "torsion", tor)

    @classmethod
    def from_orders(cls, free_rank: int, orders: Iterable[int]) -> "AbelianGroup":
        """Canonical form of ``Z^free_rank + sum of Z/d`` for arbitrary orders ``d``."""
        orders = [abs(int(d)) for d in orders]
        extra_free = sum(1 for d in orders if d == 0)
        finite = [d for d in orders if d > 1]
        snf = smith_normal_form(IntMatrix.diagonal(finite, len(finite), len(finite)))
        return cls(free_rank + extra_free, snf.invariant_factors)

    @classmethod
    def free(cls, r: int) -> "AbelianGroup":
        return cls(r, ())

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """Group order, or ``None`` when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def dimension_mod(self, p: int) -> int:
        """Dimension of ``G tensor Z/p`` over the field with ``p`` elements."""
        return self.free_rank + sum(1 for d in self.torsion if d % p == 0)

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_dict(cls, data: dict) -> "AbelianGroup":
        return cls(int(data["free_rank"]), tuple(data.get("torsion", ())))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def cokernel(m: IntMatrix) -> AbelianGroup:
    """``Z^rows / Im(m)`` for ``m`` viewed as a map ``Z^cols -> Z^rows``."""
    m = _as_matrix(m)
    snf = smith_normal_form(m)
    return AbelianGroup(m.rows - snf.rank, tuple(d for d in snf.invariant_factors if d > 1))


def cokernel_multi(ambient_rank: int, matrices: Sequence[IntMatrix]) -> AbelianGroup:
    """Quotient of ``Z^ambient_rank`` by the sum of the images of ``matrices``."""
    mats = [_as_matrix(m) for m in matrices]
    for k, m in enumerate(mats):
        if m.rows != ambient_rank:
            raise DimensionError(f"matrix {k} has {m.rows} rows, ambient lattice has rank {ambient_rank}")
    return cokernel(IntMatrix.hstack(mats, rows=ambient_rank))


def cokernel_generators(m: IntMatrix) -> list[tuple[list[int], int]]:
    """Cyclic decomposition of ``Z^rows / Im(m)`` in lattice coordinates.

    Returns ``(vector, order)`` pairs, ``order == 0`` meaning infinite
    cyclic, in the order: torsion summands by increasing invariant factor,
    then the free summands. Unit summands are omitted.
    """
    m = _as_matrix(m)
    snf = smith_normal_form(m)
    factors = list(snf.invariant_factors) + [0] * (m.rows - snf.rank)
    back = snf.left_transform.inverse()
    return [(back.column(k), d) for k, d in enumerate(factors) if d != 1]
