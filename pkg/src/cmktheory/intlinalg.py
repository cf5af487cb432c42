"""Exact integer linear algebra: Smith normal form and cokernels.

Python ints are arbitrary precision, so pivots may grow without bound and
invariant factors are never corrupted by overflow.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence


@dataclass(frozen=True)
class IntegerMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise ValueError("empty integer matrix")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("ragged integer matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntegerMatrix:
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def column(cls, values: Sequence[int]) -> IntegerMatrix:
        return cls.from_rows([[v] for v in values])

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = list(zip(*other.entries))
        return IntegerMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries)
        )

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix(tuple(zip(*self.entries)))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntegerMatrix:
        return IntegerMatrix(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def is_diagonal(self) -> bool:
        return all(
            self.entries[i][j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j
        )

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]

    def determinant(self) -> int:
        """Fraction-free Bareiss elimination; square matrices only."""
        n = self.rows
        if n != self.cols:
            raise ValueError("determinant of a non-square matrix")
        a = [list(row) for row in self.entries]
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

    def format(self, width: int | None = None) -> str:
        if width is None:
            width = max(len(str(x)) for row in self.entries for x in row)
        return "\n".join(" ".join(f"{x:>{width}}" for x in row) for row in self.entries)


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^free_rank + Z/d1 + ... + Z/ds with d1 | d2 | ... | ds, every di >= 2."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} must be >= 2")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValueError(f"invariant factors {d}, {e} do not divide")

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        return prod(self.torsion) if self.is_finite else None

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def smith_normal_form(m: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return (u, d, v) with u @ m @ v == d, u and v unimodular.

    Pivot is the nonzero entry of smallest absolute value in the remaining
    block, ties broken by lowest (row, col). The diagonal of d is
    nonnegative and each entry divides the next.
    """
    R, C = m.rows, m.cols
    a = [list(row) for row in m.entries]
    u = [[int(i == j) for j in range(R)] for i in range(R)]
    v = [[int(i == j) for j in range(C)] for i in range(C)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(R, C)):
        while True:
            best = None
            for i in range(t, R):
                for j in range(t, C):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = a[t][t]
            clean = True
            for i in range(t + 1, R):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, C):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, R) for j in range(t + 1, C) if a[i][j] % p), None
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        if a[t][t] == 0:
            break

    return IntegerMatrix.from_rows(u), IntegerMatrix.from_rows(a), IntegerMatrix.from_rows(v)


def invariant_factors(m: IntegerMatrix) -> list[int]:
    """Nonzero diagonal of the Smith form, in divisibility order."""
    _, d, _ = smith_normal_form(m)
    return [x for x in d.diagonal() if x]


def rank(m: IntegerMatrix) -> int:
    return len(invariant_factors(m))


def cokernel(m: IntegerMatrix) -> FgAbelianGroup:
    """Z^rows / im(m), reading m as a map Z^cols -> Z^rows."""
    factors = invariant_factors(m)
    return FgAbelianGroup(m.rows - len(factors), tuple(d for d in factors if d > 1))


def is_injective(m: IntegerMatrix) -> bool:
    return rank(m) == m.cols
