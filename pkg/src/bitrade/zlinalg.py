"""Exact integer linear algebra: Smith normal form, cokernels, abelian groups.

Everything here works on Python ints, so there is no overflow and no
floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """Dense row-major integer matrix."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None,
                 cols: int | None = None) -> IntMatrix:
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls.from_rows(data, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
            self.rows,
        )

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        a = self.to_rows()
        bt = other.transpose().to_rows()
        return IntMatrix.from_rows(
            [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a],
            other.cols,
        )

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> IntMatrix:
        col_idx = list(col_idx)
        return IntMatrix.from_rows(
            [[self[i, j] for j in col_idx] for i in row_idx], len(col_idx)
        )

    def delete(self, row: int, col: int) -> IntMatrix:
        """Drop one row and one column."""
        return self.submatrix(
            [i for i in range(self.rows) if i != row],
            [j for j in range(self.cols) if j != col],
        )

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> IntMatrix:
        return self.submatrix(row_perm, col_perm)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
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

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows)
                   for j in range(self.cols) if i != j)

    def diag(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def __str__(self):
        return "\n".join(" ".join(f"{x:>4}" for x in r) for r in self.to_rows())


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk and every di >= 2."""

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(self.invariant_factors))
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        fs = self.invariant_factors
        if any(d < 2 for d in fs):
            raise ValueError(f"invariant factors must be >= 2: {fs}")
        if any(fs[i + 1] % fs[i] for i in range(len(fs) - 1)):
            raise ValueError(f"invariant factors must form a divisibility chain: {fs}")

    @classmethod
    def cyclic(cls, *orders: int) -> AbelianGroup:
        return group_from_cyclic_orders(orders)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def rank(self) -> int:
        """Minimal number of generators."""
        return self.free_rank + len(self.invariant_factors)

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    @property
    def torsion(self) -> AbelianGroup:
        return AbelianGroup(0, self.invariant_factors)

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank,
                "invariant_factors": list(self.invariant_factors),
                "text": str(self)}


@dataclass(frozen=True)
class SnfResult:
    """U @ A @ V == S with U, V unimodular and S in Smith normal form."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return self.S.diag()


def _smallest_nonzero(a, r0, c0, rows, cols):
    best = None
    for i in range(r0, rows):
        row = a[i]
        for j in range(c0, cols):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best
    return best


def _smith(A: IntMatrix, track: bool):
    m, n = A.rows, A.cols
    a = A.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        rs, rd = a[src], a[dst]
        for k in range(n):
            if rs[k]:
                rd[k] += q * rs[k]
        if track:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] += q * us[k]

    def add_col(dst, src, q):
        for row in a:
            if row[src]:
                row[dst] += q * row[src]
        if track:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        found = _smallest_nonzero(a, t, t, m, n)
        if found is None:
            break
        _, i, j = found
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            # a remainder smaller than the pivot may survive in the cross
            best = None
            for i in range(t + 1, m):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, None)
            for j in range(t + 1, n):
                if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), None, j)
            if best is not None:
                if best[1] is not None:
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[2])
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            for row in a:
                row[t] = -row[t]
            if track:
                for row in V:
                    row[t] = -row[t]
        t += 1
    return a, U, V


def snf(A: IntMatrix) -> SnfResult:
    """Smith normal form with both unimodular transforms."""
    if A.rows == 0 or A.cols == 0:
        raise ValueError("snf needs a nonempty matrix")
    a, U, V = _smith(A, track=True)
    return SnfResult(IntMatrix.from_rows(a, A.cols),
                     IntMatrix.from_rows(U, A.rows),
                     IntMatrix.from_rows(V, A.cols))


def smith_diagonal(A: IntMatrix) -> list[int]:
    """Diagonal of the Smith normal form, without building U and V."""
    if A.rows == 0 or A.cols == 0:
        raise ValueError("snf needs a nonempty matrix")
    a, _, _ = _smith(A, track=False)
    return [a[i][i] for i in range(min(A.rows, A.cols))]


def cokernel(A: IntMatrix) -> AbelianGroup:
    """Z^cols modulo the integer row span of A."""
    diag = smith_diagonal(A)
    nonzero = [d for d in diag if d]
    return AbelianGroup(A.cols - len(nonzero), tuple(d for d in nonzero if d > 1))


def group_from_cyclic_orders(orders: Iterable[int]) -> AbelianGroup:
    """Canonical form of the direct sum of Z/n over the given orders.

    Uses the pairwise (gcd, lcm) exchange Z/a + Z/b = Z/gcd + Z/lcm, which
    never needs a factorisation.
    """
    xs = [int(n) for n in orders]
    if any(n <= 0 for n in xs):
        raise ValueError(f"cyclic orders must be positive: {xs}")
    xs = [n for n in xs if n > 1]
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            g = gcd(xs[i], xs[j])
            xs[i], xs[j] = g, xs[i] * xs[j] // g
    return AbelianGroup(0, tuple(sorted(n for n in xs if n > 1)))


def groups_isomorphic(G: AbelianGroup, H: AbelianGroup) -> bool:
    return G == H
