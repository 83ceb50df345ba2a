"""Exact integer linear algebra: dense integer matrices and Smith normal form.

Entries are Python ints throughout, so nothing ever overflows or rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class IntMatrix:
    """Dense matrix of arbitrary-precision integers, stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        if entries is None:
            entries = [[0] * cols for _ in range(rows)]
        self.entries = [list(map(int, r)) for r in entries]
        if len(self.entries) != rows or any(len(r) != cols for r in self.entries):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        cols = len(columns)
        return cls(rows, cols, [[columns[j][i] for j in range(cols)] for i in range(rows)])

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [r[:] for r in self.entries])

    def column(self, j: int) -> list:
        return [r[j] for r in self.entries]

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, [self.column(j) for j in range(self.cols)])

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            ocols = other.columns()
            return IntMatrix(self.rows, other.cols, [
                [sum(a * b for a, b in zip(row, oc) if a) for oc in ocols] for row in self.entries
            ])
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return [sum(a * b for a, b in zip(row, vec) if a) for row in self.entries]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.entries == other.entries \
            and self.rows == other.rows and self.cols == other.cols

    def __repr__(self):
        return f"IntMatrix({self.rows}, {self.cols}, {self.entries!r})"

    def is_zero(self) -> bool:
        return all(not a for r in self.entries for a in r)

    def to_triplets(self) -> str:
        """``rows cols`` header followed by one ``i j value`` line per nonzero entry."""
        lines = [f"{self.rows} {self.cols}"]
        for i, r in enumerate(self.entries):
            for j, a in enumerate(r):
                if a:
                    lines.append(f"{i} {j} {a}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_triplets(cls, text: str) -> "IntMatrix":
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        rows, cols = map(int, lines[0])
        m = cls(rows, cols)
        for i, j, a in lines[1:]:
            m.entries[int(i)][int(j)] = int(a)
        return m


def determinant(m: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = [r[:] for r in m.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def rational_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, len(a)):
            f = a[i][col]
            row_i, row_r = a[i], a[rank]
            a[i] = [(row_i[j] * p - f * row_r[j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
        if rank == len(a):
            break
    return rank


def gf2_rank(vectors: Sequence[int]) -> int:
    """Rank over Z/2 of vectors packed as int bitmasks."""
    basis = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def gf2_in_span(vectors: Sequence[int], target: int) -> bool:
    basis = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    while target:
        top = target.bit_length() - 1
        if top not in basis:
            return False
        target ^= basis[top]
    return True


def pack_mod2(vec: Sequence[int]) -> int:
    out = 0
    for i, a in enumerate(vec):
        if a % 2:
            out |= 1 << i
    return out


@dataclass
class SnfResult:
    """``u @ m @ v == d`` with ``u``, ``v`` unimodular; ``u_inv @ u == I``."""

    diagonal: list
    u: IntMatrix
    v: IntMatrix
    u_inv: IntMatrix
    shape: tuple

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x)

    @property
    def invariant_factors(self) -> list:
        return [x for x in self.diagonal if x]

    def d_matrix(self) -> IntMatrix:
        rows, cols = self.shape
        d = IntMatrix(rows, cols)
        for i, x in enumerate(self.diagonal):
            d.entries[i][i] = x
        return d


def smith_normal_form(m: IntMatrix) -> SnfResult:
    """Smith normal form with transforms.

    Pivot rule: at step t take the entry of least absolute value in the
    trailing block (first in row-major order on ties), clear its row and
    column by Euclidean steps, then restore divisibility by folding an
    offending row into the pivot row.  The procedure is deterministic.
    """
    rows, cols = m.rows, m.cols
    a = [r[:] for r in m.entries]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    u_inv = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    # Row op "row_i += q * row_j": u gets the same op; u_inv gets col_j -= q * col_i.
    def row_add(i, j, q):
        if not q:
            return
        ai, aj = a[i], a[j]
        for c in range(cols):
            if aj[c]:
                ai[c] += q * aj[c]
        ui, uj = u[i], u[j]
        for c in range(rows):
            if uj[c]:
                ui[c] += q * uj[c]
        for r in u_inv:
            if r[i]:
                r[j] -= q * r[i]

    def row_swap(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in u_inv:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for r in u_inv:
            r[i] = -r[i]

    def col_add(i, j, q):
        if not q:
            return
        for r in a:
            if r[j]:
                r[i] += q * r[j]
        for r in v:
            if r[j]:
                r[i] += q * r[j]

    def col_swap(i, j):
        if i == j:
            return
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    diag = []
    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            row = a[i]
            for j in range(t, cols):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        row_swap(t, pi)
        col_swap(t, pj)
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    row_add(i, t, -q)
                    if a[i][t]:
                        row_swap(t, i)
                        done = False
                        break
            if not done:
                continue
            p = a[t][t]
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    col_add(j, t, -q)
                    if a[t][j]:
                        col_swap(t, j)
                        done = False
                        break
            if not done:
                continue
            p = a[t][t]
            bad = None
            for i in range(t + 1, rows):
                if any(x % p for x in a[i][t + 1:]):
                    bad = i
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if a[t][t] < 0:
            row_neg(t)
        diag.append(a[t][t])
        t += 1
    diag.extend([0] * (min(rows, cols) - len(diag)))
    return SnfResult(
        diagonal=diag,
        u=IntMatrix(rows, rows, u),
        v=IntMatrix(cols, cols, v),
        u_inv=IntMatrix(rows, rows, u_inv),
        shape=(rows, cols),
    )


def check_snf(m: IntMatrix, res: SnfResult) -> None:
    """Re-verify every Smith normal form contract by multiplication."""
    d = res.d_matrix()
    if res.u @ m @ res.v != d:
        raise AssertionError("U M V != D")
    nz = res.invariant_factors
    if any(x < 0 for x in res.diagonal):
        raise AssertionError("negative diagonal entry")
    if any(nz[i + 1] % nz[i] for i in range(len(nz) - 1)):
        raise AssertionError("divisibility chain broken")
    if any(res.diagonal[i] == 0 and res.diagonal[i + 1] != 0 for i in range(len(res.diagonal) - 1)):
        raise AssertionError("zero before nonzero on the diagonal")
    if abs(determinant(res.u)) != 1 or abs(determinant(res.v)) != 1:
        raise AssertionError("transform not unimodular")
    if res.u_inv @ res.u != IntMatrix.identity(m.rows):
        raise AssertionError("u_inv is not the inverse of u")
