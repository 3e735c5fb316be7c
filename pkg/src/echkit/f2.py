"""Sparse matrices and small dense linear algebra over F2.

Columns are stored as Python integers used as bitsets: bit ``i`` of column
``j`` is set iff the entry ``(i, j)`` equals 1.  XOR of two columns is then
column addition mod 2, which keeps elimination fast without any external
dependency.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np


def bits_of(x: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bitset(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out ^= 1 << i
    return out


class SparseF2Matrix:
    """A ``rows x cols`` matrix over F2 stored column-wise as bitsets.

    Instances are immutable and hashable.  ``entries`` exposes the support as
    a frozenset of ``(row, col)`` positions.
    """

    __slots__ = ("rows", "cols", "_cols", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]] = ()):
        if rows < 0 or cols < 0:
            raise ValueError("matrix shape must be non-negative")
        colbits = [0] * cols
        for i, j in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            if colbits[j] >> i & 1:
                raise ValueError(f"duplicate entry ({i}, {j})")
            colbits[j] |= 1 << i
        self.rows = rows
        self.cols = cols
        self._cols = tuple(colbits)
        self._hash = None

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[int]) -> "SparseF2Matrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = len(columns)
        limit = 1 << rows
        for j, c in enumerate(columns):
            if c < 0 or c >= limit:
                raise IndexError(f"column {j} has bits outside {rows} rows")
        m._cols = tuple(columns)
        m._hash = None
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseF2Matrix":
        return cls.from_columns(rows, [0] * cols)

    @classmethod
    def identity(cls, n: int) -> "SparseF2Matrix":
        return cls.from_columns(n, [1 << i for i in range(n)])

    @classmethod
    def from_dense(cls, a) -> "SparseF2Matrix":
        a = np.asarray(a, dtype=np.int64) % 2
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = a.shape
        return cls.from_columns(rows, [bitset(np.flatnonzero(a[:, j]).tolist()) for j in range(cols)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for j, c in enumerate(self._cols) for i in bits_of(c))

    def column(self, j: int) -> int:
        return self._cols[j]

    def columns(self) -> tuple[int, ...]:
        return self._cols

    def nnz(self) -> int:
        return sum(c.bit_count() for c in self._cols)

    def is_zero(self) -> bool:
        return not any(self._cols)

    def __getitem__(self, pos: tuple[int, int]) -> int:
        i, j = pos
        return self._cols[j] >> i & 1

    def apply(self, x: int) -> int:
        """Image of the column vector with support bitset ``x``."""
        out = 0
        cols = self._cols
        while x:
            low = x & -x
            out ^= cols[low.bit_length() - 1]
            x ^= low
        return out

    def __matmul__(self, other: "SparseF2Matrix") -> "SparseF2Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseF2Matrix.from_columns(self.rows, [self.apply(c) for c in other._cols])

    def __add__(self, other: "SparseF2Matrix") -> "SparseF2Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return SparseF2Matrix.from_columns(self.rows, [a ^ b for a, b in zip(self._cols, other._cols)])

    __sub__ = __add__

    def transpose(self) -> "SparseF2Matrix":
        rows = [0] * self.rows
        for j, c in enumerate(self._cols):
            for i in bits_of(c):
                rows[i] |= 1 << j
        return SparseF2Matrix.from_columns(self.cols, rows)

    @property
    def T(self) -> "SparseF2Matrix":
        return self.transpose()

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "SparseF2Matrix":
        """Restrict to the given rows and columns, renumbered in the given order."""
        where = {r: k for k, r in enumerate(row_idx)}
        cols = []
        for j in col_idx:
            c = 0
            for i in bits_of(self._cols[j]):
                k = where.get(i)
                if k is not None:
                    c |= 1 << k
            cols.append(c)
        return SparseF2Matrix.from_columns(len(row_idx), cols)

    def embed(self, rows: int, cols: int, row_offset: int = 0, col_offset: int = 0) -> "SparseF2Matrix":
        """Place this matrix as a block inside a larger zero matrix."""
        if row_offset + self.rows > rows or col_offset + self.cols > cols:
            raise ValueError("block does not fit")
        out = [0] * cols
        for j, c in enumerate(self._cols):
            out[col_offset + j] = c << row_offset
        return SparseF2Matrix.from_columns(rows, out)

    def kron(self, other: "SparseF2Matrix") -> "SparseF2Matrix":
        """Kronecker product; pair ``(i1, i2)`` sits at index ``i1 * other.rows + i2``."""
        r2 = other.rows
        out = []
        for c1 in self._cols:
            rows1 = list(bits_of(c1))
            for c2 in other._cols:
                v = 0
                for i1 in rows1:
                    v |= c2 << (i1 * r2)
                out.append(v)
        return SparseF2Matrix.from_columns(self.rows * r2, out)

    def rank(self) -> int:
        return rank_of(list(self._cols))

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j, c in enumerate(self._cols):
            for i in bits_of(c):
                a[i, j] = 1
        return a

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseF2Matrix):
            return NotImplemented
        return self.rows == other.rows and self._cols == other._cols

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self._cols))
        return self._hash

    def __repr__(self) -> str:
        return f"SparseF2Matrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def block_matrix(blocks: Sequence[Sequence[SparseF2Matrix]]) -> SparseF2Matrix:
    """Assemble a matrix from a 2-d grid of blocks with consistent shapes."""
    heights = [row[0].rows for row in blocks]
    widths = [b.cols for b in blocks[0]]
    for row, h in zip(blocks, heights):
        if len(row) != len(widths) or any(b.rows != h for b in row):
            raise ValueError("inconsistent block shapes")
        if any(b.cols != w for b, w in zip(row, widths)):
            raise ValueError("inconsistent block shapes")
    cols = []
    for bj, w in enumerate(widths):
        for j in range(w):
            c, off = 0, 0
            for bi, h in enumerate(heights):
                c |= blocks[bi][bj].column(j) << off
                off += h
            cols.append(c)
    return SparseF2Matrix.from_columns(sum(heights), cols)


# dense helpers on numpy uint8 arrays (homology-level matrices are small)

def _rows_as_bits(a: np.ndarray) -> list[int]:
    a = np.asarray(a, dtype=np.uint8) % 2
    return [bitset(np.flatnonzero(r).tolist()) for r in a]


def rank_of(vectors: list[int]) -> int:
    pivots: dict[int, int] = {}
    r = 0
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                r += 1
                break
            v ^= p
    return r


def f2_rank(a) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return rank_of(_rows_as_bits(a))


def f2_matmul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return ((a @ b) % 2).astype(np.uint8)


def f2_nullspace(a) -> np.ndarray:
    """Basis of ``{x : a x = 0}`` as the rows of the returned array."""
    a = np.asarray(a, dtype=np.uint8) % 2
    m, n = a.shape
    red = a.copy()
    pivot_cols = []
    r = 0
    for c in range(n):
        hits = np.flatnonzero(red[r:, c]) if r < m else []
        if len(hits) == 0:
            continue
        p = r + hits[0]
        if p != r:
            red[[r, p]] = red[[p, r]]
        for i in range(m):
            if i != r and red[i, c]:
                red[i] ^= red[r]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivot_cols]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, fcol in enumerate(free):
        basis[k, fcol] = 1
        for i, pc in enumerate(pivot_cols):
            basis[k, pc] = red[i, fcol]
    return basis


def f2_solve(a, b) -> np.ndarray | None:
    """One solution of ``a x = b`` over F2, or ``None`` if inconsistent."""
    a = np.asarray(a, dtype=np.uint8) % 2
    b = np.asarray(b, dtype=np.uint8).reshape(-1) % 2
    m, n = a.shape
    aug = np.concatenate([a, b[:, None]], axis=1)
    pivot_cols = []
    r = 0
    for c in range(n):
        hits = np.flatnonzero(aug[r:, c]) if r < m else []
        if len(hits) == 0:
            continue
        p = r + hits[0]
        if p != r:
            aug[[r, p]] = aug[[p, r]]
        for i in range(m):
            if i != r and aug[i, c]:
                aug[i] ^= aug[r]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    if np.any(aug[r:, n]):
        return None
    x = np.zeros(n, dtype=np.uint8)
    for i, pc in enumerate(pivot_cols):
        x[pc] = aug[i, n]
    return x


def f2_is_invertible(a) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and f2_rank(a) == a.shape[0]
