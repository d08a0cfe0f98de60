"""Logical matrices and the semi-tensor product.

A logical matrix ``delta_N[i_1, ..., i_Q]`` is stored as its 1-based column
index array; dense forms are only built on request (tests, tiny examples).

Boolean tuples map to delta indices with the first variable most significant
and ``1 ~ delta_2^1``: the all-ones tuple is ``delta_N^1`` and the all-zeros
tuple is ``delta_N^N``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class LogicalMatrix:
    """An ``rows x cols`` logical matrix kept as 1-based column indices."""

    rows: int
    col_index: np.ndarray

    def __post_init__(self):
        idx = np.ascontiguousarray(self.col_index, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("col_index must be a nonempty 1-d array")
        if self.rows < 1:
            raise ValueError("rows must be positive")
        if idx.min() < 1 or idx.max() > self.rows:
            raise ValueError(f"column indices must lie in [1, {self.rows}]")
        idx.setflags(write=False)
        object.__setattr__(self, "col_index", idx)

    @classmethod
    def delta(cls, rows: int, indices: Iterable[int]) -> "LogicalMatrix":
        """``delta_rows[i_1, ..., i_q]`` shorthand."""
        return cls(rows, np.fromiter(indices, dtype=np.int64))

    @classmethod
    def identity(cls, n: int) -> "LogicalMatrix":
        return cls(n, np.arange(1, n + 1))

    @property
    def cols(self) -> int:
        return int(self.col_index.size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def col(self, j: int) -> int:
        """Row index of the single 1 in column ``j`` (both 1-based)."""
        if not 1 <= j <= self.cols:
            raise IndexError(f"column {j} out of range 1..{self.cols}")
        return int(self.col_index[j - 1])

    def n_blocks(self) -> int:
        if self.cols % self.rows:
            raise ValueError(f"{self.cols} columns do not split into {self.rows}x{self.rows} blocks")
        return self.cols // self.rows

    def blk(self, k: int) -> "LogicalMatrix":
        """The ``k``-th square block; shares memory with ``self``."""
        m = self.n_blocks()
        if not 1 <= k <= m:
            raise IndexError(f"block {k} out of range 1..{m}")
        n = self.rows
        return LogicalMatrix(n, self.col_index[(k - 1) * n:k * n])

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=np.int8)
        dense[self.col_index - 1, np.arange(self.cols)] = 1
        return dense

    def to_list(self) -> list[int]:
        return self.col_index.tolist()

    def __eq__(self, other):
        if not isinstance(other, LogicalMatrix):
            return NotImplemented
        return self.rows == other.rows and np.array_equal(self.col_index, other.col_index)

    def __hash__(self):
        return hash((self.rows, self.col_index.tobytes()))

    def __repr__(self):
        body = " ".join(map(str, self.col_index[:16].tolist()))
        more = " ..." if self.cols > 16 else ""
        return f"delta_{self.rows}[{body}{more}]"


def stp(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    """Semi-tensor product ``a ⋉ b`` of two logical matrices.

    Works on column indices: with ``s = lcm(a.cols, b.rows)``, column
    ``(j-1)t + r`` of the result (``t = s / b.rows``) is column
    ``(b_j - 1)t + r`` of ``a ⊗ I_{s/a.cols}``.
    """
    n, p = a.cols, b.rows
    s = n * p // gcd(n, p)
    t_b = s // p
    t_a = s // n
    r = np.arange(t_b, dtype=np.int64)
    c = ((b.col_index[:, None] - 1) * t_b + r[None, :]).ravel()  # 0-based column of a ⊗ I
    a_col = c // t_a
    r_a = c % t_a
    out = (a.col_index[a_col] - 1) * t_a + r_a + 1
    return LogicalMatrix(a.rows * t_a, out)


def stp_chain(factors: Sequence[LogicalMatrix]) -> LogicalMatrix:
    result = factors[0]
    for f in factors[1:]:
        result = stp(result, f)
    return result


def bits_to_index(bits: Sequence[int] | str) -> int:
    """Map a Boolean tuple (first bit most significant) to its delta index."""
    if isinstance(bits, str):
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        bits = [int(ch) for ch in bits]
    n = len(bits)
    value = 0
    for b in bits:
        value = (value << 1) | (1 if b else 0)
    return (1 << n) - value


def index_to_bits(index: int, n: int) -> str:
    """Inverse of :func:`bits_to_index` as a bit string of length ``n``."""
    if not 1 <= index <= (1 << n):
        raise ValueError(f"index {index} out of range for n={n}")
    return format((1 << n) - index, f"0{n}b")
