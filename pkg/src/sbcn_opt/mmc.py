"""Minimum-mean cycle search with Karp's dynamic program.

``F[k][v]`` is the least weight of a ``k``-edge walk from the source to
``v``. The minimum cycle mean is
``min_v max_k (F[n][v] - F[k][v]) / (n - k)``, and every cycle on the
``n``-edge walk realising ``F[n][v*]`` is a minimum-mean cycle, so the first
repeated vertex along that walk delimits one.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from . import kernels
from .ostg import Ostg

TOL = 1e-9


class _Unreachable:
    """Marks ``F[k][v] = +inf``; refuses arithmetic so it cannot leak into sums."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def _refuse(self, *_):
        raise TypeError("arithmetic on an unreachable Karp entry")

    __add__ = __radd__ = __sub__ = __rsub__ = __mul__ = __rmul__ = _refuse
    __truediv__ = __rtruediv__ = __float__ = __lt__ = __le__ = __gt__ = __ge__ = _refuse


UNREACHABLE = _Unreachable()


class NoCycleError(ValueError):
    pass


@dataclass
class KarpTable:
    """Karp tables; row/column ``j`` of each array is vertex ``order[j]``.

    ``order`` is the graph's BFS discovery order, and backpointer ties keep
    the predecessor discovered first.
    """

    order: list[int]
    position: dict[int, int]
    source: int
    F: np.ndarray
    B: np.ndarray
    R: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order)

    def f(self, k: int, v: int):
        """``F[k][v]`` for state ``v``, or :data:`UNREACHABLE`."""
        j = self.position[v]
        return float(self.F[k, j]) if self.R[k, j] else UNREACHABLE

    def back(self, k: int, v: int) -> int | None:
        j = self.position[v]
        return self.order[self.B[k, j]] if self.R[k, j] and k > 0 else None

    def write_csv(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "v", "F", "B"])
        for k in range(self.n + 1):
            for j, v in enumerate(self.order):
                if self.R[k, j]:
                    b = self.order[self.B[k, j]] if k > 0 else ""
                    writer.writerow([k, v, repr(float(self.F[k, j])), b])
                else:
                    writer.writerow([k, v, "inf", ""])


@dataclass
class MmcResult:
    mu_star: float
    v_star: int
    k_star: int
    path: list[int]
    alpha: int
    beta: int
    cycle: list[int]
    transient: list[int]

    @property
    def cycle_length(self) -> int:
        return len(self.cycle) - 1


def karp_dp(graph: Ostg, source: int | None = None, *, backend: str | None = None) -> KarpTable:
    """Fill Karp's table from ``source`` (default: the graph's ``x0``)."""
    source = graph.x0 if source is None else source
    if source is None or source not in graph:
        raise ValueError("karp_dp needs a source vertex in the graph")
    order, position, indptr, pred, weight = graph.in_csr()
    mod = kernels if backend is None else kernels.get_backend(backend)
    F, B, R = mod.karp_fill(len(order), position[source], indptr, pred, weight)
    return KarpTable(order, position, source, F, B, R)


def min_mean(table: KarpTable, *, backend: str | None = None) -> tuple[float, int, int]:
    """``(mu*, v*, k*)``; ties go to the smallest state index, then smallest ``k``."""
    mod = kernels if backend is None else kernels.get_backend(backend)
    scan = np.argsort(np.asarray(table.order, dtype=np.int64), kind="stable")
    mu, j, k = mod.karp_min_mean(table.F, table.R, scan, TOL)
    if j < 0:
        raise NoCycleError("no cycle reachable from the source")
    return float(mu), table.order[j], int(k)


def reconstruct_path(table: KarpTable, v_star: int) -> list[int]:
    """The ``n``-edge walk from the source to ``v_star`` of weight ``F[n][v_star]``."""
    n = table.n
    j = table.position[v_star]
    if not table.R[n, j]:
        raise ValueError(f"no {n}-edge walk reaches {v_star}")
    idx = [0] * (n + 1)
    idx[n] = j
    for k in range(n, 0, -1):
        b = int(table.B[k, idx[k]])
        if b < 0:
            raise RuntimeError(f"broken backpointer chain at level {k}")
        idx[k - 1] = b
    if table.order[idx[0]] != table.source:
        raise RuntimeError("backpointer chain does not start at the source")
    return [table.order[i] for i in idx]


def first_simple_cycle(path: Sequence[int]) -> tuple[int, int, list[int], list[int]]:
    """``(alpha, beta, cycle, transient)`` for the first repeated vertex of ``path``.

    ``cycle`` is ``path[alpha..beta] + [path[alpha]]`` and ``transient`` is
    ``path[0..alpha]``.
    """
    first: dict[int, int] = {}
    for t, v in enumerate(path):
        if v in first:
            alpha, beta = first[v], t - 1
            cycle = list(path[alpha:beta + 1]) + [path[alpha]]
            return alpha, beta, cycle, list(path[:alpha + 1])
        first[v] = t
    raise ValueError("path has no repeated vertex")


def decompose_path(path: Sequence[int], graph: Ostg | None = None) -> tuple[list[list[int]], list[int]]:
    """Split a walk into simple cycles and a simple remainder, leftmost cycle first.

    The earliest closing position ``j`` with ``path[i] == path[j]`` is cut out
    as cycle ``path[i..j]``; ``path[j]`` stays in the remainder. When
    ``graph`` is given every step is checked to be an edge.
    """
    rest = list(path)
    if graph is not None:
        for a, b in zip(rest, rest[1:]):
            graph.edge(a, b)
    cycles = []
    while True:
        seen: dict[int, int] = {}
        for j, v in enumerate(rest):
            if v in seen:
                i = seen[v]
                cycles.append(rest[i:j + 1])
                rest = rest[:i] + rest[j:]
                break
            seen[v] = j
        else:
            return cycles, rest


def cycle_mean(graph: Ostg, cycle: Sequence[int]) -> float:
    return graph.path_weight(cycle) / (len(cycle) - 1)


def solve_mmc(graph: Ostg, source: int | None = None, *, backend: str | None = None) -> tuple[MmcResult, KarpTable]:
    """Run the full Karp pipeline from ``source`` (default ``x0``)."""
    table = karp_dp(graph, source, backend=backend)
    mu, v, k = min_mean(table, backend=backend)
    path = reconstruct_path(table, v)
    alpha, beta, cycle, transient = first_simple_cycle(path)
    return MmcResult(mu, v, k, path, alpha, beta, cycle, transient), table
