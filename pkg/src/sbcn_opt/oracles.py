"""Naive reference routines for the test suite: exhaustive simple-cycle search."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .ostg import Ostg

MAX_VERTICES = 16


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]  # closed: first == last, smallest vertex first
    weight: float

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def mean(self) -> float:
        return self.weight / self.length


def canonical(cycle) -> tuple[int, ...]:
    """Rotate a closed cycle so its smallest vertex leads."""
    body = list(cycle[:-1])
    t = body.index(min(body))
    body = body[t:] + body[:t]
    return tuple(body + [body[0]])


def _guard(graph: Ostg, limit: int) -> None:
    if graph.n_vertices > limit:
        raise ValueError(f"graph has {graph.n_vertices} vertices; oracle limit is {limit}")


def enumerate_simple_cycles(graph: Ostg) -> list[Cycle]:
    """Every simple cycle, found by DFS from each root over larger vertices only."""
    _guard(graph, MAX_VERTICES)
    out = []
    for root in sorted(graph.vertices):
        path = [root]
        on_path = {root}

        def dfs(v):
            for e in graph.out_edges(v):
                w = e.dst
                if w == root:
                    cyc = tuple(path + [root])
                    out.append(Cycle(cyc, graph.path_weight(cyc)))
                elif w > root and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    dfs(w)
                    path.pop()
                    on_path.discard(w)

        dfs(root)
    out.sort(key=lambda c: c.vertices)
    return out


def enumerate_cycles_by_walks(graph: Ostg, limit: int = 8) -> set[tuple[int, ...]]:
    """Canonical simple cycles from breadth-first growth of simple walks at every start.

    Unlike the DFS this starts from every vertex and relies on rotation
    canonicalisation to merge duplicates.
    """
    _guard(graph, limit)
    found = set()
    queue = deque((v,) for v in graph.vertices)
    while queue:
        walk = queue.popleft()
        for w in graph.successors(walk[-1]):
            if w == walk[0]:
                found.add(canonical(walk + (w,)))
            elif w not in walk:
                queue.append(walk + (w,))
    return found


def brute_min_mean(graph: Ostg) -> tuple[float, tuple[int, ...]]:
    """Least cycle mean and its witness; ties go to the lexicographically smallest cycle."""
    cycles = enumerate_simple_cycles(graph)
    if not cycles:
        raise ValueError("graph has no cycle")
    mu = min(c.mean for c in cycles)
    # equal means can differ in the last bit depending on summation order
    witness = min(c.vertices for c in cycles if c.mean <= mu + 1e-12)
    return mu, witness
