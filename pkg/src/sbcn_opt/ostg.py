"""Optimal state transition graph: BFS over admissible transitions from x0.

Each edge keeps the cheapest action ``(input, subsystem)`` realising the
transition and that action's stage cost as its weight.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .model import ProblemInstance, validate


class InfeasibleError(ValueError):
    """No admissible infinite trajectory exists from the requested state."""


class ValidationError(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    weight: float
    input: int
    subsystem: int

    @property
    def action(self) -> tuple[int, int]:
        return self.input, self.subsystem


@dataclass
class Ostg:
    """Adjacency-list graph over states, keyed by 1-based state index.

    ``vertices`` keeps BFS discovery order. ``roots`` are the BFS seeds
    (just ``x0`` for a single-state graph).
    """

    vertices: list[int]
    adjacency: dict[int, list[Edge]]
    x0: int | None = None
    roots: list[int] = field(default_factory=list)
    N: int | None = None
    M: int | None = None
    z: int | None = None
    pruned: list[int] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], x0: int | None = None,
                   vertices: Iterable[int] | None = None) -> "Ostg":
        """Graph from ``(src, dst, weight[, input, subsystem])`` tuples (tests, oracles)."""
        adjacency: dict[int, list[Edge]] = {}
        order: dict[int, None] = {}
        if x0 is not None:
            order[x0] = None
        for v in vertices or ():
            order.setdefault(v)
        for e in edges:
            src, dst, w = e[:3]
            action = tuple(e[3:5]) if len(e) >= 5 else (1, 1)
            order.setdefault(src)
            order.setdefault(dst)
            adjacency.setdefault(src, []).append(Edge(src, dst, float(w), *action))
        verts = list(order)
        for v in verts:
            adjacency.setdefault(v, [])
        return cls(verts, adjacency, x0=x0, roots=[x0] if x0 is not None else [])

    def __contains__(self, v: int) -> bool:
        return v in self.adjacency

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return sum(len(es) for es in self.adjacency.values())

    def out_edges(self, v: int) -> list[Edge]:
        return self.adjacency[v]

    def edges(self) -> Iterator[Edge]:
        for v in self.vertices:
            yield from self.adjacency[v]

    def edge(self, i: int, j: int) -> Edge:
        for e in self.adjacency.get(i, ()):
            if e.dst == j:
                return e
        raise KeyError(f"no edge {i} -> {j}")

    def successors(self, v: int) -> list[int]:
        return [e.dst for e in self.adjacency[v]]

    def reverse(self) -> dict[int, list[Edge]]:
        rev: dict[int, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges():
            rev[e.dst].append(e)
        return rev

    def path_weight(self, path: Sequence[int]) -> float:
        return sum(self.edge(a, b).weight for a, b in zip(path, path[1:]))

    def subgraph(self, keep: Iterable[int], x0: int | None = None) -> "Ostg":
        keep = set(keep)
        verts = [v for v in self.vertices if v in keep]
        adjacency = {v: [e for e in self.adjacency[v] if e.dst in keep] for v in verts}
        return Ostg(verts, adjacency, x0=x0, roots=[x0] if x0 is not None else [],
                    N=self.N, M=self.M, z=self.z)

    def in_csr(self, order: Sequence[int] | None = None):
        """In-edge CSR arrays for the Karp kernels.

        Vertices are numbered by ``order`` (default: BFS discovery order);
        each vertex's in-edges are sorted by predecessor number. Returns
        ``(order, position, indptr, pred, weight)``.
        """
        order = list(self.vertices) if order is None else list(order)
        position = {v: i for i, v in enumerate(order)}
        incoming: list[list[tuple[int, float]]] = [[] for _ in order]
        for e in self.edges():
            incoming[position[e.dst]].append((position[e.src], e.weight))
        indptr = np.zeros(len(order) + 1, dtype=np.int64)
        pred, weight = [], []
        for j, ins in enumerate(incoming):
            ins.sort(key=lambda t: t[0])
            pred.extend(i for i, _ in ins)
            weight.extend(w for _, w in ins)
            indptr[j + 1] = len(pred)
        return (order, position, indptr, np.asarray(pred, dtype=np.int64),
                np.asarray(weight, dtype=np.float64))


# --- one-step quantities --------------------------------------------------

def _actions(instance: ProblemInstance, i: int):
    """Admissible ``(k, l)`` pairs of state ``i`` in exploration order.

    Subsystems ascend; inputs follow the model's exploration order. This
    order fixes BFS discovery order, which in turn decides Karp backpointer
    ties.
    """
    c = instance.constraints
    inputs = instance.model.exploration_order(c.Cu(i))
    for l in c.Csigma(i):
        for k in inputs:
            yield k, l


def successors(instance: ProblemInstance, x: int) -> set[int]:
    """One-step reachable set of ``x`` under the constraints."""
    c, model = instance.constraints, instance.model
    if not c.admissible(x):
        raise ValueError(f"state {x} is not admissible")
    out = set()
    for k, l in _actions(instance, x):
        j = model.step(x, k, l)
        if c.admissible(j):
            out.add(j)
    return out


def admissible_actions(instance: ProblemInstance, i: int, j: int) -> set[tuple[int, int]]:
    """All admissible ``(input, subsystem)`` pairs steering ``i`` to ``j``."""
    c, model = instance.constraints, instance.model
    if not (c.admissible(i) and c.admissible(j)):
        return set()
    return {(k, l) for k, l in _actions(instance, i) if model.step(i, k, l) == j}


def _cheapest(instance: ProblemInstance, i: int, actions: Sequence[tuple[int, int]]):
    best = None
    for k, l in sorted(actions, key=lambda a: (a[1], a[0])):
        g = instance.cost(i, k, l)
        if best is None or g < best[1]:
            best = ((k, l), g)
    return best


def optimal_action(instance: ProblemInstance, i: int, j: int) -> tuple[tuple[int, int], float]:
    """Cheapest action from ``i`` to ``j`` and its cost; ties go to the smallest (l, k)."""
    actions = admissible_actions(instance, i, j)
    if not actions:
        raise ValueError(f"no admissible action steers {i} to {j}")
    return _cheapest(instance, i, list(actions))


# --- construction ----------------------------------------------------------

def _explore(instance: ProblemInstance, seeds: Iterable[int], actions: dict, order: list[int],
             stats: dict[str, int]) -> None:
    """BFS from each unvisited seed, recording admissible actions per edge."""
    c, model = instance.constraints, instance.model
    for seed in seeds:
        if seed in actions:
            continue
        actions[seed] = {}
        order.append(seed)
        queue = deque([seed])
        while queue:
            i = queue.popleft()
            stats["visited"] += 1
            row = actions[i]
            for k, l in _actions(instance, i):
                stats["actions"] += 1
                j = model.step(i, k, l)
                if not c.admissible(j):
                    continue
                row.setdefault(j, []).append((k, l))
                if j not in actions:
                    actions[j] = {}
                    order.append(j)
                    queue.append(j)


def _finish(instance: ProblemInstance, actions: dict, order: list[int], stats, x0, roots) -> Ostg:
    adjacency: dict[int, list[Edge]] = {}
    for i in order:
        edges = []
        for j, acts in actions[i].items():
            (k, l), g = _cheapest(instance, i, acts)
            edges.append(Edge(i, j, g, k, l))
        adjacency[i] = edges
    model = instance.model
    graph = Ostg(list(order), adjacency, x0=x0, roots=list(roots), N=model.N, M=model.M, z=model.z,
                 stats=dict(stats))
    prune_dead_ends(graph)
    return graph


def prune_dead_ends(graph: Ostg) -> list[int]:
    """Repeatedly delete vertices without out-edges; returns them in removal order."""
    rev: dict[int, set[int]] = {v: set() for v in graph.vertices}
    outdeg = {}
    for v in graph.vertices:
        outdeg[v] = len(graph.adjacency[v])
        for e in graph.adjacency[v]:
            rev[e.dst].add(v)
    queue = deque(v for v in graph.vertices if outdeg[v] == 0)
    removed = []
    gone = set()
    while queue:
        v = queue.popleft()
        if v in gone:
            continue
        gone.add(v)
        removed.append(v)
        for u in rev[v]:
            if u not in gone:
                outdeg[u] -= 1
                if outdeg[u] == 0:
                    queue.append(u)
    if gone:
        graph.vertices = [v for v in graph.vertices if v not in gone]
        graph.adjacency = {v: [e for e in graph.adjacency[v] if e.dst not in gone] for v in graph.vertices}
        graph.pruned.extend(removed)
    return removed


def build_ostg(instance: ProblemInstance) -> Ostg:
    """OSTG of ``instance`` rooted at its initial state, dead ends pruned."""
    errors = validate(instance)
    if errors:
        raise ValidationError(errors)
    x0 = instance.x0
    actions: dict[int, dict[int, list]] = {}
    order: list[int] = []
    stats = {"visited": 0, "actions": 0}
    _explore(instance, [x0], actions, order, stats)
    graph = _finish(instance, actions, order, stats, x0, [x0])
    if x0 not in graph:
        raise InfeasibleError(f"x0 admits no infinite admissible trajectory (state {x0}; "
                              f"{len(graph.pruned)} dead-end states pruned)")
    return graph


def build_full_graph(instance: ProblemInstance) -> Ostg:
    """OSTG over every admissible state: BFS seeded by each unvisited state of Cx."""
    errors = validate(instance, need_x0=False)
    if errors:
        raise ValidationError(errors)
    seeds = instance.constraints.states().tolist()
    actions: dict[int, dict[int, list]] = {}
    order: list[int] = []
    stats = {"visited": 0, "actions": 0}
    _explore(instance, seeds, actions, order, stats)
    graph = _finish(instance, actions, order, stats, None, seeds)
    if not graph.vertices:
        raise InfeasibleError("every admissible state is a dead end")
    return graph


def hop_distances(graph: Ostg, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.successors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist
