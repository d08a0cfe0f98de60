"""Optimal laws for every admissible initial state by recursive elimination.

The globally cheapest cycle of the remaining graph is optimal for every state
that can reach it. Those states get one shared law (tree edges into the
cycle, then the cycle) and are deleted; the rest keep all their out-edges,
because none of them reaches the deleted set. Strongly connected components
survive elimination whole, so each one's minimum-mean cycle is solved once.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .mmc import TOL, MmcResult, solve_mmc
from .model import ProblemInstance
from .ostg import Ostg, build_full_graph
from .policy import FeedbackLaw, law_from_walk


@dataclass(frozen=True)
class StateSolution:
    mu_star: float
    cycle: tuple[int, ...]
    transient: tuple[int, ...]
    law_id: int


@dataclass
class Iteration:
    law_id: int
    mmc: MmcResult
    component: tuple[int, ...]
    eliminated: tuple[int, ...]


@dataclass
class AllStatesSolution:
    graph: Ostg
    states: dict[int, StateSolution] = field(default_factory=dict)
    laws: dict[int, FeedbackLaw] = field(default_factory=dict)
    iterations: list[Iteration] = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.iterations)

    def law_for(self, x0: int) -> FeedbackLaw:
        return self.laws[self.states[x0].law_id]

    def to_dict(self) -> dict:
        return {
            "iterations": self.K,
            "pruned": sorted(self.graph.pruned),
            "states": {str(x): {"mu_star": s.mu_star, "cycle": list(s.cycle),
                                "transient": list(s.transient), "law_id": s.law_id}
                       for x, s in sorted(self.states.items())},
            "laws": [self.laws[i].to_dict() for i in sorted(self.laws)],
        }


def strong_components(graph: Ostg, vertices: list[int] | None = None) -> list[list[int]]:
    """SCCs as sorted vertex lists, ordered by their smallest vertex."""
    verts = graph.vertices if vertices is None else vertices
    pos = {v: i for i, v in enumerate(verts)}
    rows, cols = [], []
    for v in verts:
        for e in graph.adjacency[v]:
            if e.dst in pos:
                rows.append(pos[v])
                cols.append(pos[e.dst])
    n = len(verts)
    adj = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v, lab in zip(verts, labels):
        groups.setdefault(int(lab), []).append(v)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def _has_cycle(graph: Ostg, comp: list[int]) -> bool:
    if len(comp) > 1:
        return True
    v = comp[0]
    return any(e.dst == v for e in graph.adjacency[v])


def solve_all(instance: ProblemInstance, *, backend: str | None = None,
              graph: Ostg | None = None) -> AllStatesSolution:
    """Optimal average cost, cycle, transient and law for every non-pruned state of ``Cx``."""
    graph = build_full_graph(instance) if graph is None else graph
    sol = AllStatesSolution(graph)
    candidates = []
    for comp in strong_components(graph):
        if _has_cycle(graph, comp):
            sub = graph.subgraph(comp, x0=comp[0])
            res, _ = solve_mmc(sub, backend=backend)
            candidates.append((res, comp))
    rev = graph.reverse()
    alive = set(graph.vertices)
    law_id = 0
    while alive:
        live = [(res, comp) for res, comp in candidates if comp[0] in alive]
        if not live:
            raise RuntimeError("remaining states have no cycle; dead-end pruning failed")
        best_res, best_comp = live[0]
        for res, comp in live[1:]:
            if res.mu_star < best_res.mu_star - TOL:
                best_res, best_comp = res, comp
        law_id += 1
        eliminated = _eliminate(graph, rev, alive, best_res, law_id, sol)
        sol.iterations.append(Iteration(law_id, best_res, tuple(best_comp), tuple(eliminated)))
    return sol


def _eliminate(graph: Ostg, rev, alive: set[int], res: MmcResult, law_id: int,
               sol: AllStatesSolution) -> list[int]:
    cycle = list(res.cycle)
    on_cycle = {v: t for t, v in enumerate(cycle[:-1])}
    nxt: dict[int, int] = {}
    order = list(cycle[:-1])
    queue = deque(order)
    seen = set(order)
    while queue:
        v = queue.popleft()
        for e in sorted(rev[v], key=lambda e: e.src):
            u = e.src
            if u in alive and u not in seen:
                seen.add(u)
                nxt[u] = v
                order.append(u)
                queue.append(u)
    ku, ksigma = {}, {}
    for a, b in zip(cycle, cycle[1:]):
        ku[a], ksigma[a] = graph.edge(a, b).action
    for a, b in nxt.items():
        ku[a], ksigma[a] = graph.edge(a, b).action
    law = FeedbackLaw(ku, ksigma, graph.N or max(graph.vertices), res.mu_star,
                      tuple(cycle), (), law_id)
    sol.laws[law_id] = law
    for x in order:
        path = [x]
        while path[-1] not in on_cycle:
            path.append(nxt[path[-1]])
        t = on_cycle[path[-1]]
        lap = cycle[t:-1] + cycle[:t] + [cycle[t]]
        sol.states[x] = StateSolution(res.mu_star, tuple(lap), tuple(path), law_id)
    alive.difference_update(order)
    return sorted(order)


def per_state_law(sol: AllStatesSolution, x0: int) -> FeedbackLaw:
    """The shared law of ``x0``'s iteration narrowed to ``x0``'s own walk."""
    s = sol.states[x0]
    walk = list(s.transient) + list(s.cycle[1:])
    return law_from_walk(sol.graph, walk, s.cycle, s.transient, s.mu_star, s.law_id)
