import random
from importlib import resources

import numpy as np
import pytest

from sbcn_opt.io import load_problem
from sbcn_opt.logic import LogicalMatrix
from sbcn_opt.model import ConstraintSet, ProblemInstance, SbcnModel, TableCost
from sbcn_opt.ostg import Ostg, prune_dead_ends

DATA = resources.files("sbcn_opt") / "data"


def data_path(name: str) -> str:
    return str(DATA / name)


@pytest.fixture(scope="session")
def example1():
    return load_problem(data_path("example1.json"))


@pytest.fixture(scope="session")
def tlgl():
    return load_problem(data_path("tlgl.json"))


def random_model(rng: random.Random, n: int, m: int, z: int) -> SbcnModel:
    N, M = 1 << n, 1 << m
    mats = [LogicalMatrix(N, [rng.randint(1, N) for _ in range(M * N)]) for _ in range(z)]
    return SbcnModel(n, m, mats)


def random_instance(rng: random.Random, n_max=4, m_max=2, z_max=3, constrained=True,
                    integer_costs=False) -> ProblemInstance:
    n, m, z = rng.randint(1, n_max), rng.randint(0, m_max), rng.randint(1, z_max)
    model = random_model(rng, n, m, z)
    N, M = model.N, model.M
    if constrained:
        states = [x for x in range(1, N + 1) if rng.random() < 0.85] or [1]
        inputs = {x: rng.sample(range(1, M + 1), rng.randint(1, M)) for x in states if rng.random() < 0.3}
        subs = {x: rng.sample(range(1, z + 1), rng.randint(1, z)) for x in states if rng.random() < 0.3}
    else:
        states, inputs, subs = None, {}, {}
    cons = ConstraintSet(N, M, z, states, inputs, subs)
    draw = (lambda: float(rng.randint(0, 9))) if integer_costs else (lambda: round(rng.uniform(-10, 10), 3))
    entries = {(x, u, s): draw() for x in range(1, N + 1) for u in range(1, M + 1) for s in range(1, z + 1)}
    x0 = int(rng.choice(cons.states().tolist()))
    return ProblemInstance(model, cons, TableCost(entries), x0)


def random_graph(rng: random.Random, n_max=12, weight=(-10.0, 10.0)) -> Ostg:
    """Random digraph restricted to what vertex 1 reaches, dead ends pruned; may be empty of x0."""
    n = rng.randint(1, n_max)
    edges = []
    for v in range(1, n + 1):
        for w in rng.sample(range(1, n + 1), rng.randint(1, min(4, n))):
            edges.append((v, w, round(rng.uniform(*weight), 6)))
    # drop some edges so dead ends occur
    edges = [e for e in edges if rng.random() < 0.9]
    g = Ostg.from_edges(edges, x0=1)
    seen, stack = {1}, [1]
    while stack:
        for w in g.successors(stack.pop()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    g = g.subgraph(seen, x0=1)
    prune_dead_ends(g)
    return g


def random_pruned_ostg(rng: random.Random, n_max=12) -> Ostg:
    while True:
        g = random_graph(rng, n_max)
        if 1 in g:
            return g


@pytest.fixture
def rng():
    return random.Random(12345)


def np_rng(seed=0):
    return np.random.default_rng(seed)
