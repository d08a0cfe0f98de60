import random

import pytest

from sbcn_opt.logic import LogicalMatrix
from sbcn_opt.model import ConstraintSet, ProblemInstance, SbcnModel, TableCost, quadratic_cost
from sbcn_opt.ostg import (InfeasibleError, Ostg, ValidationError, admissible_actions, build_ostg,
                           hop_distances, optimal_action, prune_dead_ends, successors)

from conftest import random_instance

EXAMPLE1_EDGES = {
    (1, 3): 7, (1, 7): 9, (3, 7): 6, (3, 8): 8, (3, 3): 7, (7, 8): 2, (7, 7): 4, (7, 3): 5,
    (8, 6): 3, (8, 1): 5, (8, 2): 4, (6, 6): 5, (6, 5): 7, (2, 5): 5, (2, 6): 7, (5, 7): 3, (5, 3): 5,
}


def test_successors_example1(example1):
    assert successors(example1, 1) == {7, 3}
    assert 5 in successors(example1, 6)


def test_successors_rejects_excluded(example1):
    with pytest.raises(ValueError):
        successors(example1, 4)


def test_successors_empty_input_set():
    m = SbcnModel(1, 1, [LogicalMatrix(2, [1, 2, 2, 1])])
    c = ConstraintSet(2, 2, 1, inputs={1: []})
    assert successors(ProblemInstance(m, c, TableCost({}), 1), 1) == set()


def test_admissible_actions(example1):
    assert admissible_actions(example1, 6, 5) == {(1, 1), (1, 2)}
    assert admissible_actions(example1, 1, 7) == {(1, 1)}
    assert admissible_actions(example1, 1, 5) == set()


def test_optimal_action_6_to_5(example1):
    # g(6,1,1) = 3+3+1 = 7 < g(6,1,2) = 8, so subsystem 1 wins; w(6,5) = 7 is also
    # what the cycle 3 -> 8 -> 6 -> 5 -> 3 needs for its mean of 5.75
    assert optimal_action(example1, 6, 5) == ((1, 1), 7)


def test_optimal_action_tie_break():
    m = SbcnModel(1, 1, [LogicalMatrix(2, [1, 1, 1, 1])] * 2)
    inst = ProblemInstance(m, ConstraintSet.unconstrained(m), TableCost({}, 3.0), 1)
    assert optimal_action(inst, 2, 1) == ((1, 1), 3.0)


def test_optimal_action_singleton(example1):
    assert optimal_action(example1, 1, 7) == ((1, 1), 9)


def test_optimal_action_empty(example1):
    with pytest.raises(ValueError):
        optimal_action(example1, 1, 5)


def test_build_example1(example1):
    g = build_ostg(example1)
    assert sorted(g.vertices) == [1, 2, 3, 5, 6, 7, 8]
    assert {(e.src, e.dst): e.weight for e in g.edges()} == EXAMPLE1_EDGES
    assert g.pruned == []


def test_build_tlgl_size(tlgl):
    g = build_ostg(tlgl)
    assert g.n_vertices == 468


def test_fixed_point_network():
    m = SbcnModel(2, 0, [LogicalMatrix.identity(4)])
    inst = ProblemInstance(m, ConstraintSet.unconstrained(m), TableCost({}, 1.0), 3)
    g = build_ostg(inst)
    assert g.vertices == [3] and [(e.src, e.dst) for e in g.edges()] == [(3, 3)]


def test_validation_error(example1):
    with pytest.raises(ValidationError, match="initial state excluded"):
        build_ostg(example1.with_x0(4))


def test_dead_end_pruning():
    # 1 -> 2 -> 3 -> (outside Cx); 1 -> 1
    m = SbcnModel(2, 1, [LogicalMatrix(4, [1, 3, 4, 4, 2, 3, 4, 4])])
    c = ConstraintSet(4, 2, 1, [1, 2, 3])
    g = build_ostg(ProblemInstance(m, c, TableCost({}, 1.0), 1))
    assert g.vertices == [1]
    assert sorted(g.pruned) == [2, 3]


def test_infeasible_x0():
    m = SbcnModel(2, 0, [LogicalMatrix(4, [2, 3, 4, 4])])
    c = ConstraintSet(4, 1, 1, [1, 2, 3])
    with pytest.raises(InfeasibleError, match="no infinite admissible trajectory"):
        build_ostg(ProblemInstance(m, c, TableCost({}, 1.0), 1))


def test_prune_chain():
    g = Ostg.from_edges([(1, 2, 1), (2, 3, 1), (1, 1, 1)], x0=1)
    assert prune_dead_ends(g) == [3, 2]
    assert g.vertices == [1]


def _check_graph(inst, g):
    c = inst.constraints
    assert inst.x0 in g
    for v in g.vertices:
        assert c.admissible(v)
        out = g.out_edges(v)
        assert len(out) <= min(inst.model.z * inst.model.M, g.n_vertices)
        assert len({e.dst for e in out}) == len(out)
        succ = {w for w in successors(inst, v) if w in g}
        assert {e.dst for e in out} == succ
        for e in out:
            acts = admissible_actions(inst, v, e.dst)
            assert e.action in acts
            assert e.weight == inst.cost(v, *e.action)
            assert all(e.weight <= inst.cost(v, k, l) for k, l in acts)


def test_random_graph_invariants():
    rng = random.Random(7)
    checked = 0
    while checked < 60:
        inst = random_instance(rng)
        try:
            g = build_ostg(inst)
        except InfeasibleError:
            continue
        _check_graph(inst, g)
        checked += 1


def test_bfs_layer_order():
    rng = random.Random(3)
    for _ in range(40):
        inst = random_instance(rng, constrained=False)
        g = build_ostg(inst)
        dist = hop_distances(g, inst.x0)
        if g.pruned:
            continue
        layers = [dist[v] for v in g.vertices]
        assert layers == sorted(layers)


def test_operation_counts():
    rng = random.Random(5)
    for _ in range(40):
        inst = random_instance(rng)
        try:
            g = build_ostg(inst)
        except InfeasibleError:
            continue
        zM = inst.model.z * inst.model.M
        visited = g.stats["visited"]
        assert visited == g.n_vertices + len(g.pruned)
        assert g.stats["actions"] <= zM * visited


def test_tlgl_operation_counts(tlgl):
    g = build_ostg(tlgl)
    assert g.stats["visited"] == 468
    assert g.stats["actions"] == 8 * 468
