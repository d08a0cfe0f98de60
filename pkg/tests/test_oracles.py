import itertools
import random

import pytest

from sbcn_opt.mmc import solve_mmc
from sbcn_opt.oracles import (brute_min_mean, canonical, enumerate_cycles_by_walks, enumerate_simple_cycles)
from sbcn_opt.ostg import Ostg, build_ostg

from conftest import random_graph, random_pruned_ostg


def test_example1_cycles(example1):
    g = build_ostg(example1)
    means = {c.vertices: c.mean for c in enumerate_simple_cycles(g)}
    assert means[(2, 5, 7, 8, 2)] == 3.5
    assert means[(3, 3)] == 7
    assert means[(3, 8, 6, 5, 3)] == 5.75
    assert brute_min_mean(g) == (3.5, (2, 5, 7, 8, 2))


def test_acyclic():
    g = Ostg.from_edges([(1, 2, 1), (2, 3, 1)], x0=1)
    assert enumerate_simple_cycles(g) == []
    with pytest.raises(ValueError):
        brute_min_mean(g)


def test_complete_graph_on_three():
    edges = [(a, b, 1.0) for a, b in itertools.permutations([1, 2, 3], 2)]
    g = Ostg.from_edges(edges, x0=1)
    cycles = enumerate_simple_cycles(g)
    # three 2-cycles and two directed triangles
    assert len(cycles) == 5
    assert {c.vertices for c in cycles} == enumerate_cycles_by_walks(g)


def test_self_loop():
    g = Ostg.from_edges([(1, 1, 2.5)], x0=1)
    assert brute_min_mean(g) == (2.5, (1, 1))


def test_size_guard():
    g = Ostg.from_edges([(i, i % 17 + 1, 1.0) for i in range(1, 18)], x0=1)
    with pytest.raises(ValueError):
        enumerate_simple_cycles(g)


def test_canonical_rotation():
    assert canonical((5, 2, 7, 5)) == (2, 7, 5, 2)


def test_cycles_are_simple_and_unique():
    rng = random.Random(2)
    for _ in range(100):
        g = random_graph(rng, 8)
        cycles = enumerate_simple_cycles(g)
        keys = [c.vertices for c in cycles]
        assert len(keys) == len(set(keys))
        for c in keys:
            assert c == canonical(c)
            assert len(set(c[:-1])) == len(c) - 1


def test_two_enumerations_agree():
    rng = random.Random(4)
    for _ in range(150):
        g = random_graph(rng, 8)
        assert {c.vertices for c in enumerate_simple_cycles(g)} == enumerate_cycles_by_walks(g)


def test_karp_matches_brute_force():
    rng = random.Random(99)
    for _ in range(100):
        g = random_pruned_ostg(rng)
        mu, witness = brute_min_mean(g)
        res, _ = solve_mmc(g)
        assert res.mu_star == pytest.approx(mu, abs=1e-9)
        assert g.path_weight(witness) / (len(witness) - 1) == pytest.approx(mu, abs=1e-12)
