import itertools
import random

import pytest

from sbcn_opt.logic import LogicalMatrix
from sbcn_opt.mmc import solve_mmc
from sbcn_opt.model import ConstraintSet, ProblemInstance, SbcnModel, TableCost
from sbcn_opt.ostg import InfeasibleError, build_ostg
from sbcn_opt.policy import FeedbackLaw, FreeStateError, certify_average, simulate, synthesize

from conftest import random_instance


def solve(inst):
    g = build_ostg(inst)
    res, _ = solve_mmc(g)
    return g, res, synthesize(g, res)


@pytest.fixture(scope="module")
def ex1(example1):
    return solve(example1)


@pytest.fixture(scope="module")
def tl(tlgl):
    return solve(tlgl)


def test_example1_gains(ex1):
    law = ex1[2]
    assert law.column_list("u") == [1, 2, None, None, 2, None, 2, 2]
    assert law.column_list("sigma") == [1, 1, None, None, 1, None, 1, 2]
    assert law.free_ranges() == [(3, 4), (6, 6)]


def test_tlgl_gains(tl):
    law = tl[2]
    expect = {58834: 6, 59094: 8, 58184: 1, 62126: 8, 60175: 3, 65535: 3}
    assert law.ku == expect
    assert set(law.ksigma.values()) == {1}


def test_single_self_loop_law():
    m = SbcnModel(1, 0, [LogicalMatrix.identity(2)])
    inst = ProblemInstance(m, ConstraintSet.unconstrained(m), TableCost({}, 2.0), 1)
    law = solve(inst)[2]
    assert law.ku == {1: 1}


def test_law_matches_graph_edges(ex1):
    g, res, law = ex1
    walk = res.transient + res.cycle[1:]
    for a, b in zip(walk, walk[1:]):
        assert law.action(a) == g.edge(a, b).action
    assert set(law.domain) == set(res.transient) | set(res.cycle)


def test_simulate_example1(example1, ex1):
    traj = simulate(example1, ex1[2], 8)
    assert traj.states[:8] == [1, 7, 8, 2, 5, 7, 8, 2]


def test_simulate_tlgl(tlgl, tl):
    traj = simulate(tlgl, tl[2], 10)
    assert traj.states[:7] == [58834, 59094, 58184, 62126, 60175, 65535, 65535]
    assert traj.states[5:] == [65535] * 6


def test_simulate_zero_horizon(example1, ex1):
    traj = simulate(example1, ex1[2], 0)
    assert traj.states == [1] and traj.average == 0.0


def test_simulate_refuses_free_state(example1, ex1):
    with pytest.raises(FreeStateError):
        simulate(example1, ex1[2], 3, x0=3)


def test_certify_example1(example1, ex1):
    cert = certify_average(example1, ex1[2], (10, 100, 1000))
    assert cert.ok
    assert abs(cert.rows[-1].average - 3.5) <= 0.05


def test_certify_tlgl(tlgl, tl):
    cert = certify_average(tlgl, tl[2], (100, 10000))
    assert cert.ok
    assert abs(cert.rows[-1].average - 1.0) <= 0.01


def test_zero_cost_network():
    m = SbcnModel(2, 1, [LogicalMatrix(4, [2, 3, 4, 1, 1, 1, 1, 1])])
    inst = ProblemInstance(m, ConstraintSet.unconstrained(m), TableCost({}, 0.0), 1)
    law = solve(inst)[2]
    cert = certify_average(inst, law, (1, 5, 50))
    assert all(r.average == 0.0 == law.mu_star for r in cert.rows)


def test_round_trip_dict(ex1):
    law = ex1[2]
    assert FeedbackLaw.from_dict(law.to_dict()) == law


def test_closed_loop_is_transient_then_cycle():
    rng = random.Random(17)
    done = 0
    while done < 60:
        inst = random_instance(rng)
        try:
            _, res, law = solve(inst)
        except InfeasibleError:
            continue
        T = 5 * (len(res.transient) + len(res.cycle))
        states = simulate(inst, law, T).states
        lap = res.cycle[:-1]
        expect = res.transient[:-1] + [lap[t % len(lap)] for t in range(T + 2 - len(res.transient))]
        assert states == expect[:T + 1]
        K = inst.cost.bound(inst) * (len(res.transient) + len(res.cycle))
        avg = simulate(inst, law, 40 * T).average
        assert abs(avg - res.mu_star) <= K / (40 * T) + 1e-9
        done += 1


def test_no_periodic_policy_beats_optimum():
    """Every action sequence that returns to its start gives a mean >= mu*."""
    rng = random.Random(23)
    done = 0
    while done < 25:
        inst = random_instance(rng, n_max=3, m_max=1, z_max=2)
        try:
            g, res, _ = solve(inst)
        except InfeasibleError:
            continue
        if g.n_vertices > 10:
            continue
        c, model = inst.constraints, inst.model
        period = min(g.n_vertices, 4)
        for x in g.vertices:
            acts = [(k, l) for l in range(1, model.z + 1) for k in range(1, model.M + 1)]
            for L in range(1, period + 1):
                for seq in itertools.product(acts, repeat=L):
                    s, total, ok = x, 0.0, True
                    for k, l in seq:
                        if k not in c.Cu(s) or l not in c.Csigma(s):
                            ok = False
                            break
                        total += inst.cost(s, k, l)
                        s = model.step(s, k, l)
                        if not c.admissible(s):
                            ok = False
                            break
                    if ok and s == x:
                        assert total / L >= res.mu_star - 1e-9
        done += 1
