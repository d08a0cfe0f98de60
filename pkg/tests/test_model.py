import random

import pytest
from hypothesis import given, settings, strategies as st

from sbcn_opt.logic import LogicalMatrix
from sbcn_opt.model import (ConstraintSet, ProblemInstance, SbcnModel, augment_instance, quadratic_cost,
                            to_augmented_bcn, validate)

from conftest import random_model


def test_step_example1(example1):
    m = example1.model
    assert m.step(1, 1, 1) == 7
    assert m.step(1, 2, 1) == 3


def test_step_identity_network():
    m = SbcnModel(2, 1, [LogicalMatrix(4, list(range(1, 5)) * 2)] * 2)
    assert all(m.step(x, u, s) == x for x in range(1, 5) for u in (1, 2) for s in (1, 2))


def test_step_range_checks(example1):
    for args in [(0, 1, 1), (9, 1, 1), (1, 3, 1), (1, 1, 3)]:
        with pytest.raises(IndexError):
            example1.model.step(*args)


def test_step_ignores_constraints(example1):
    # state 4 is excluded from Cx but the raw dynamics are still defined there
    assert 1 <= example1.model.step(4, 1, 2) <= 8


def test_shape_checked():
    with pytest.raises(ValueError):
        SbcnModel(2, 1, [LogicalMatrix(4, [1, 2, 3, 4])])


def test_augmentation_example1(example1):
    m = example1.model
    aug = to_augmented_bcn(m)
    assert (aug.z, aug.M) == (1, 4)
    assert aug.L[0].cols == m.z * m.M * m.N
    for x in range(1, 9):
        for u in (1, 2):
            for s in (1, 2):
                assert aug.step(x, (s - 1) * m.M + u, 1) == m.step(x, u, s)


def test_augmentation_of_bcn_is_identity(rng):
    m = random_model(rng, 3, 1, 1)
    assert to_augmented_bcn(m) is m


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_augmentation_round_trip(n, m, z, seed):
    model = random_model(random.Random(seed), n, m, z)
    aug = to_augmented_bcn(model)
    for x in range(1, model.N + 1):
        for u in range(1, model.M + 1):
            for s in range(1, model.z + 1):
                assert aug.step(x, (s - 1) * model.M + u, 1) == model.step(x, u, s)


def test_augmented_instance_keeps_constraints_and_costs(example1):
    aug = augment_instance(example1)
    M = example1.model.M
    c, ca = example1.constraints, aug.constraints
    for x in c.states():
        x = int(x)
        expect = sorted((s - 1) * M + u for s in c.Csigma(x) for u in c.Cu(x))
        assert list(ca.Cu(x)) == expect
        for ub in expect:
            s, u = divmod(ub - 1, M)
            assert aug.cost(x, ub, 1) == example1.cost(x, u + 1, s + 1)
    assert not ca.admissible(4)


def test_validate_example1(example1):
    assert validate(example1) == []


def test_validate_x0_excluded(example1):
    errs = validate(example1.with_x0(4))
    assert any("initial state excluded" in e for e in errs)


def test_validate_bad_subsystem(example1):
    m = example1.model
    bad = ConstraintSet(m.N, m.M, m.z, [1, 2, 3], subsystems={1: [3]})
    errs = validate(ProblemInstance(m, bad, example1.cost, 1))
    assert any("subsystem" in e and "[3]" in e for e in errs)


def test_validate_reports_every_violation(example1):
    m = example1.model
    bad = ConstraintSet(m.N, m.M, m.z, [1, 2, 99], inputs={5: [1]}, subsystems={1: [3]})
    errs = validate(ProblemInstance(m, bad, quadratic_cost([1], [1], [1]), None))
    assert len(errs) >= 5


def test_quadratic_cost_values(example1):
    g = example1.cost
    assert g(6, 1, 2) == 8
    assert g(6, 1, 1) == 7


def test_quadratic_cost_zero():
    g = quadratic_cost([0] * 4, [0, 0], [0])
    assert all(g(x, u, 1) == 0 for x in range(1, 5) for u in (1, 2))


def test_quadratic_cost_length_check(example1):
    with pytest.raises(ValueError):
        quadratic_cost([1, 2], [1, 1], [1, 1], example1.model)


def test_constraint_defaults():
    c = ConstraintSet(8, 2, 2, [1, 2], inputs={1: [2]})
    assert c.Cu(1) == (2,)
    assert c.Cu(2) == (1, 2)
    assert c.Csigma(2) == (1, 2)
    assert c.states().tolist() == [1, 2]
    assert not c.admissible(3) and not c.admissible(0) and not c.admissible(9)
