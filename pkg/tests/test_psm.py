import random

import pytest
from sympy import QQ

from src.errors import DimensionError, MinimalityPreconditionError, StateMatrixSingularError
from src.polymat import determinant
from src.psm import (
    Psm, is_minimal_at, is_minimal_at_infinity, is_minimal_in, is_strongly_minimal, make_psm,
    minimality_defect_points, rank_relation_check, structure_at, structure_at_infinity,
    transfer_function,
)
from src.ratmat import ALL, Region, invariant_orders, local_structure
from src.scalars import INFINITY, Point, rational_roots

from .helpers import pm, random_linear_psm, rm


def test_transfer_function_of_grade_example(grade_example_L, grade_example_G):
    assert transfer_function(grade_example_L) == grade_example_G
    assert rank_relation_check(grade_example_L)


def test_rank_relation_on_random_system_matrices():
    rng = random.Random(18)
    for _ in range(30):
        L = random_linear_psm(rng, rng.randint(1, 3), rng.randint(1, 2))
        assert rank_relation_check(L)


def test_degree_of_zero_and_constant_system_matrices():
    assert Psm(pm([[0, 0]])).degree == 0
    assert Psm(pm([[2]])).degree == 0
    assert Psm(pm([["l", 1], [0, 1]]), (0,), (0,)).degree == 1


def test_grade_example_is_strongly_minimal(grade_example_L):
    assert minimality_defect_points(grade_example_L).is_empty()
    assert is_minimal_at_infinity(grade_example_L)
    assert is_strongly_minimal(grade_example_L)


def test_structure_of_grade_example(grade_example_L):
    report = structure_at(grade_example_L, 0)
    assert report.pole_eds.multiplicities == (1,)
    assert report.zero_eds.multiplicities == ()
    assert structure_at_infinity(grade_example_L).orders == (-2, -1)


def test_state_block_need_not_lead():
    # same system with the state moved to the trailing rows and columns
    P = pm([["l + 1", 0, 1, 0], [0, "l - 1", "l", "l"], [1, 1, "l", 0], [0, "l", 0, 1]])
    psm = Psm(P, (2, 3), (2, 3))
    moved = Psm(
        pm([["l", 0, 1, 1], [0, 1, 0, "l"], [1, 0, "l + 1", 0], ["l", "l", 0, "l - 1"]]),
        (0, 1), (0, 1),
    )
    assert psm.state_matrix == moved.state_matrix
    assert transfer_function(psm) == transfer_function(moved)


def test_empty_state_transfer_is_the_matrix():
    P = pm([["l", 1], [0, "l"]])
    assert transfer_function(make_psm(P)) == rm([["l", 1], [0, "l"]])
    assert is_minimal_at(make_psm(P), 0)


def test_singular_state_is_rejected():
    with pytest.raises(StateMatrixSingularError):
        Psm(pm([[0, 1], [1, "l"]]), (0,), (0,))


def test_bad_state_indices_are_rejected():
    with pytest.raises(DimensionError):
        Psm(pm([["l", 1], [1, 1]]), (0,), ())
    with pytest.raises(DimensionError):
        Psm(pm([["l", 1], [1, 1]]), (2,), (0,))
    with pytest.raises(DimensionError):
        Psm(pm([["l", 1], [1, 1]]), (0, 0), (0, 1))


def test_non_minimal_point_is_a_defect():
    psm = Psm(pm([["l", 0], [0, 1]]), (0,), (0,))
    defects = minimality_defect_points(psm)
    assert defects.points == (QQ(0),)
    assert not is_minimal_at(psm, 0)
    assert is_minimal_at(psm, 1)
    assert not is_minimal_in(psm, ALL)
    assert is_minimal_in(psm, Region.excluding([0]))
    with pytest.raises(MinimalityPreconditionError):
        structure_at(psm, 0)


def test_irrational_defects_are_reported_as_factors():
    psm = Psm(pm([["l^2 + 1", 0], [0, 1]]), (0,), (0,))
    defects = minimality_defect_points(psm)
    assert defects.points == ()
    assert len(defects.factors) == 1
    assert not is_minimal_in(psm, ALL)
    assert is_minimal_in(psm, Region.only([0, 1]))


def test_not_minimal_at_infinity():
    # leading coefficient of the state column vanishes
    psm = Psm(pm([[1, "l"], [1, 0]]), (0,), (0,))
    assert not is_minimal_at_infinity(psm)
    with pytest.raises(MinimalityPreconditionError):
        structure_at_infinity(psm)


def test_local_structure_read_from_minimal_system_matrices():
    rng = random.Random(31)
    checked = 0
    while checked < 100:
        psm = random_linear_psm(rng, rng.randint(1, 2), rng.randint(1, 2))
        candidates = {QQ(0), QQ(1)}
        candidates.update(x for x, _ in rational_roots(determinant(psm.state_matrix)))
        candidates.update(x for x, _ in rational_roots(determinant(psm.P)) if determinant(psm.P))
        for x in sorted(candidates):
            if not is_minimal_at(psm, x):
                continue
            report = structure_at(psm, x)
            assert report.to_local_structure() == local_structure(transfer_function(psm), Point(x))
            checked += 1


def test_orders_at_infinity_read_from_minimal_system_matrices():
    rng = random.Random(43)
    checked = 0
    while checked < 100:
        psm = random_linear_psm(rng, rng.randint(1, 2), rng.randint(1, 2))
        if not is_minimal_at_infinity(psm):
            continue
        expected = invariant_orders(transfer_function(psm), INFINITY)
        assert structure_at_infinity(psm) == expected
        checked += 1
