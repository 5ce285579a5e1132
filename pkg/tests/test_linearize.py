import random
from dataclasses import FrozenInstanceError

import pytest

from src.errors import DegreeError, DimensionError, MinimalityPreconditionError
from src.linearize import (
    LinearizationClaim, StrongKind, classify_vs_strong, is_g_strong, is_linearization_at,
    is_linearization_at_infinity, is_linearization_in, recover_infinite_orders,
)
from src.psm import Psm, transfer_function
from src.ratmat import ALL, Region

from .helpers import pm, random_linear_psm, rm


def test_grade_example_is_a_linearization_everywhere(grade_example_L, grade_example_G):
    claim = LinearizationClaim.build(grade_example_L, grade_example_G)
    assert (claim.s1, claim.s2) == (0, 0)
    verdict = is_linearization_in(claim, ALL)
    assert verdict.holds
    assert verdict.region == ALL
    assert is_linearization_at(claim, 0).holds


def test_grade_example_at_infinity(grade_example_L, grade_example_G):
    claim = LinearizationClaim.build(grade_example_L, grade_example_G)
    verdict = is_linearization_at_infinity(claim, 1)
    assert verdict.holds and verdict.grade == 1
    wrong = is_linearization_at_infinity(claim, 2)
    assert not wrong.holds
    assert wrong.grade == 2
    assert wrong.witness


def test_grade_example_is_one_strong(grade_example_L, grade_example_G):
    claim = LinearizationClaim.build(grade_example_L, grade_example_G)
    assert is_g_strong(claim, 1).holds


def test_infinite_orders_recovered_from_grade_one(grade_example_L):
    assert recover_infinite_orders(grade_example_L, 1).orders == (-2, -1)


def test_recovery_needs_minimality_at_infinity():
    psm = Psm(pm([[1, "l"], [1, 0]]), (0,), (0,))
    with pytest.raises(MinimalityPreconditionError):
        recover_infinite_orders(psm, 1)


def test_wrong_pole_is_reported_not_raised(grade_example_L):
    G = rm([["(l^2 + l - 1)/l + 1/(l - 1)", "-1/l"], [-1, "-l^2 + l - 2"]])
    claim = LinearizationClaim.build(grade_example_L, G)
    verdict = is_linearization_at(claim, 1)
    assert not verdict.holds
    assert "pole" in verdict.witness
    assert verdict.region == Region.only([1])
    assert not is_linearization_in(claim, ALL).holds
    assert is_linearization_in(claim, Region.only([2])).holds


def test_non_minimal_pencil_is_not_a_linearization_there():
    psm = Psm(pm([["l", 0], [0, 1]]), (0,), (0,))
    claim = LinearizationClaim.build(psm, rm([[1]]))
    assert not is_linearization_at(claim, 0).holds
    assert is_linearization_in(claim, Region.excluding([0])).holds


def test_claims_need_a_pencil():
    with pytest.raises(DegreeError):
        LinearizationClaim.build(Psm(pm([["l^2"]])), rm([["l^2"]]))


def test_claims_need_matching_excess():
    with pytest.raises(DimensionError):
        LinearizationClaim.build(Psm(pm([["l", 1]])), rm([[1], [2]]))


def test_identity_padding_for_companion_pencil():
    L = Psm(pm([["l", 1], [-1, "l"]]))
    claim = LinearizationClaim.build(L, rm([["l^2 + 1"]]))
    assert (claim.s1, claim.s2) == (1, 0)
    assert is_linearization_in(claim, ALL).holds


def test_classify_empty_state_companion_is_grade_of_polynomial():
    L = Psm(pm([["l", 1], [-1, "l"]]))
    G = rm([["l^2 + 1"]])
    comparison = classify_vs_strong(L, G)
    assert comparison.kind is StrongKind.GG_STRONG
    assert comparison.grade == 2
    assert is_g_strong(LinearizationClaim.build(L, G), 2).holds


def test_classify_strong_pencil_with_state_and_nonzero_leading_transfer():
    # A = l, B = l + 1, C = l + 1, D = 1: D1 = 0 but C1 A1^{-1} B1 = 1
    L = Psm(pm([["l", "l + 1"], ["-l - 1", 1]]), (0,), (0,))
    G = rm([["(l^2 + 3*l + 1)/l"]])
    assert transfer_function(L) == G
    comparison = classify_vs_strong(L, G)
    assert comparison.kind is StrongKind.GG_STRONG
    assert comparison.grade == 1
    claim = LinearizationClaim.build(L, G)
    assert is_g_strong(claim, 1).holds


def test_classified_grades_are_confirmed_on_random_pencils():
    rng = random.Random(150)
    seen = set()
    for _ in range(60):
        L = random_linear_psm(rng, rng.randint(1, 2), rng.randint(1, 2))
        G = transfer_function(L)
        comparison = classify_vs_strong(L, G)
        seen.add(comparison.kind)
        if comparison.grade is not None:
            assert is_g_strong(LinearizationClaim.build(L, G), comparison.grade).holds
    assert StrongKind.GG_STRONG in seen


def test_verdicts_are_immutable():
    verdict = is_linearization_in(LinearizationClaim.build(Psm(pm([["l"]])), rm([["l"]])), ALL)
    with pytest.raises(FrozenInstanceError):
        verdict.holds = False
    comparison = classify_vs_strong(Psm(pm([["l"]])), rm([["l"]]))
    with pytest.raises(FrozenInstanceError):
        comparison.grade = 7


def test_classify_vanishing_leading_transfer_gives_next_grade():
    # l - 0 state, constant polynomial part: G = 1 + 1/l
    L = Psm(pm([["l", 1], [-1, 1]]), (0,), (0,))
    G = rm([["(l + 1)/l"]])
    comparison = classify_vs_strong(L, G)
    assert comparison.kind is StrongKind.GG_PLUS_1_STRONG
    assert comparison.grade == 1
    assert is_g_strong(LinearizationClaim.build(L, G), 1).holds


def test_classify_vanishing_leading_transfer_with_padding_is_never_g_strong():
    L = Psm(pm([["l", 1, 0], [-1, 1, 0], [0, 0, 1]]), (0,), (0,))
    G = rm([["(l + 1)/l"]])
    comparison = classify_vs_strong(L, G)
    assert comparison.kind is StrongKind.NOT_G_STRONG_ANY_G
    assert comparison.grade is None
    claim = LinearizationClaim.build(L, G)
    assert is_linearization_in(claim, ALL).holds
    for g in range(-3, 4):
        assert not is_g_strong(claim, g).holds


def test_classify_singular_leading_state_is_not_applicable(grade_example_L, grade_example_G):
    comparison = classify_vs_strong(grade_example_L, grade_example_G)
    assert comparison.kind is StrongKind.NOT_APPLICABLE
    assert "singular" in comparison.witness
