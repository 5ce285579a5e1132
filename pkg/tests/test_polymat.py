import random

import pytest

from src.errors import DimensionError
from src.polymat import (
    PolyMatrix, block_diag, determinant, elementary_divisors, hstack, is_minimal_basis,
    is_unimodular, local_elementary_divisors, normal_rank, rank_at, reversal, smith_form,
    smith_via_minors, vstack,
)
from src.scalars import LAMBDA, RING, ZERO_DEGREE, linear_factor

from .helpers import pm, random_polymatrix


def test_smith_of_jordan_block():
    P = pm([["l", 1], [0, "l"]])
    form = smith_form(P)
    assert form.invariant_polys == (RING.one, LAMBDA ** 2)
    assert smith_via_minors(P) == form


def test_smith_of_rank_deficient_matrix():
    P = pm([["l", "l^2"], [1, "l"]])
    form = smith_form(P)
    assert form.rank == 1
    assert form.invariant_polys == (RING.one,)


def test_smith_transforms_diagonalize():
    P = pm([["l - 1", "l", 0], [1, "l^2", "l + 2"]])
    form = smith_form(P, with_transforms=True)
    assert form.U @ P @ form.V == form.diagonal()
    assert is_unimodular(form.U) and is_unimodular(form.V)
    assert form.U @ form.U_inv == PolyMatrix.identity(2)
    assert form.V @ form.V_inv == PolyMatrix.identity(3)


def test_smith_of_zero_matrix():
    assert smith_form(PolyMatrix.zeros(2, 3)).invariant_polys == ()
    zero = PolyMatrix.zeros(2, 3)
    assert zero.degree() is ZERO_DEGREE
    assert zero.row_degrees() == [ZERO_DEGREE, ZERO_DEGREE]
    assert reversal(zero, 0) == zero
    assert pm([[0, "l"]]).row_degrees() == [1]


def test_smith_matches_minors_on_random_matrices():
    rng = random.Random(20240611)
    for _ in range(200):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        P = random_polymatrix(rng, rows, cols, rng.randint(0, 3))
        assert smith_form(P).invariant_polys == smith_via_minors(P).invariant_polys


def test_smith_matches_minors_on_five_by_five():
    rng = random.Random(5)
    for _ in range(4):
        P = random_polymatrix(rng, 5, 5, 4, bound=2)
        assert smith_form(P).invariant_polys == smith_via_minors(P).invariant_polys


def test_local_elementary_divisors_of_state_pencil():
    A = pm([["l", 0], [0, 1]])
    assert local_elementary_divisors(A, 0).multiplicities == (1,)
    assert local_elementary_divisors(A, 1).multiplicities == ()


def test_elementary_divisors_grouped_by_factor():
    P = block_diag(pm([["(l - 1)^2"]]), pm([["l - 1"]]), pm([["l^2 + 1"]]))
    divisors = elementary_divisors(P)
    assert divisors[linear_factor(1)] == (1, 2)
    assert divisors[LAMBDA ** 2 + 1] == (1,)


def test_ranks():
    P = pm([["l", 1], [0, "l"]])
    assert normal_rank(P) == 2
    assert rank_at(P, 0) == 1
    assert determinant(P) == LAMBDA ** 2


def test_minimal_basis_test():
    assert is_minimal_basis(pm([[1, "l"]]))
    assert not is_minimal_basis(pm([["l", "l^2"]]))
    # full rank everywhere but the leading row coefficients are dependent
    assert not is_minimal_basis(pm([["l", "l + 1", 0], ["l", "l", 1]]))
    with pytest.raises(DimensionError):
        is_minimal_basis(pm([[1, 0], [0, 1]]))


def test_reversal():
    P = pm([["l + 2", 1]])
    assert reversal(P, 1) == pm([["2*l + 1", "l"]])
    assert reversal(P, 2) == pm([["2*l^2 + l", "l^2"]])


def test_block_assembly_checks_shapes():
    assert hstack(pm([[1]]), pm([[2, 3]])) == pm([[1, 2, 3]])
    assert vstack(pm([[1, 2]]), pm([[3, 4]])) == pm([[1, 2], [3, 4]])
    with pytest.raises(DimensionError):
        hstack(pm([[1]]), pm([[1], [2]]))
