"""
Shared fixtures: a worked 2x2 rational matrix with its 4x4 linear system
matrix, and small parameter sets for each pencil family.
"""

import pytest

from src.pencils import NleigsBasic, NleigsLowRank, NleigsParams, SaadParams, SuBaiParams
from src.polymat import PolyMatrix
from src.psm import Psm

from .helpers import pm, rm


@pytest.fixture
def grade_example_G():
    return rm([["(l^2 + l - 1)/l", "-1/l"], [-1, "-l^2 + l - 2"]])


@pytest.fixture
def grade_example_L():
    P = pm([
        ["l", 0, 1, 1],
        [0, 1, 0, "l"],
        [1, 0, "l + 1", 0],
        ["l", "l", 0, "l - 1"],
    ])
    return Psm(P, (0, 1), (0, 1))


@pytest.fixture
def saad_scalar():
    """G = l + 1/l."""
    return SaadParams(pm([[1]]), pm([[0]]), (pm([[1]]),), (0,))


@pytest.fixture
def saad_2x2():
    return SaadParams(
        PolyMatrix.identity(2),
        pm([[1, 0], [0, 2]]),
        (pm([[1, 1], [0, 1]]), pm([[2, 0], [0, 1]])),
        (1, -1),
    )


@pytest.fixture
def subai_scalar():
    """G = l^2 + 1 + 1/(l - 2)."""
    return SuBaiParams((pm([[1]]), pm([[0]]), pm([[1]])), pm([[2]]), pm([[1]]), pm([[1]]))


@pytest.fixture
def nleigs_basic():
    params = NleigsParams((0, 1), (2, "inf"), (1, 1, 1))
    return NleigsBasic(params, (pm([[1]]), pm([[2]]), pm([[3]])))


@pytest.fixture
def nleigs_lowrank():
    params = NleigsParams((0, 1, -1), (2, 3, "inf"), (1, 1, 1, 1))
    return NleigsLowRank(
        params,
        (pm([[1, 0], [0, 1]]), pm([[2, 1], [0, 1]])),
        (pm([[1], [0]]), pm([[1], [2]])),
        pm([[1], [1]]),
        1,
    )
