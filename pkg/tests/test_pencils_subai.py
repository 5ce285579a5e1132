import pytest

from src.errors import DimensionError, ParameterError
from src.linearize import LinearizationClaim, is_linearization_in
from src.pencils import (
    SuBaiParams, subai_build, subai_certificate, subai_inverse_last_columns,
    subai_minimal_at_infinity,
)
from src.polymat import PolyMatrix
from src.psm import Psm, is_minimal_at_infinity, transfer_function
from src.ratmat import RatMatrix, Region

from .helpers import pm, rm


def _cubic():
    """G = l^3 + 1 + 1/(l - 2)."""
    return SuBaiParams((pm([[1]]), pm([[0]]), pm([[0]]), pm([[1]])), pm([[2]]), pm([[1]]), pm([[1]]))


def _singular_leading():
    return SuBaiParams(
        (PolyMatrix.identity(2), pm([[0, 0], [0, 0]]), pm([[1, 0], [0, 0]])),
        pm([[2]]),
        pm([[1, 0]]),
        pm([[1], [0]]),
    )


def test_scalar_pencil(subai_scalar):
    built = subai_build(subai_scalar)
    assert built.G == rm([["l^2 + 1 + 1/(l - 2)"]])
    assert built.pencil == pm([["l", 1, -1], [-1, "l", 0], [0, 1, "l - 2"]])
    assert built.psm_full_state.state_matrix == pm([[-1, 0], [0, "l - 2"]])
    assert built.psm_pencil_state.state_matrix == pm([["l - 2"]])
    assert all(built.identities().values())


def test_identities_for_larger_instances():
    for params in (_cubic(), _singular_leading()):
        built = subai_build(params)
        assert all(built.identities().values())
        assert transfer_function(built.psm_full_state) == built.G


def test_inverse_last_columns():
    params = _cubic()
    assert subai_inverse_last_columns(params) == rm([["-l", 0], [-1, 0], [0, "1/(l - 2)"]])
    state = subai_build(params).psm_full_state.state_matrix
    inverse = RatMatrix.from_poly(state).inverse()
    size = state.rows
    assert inverse.submatrix(tuple(range(size)), (1, 2)) == subai_inverse_last_columns(params)


def test_minimal_at_infinity_follows_leading_coefficient(subai_scalar):
    assert subai_minimal_at_infinity(subai_scalar)
    assert is_minimal_at_infinity(subai_build(subai_scalar).psm_full_state)

    params = _singular_leading()
    assert not subai_minimal_at_infinity(params)
    assert not is_minimal_at_infinity(subai_build(params).psm_full_state)
    report = subai_certificate(params).minimality
    assert not report.verdict.holds
    assert "D_q" in report.verdict.witness


def test_certificate(subai_scalar):
    cert = subai_certificate(subai_scalar)
    assert cert.target == rm([["l^2 + 1 + 1/(l - 2)"]])
    assert cert.region == Region.excluding([2])
    assert cert.infinity.holds and cert.infinity.grade == 2
    assert cert.minimality.verdict.holds


def test_grade_is_the_degree_of_the_polynomial_part():
    for params in (_cubic(), _singular_leading()):
        cert = subai_certificate(params)
        assert cert.infinity.holds
        assert cert.infinity.grade == params.q


def test_block_full_rank_view_is_a_linearization_in_the_region(subai_scalar):
    for params in (subai_scalar, _cubic()):
        built = subai_build(params)
        cert = subai_certificate(params)
        claim = LinearizationClaim.build(Psm(built.fullrank_view.pencil), cert.target)
        assert is_linearization_in(claim, cert.region)


def test_parameter_checks():
    one = pm([[1]])
    with pytest.raises(ParameterError):
        SuBaiParams((one, one), one, one, one)
    with pytest.raises(ParameterError):
        SuBaiParams((one, one, pm([[0]])), one, one, one)
    with pytest.raises(DimensionError):
        SuBaiParams((one, one, one), one, pm([[1, 0]]), one)
    with pytest.raises(ParameterError):
        SuBaiParams((one, one, one), pm([["l"]]), one, one)
