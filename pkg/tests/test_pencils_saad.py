import pytest

from src.errors import DimensionError, ParameterError
from src.linearize import LinearizationClaim, is_linearization_in
from src.pencils import SaadParams, saad_build, saad_certificate, saad_minimality
from src.polymat import PolyMatrix
from src.psm import Psm, is_minimal_at, is_minimal_in, transfer_function
from src.ratmat import ALL, Region, eigenvalues

from .helpers import eigen_set, pm, rm


def test_scalar_pencil_represents_target(saad_scalar):
    built = saad_build(saad_scalar)
    assert built.G == rm([["l + 1/l"]])
    assert built.pencil == pm([["l", 1], [-1, "l"]])
    assert all(built.identities().values())


def test_two_by_two_identities(saad_2x2):
    built = saad_build(saad_2x2)
    expected = rm([
        ["l - 1 + 1/(l - 1) + 2/(l + 1)", "1/(l - 1)"],
        [0, "l - 2 + 1/(l - 1) + 1/(l + 1)"],
    ])
    assert built.G == expected
    assert transfer_function(built.psm) == expected
    assert all(built.identities().values())


def test_without_poles_the_pencil_is_the_head():
    params = SaadParams(PolyMatrix.identity(2), pm([[0, 1], [1, 0]]))
    built = saad_build(params)
    assert built.pencil == pm([["l", -1], [-1, "l"]])
    assert built.psm.n == 0
    assert saad_minimality(params).verdict.holds


def test_minimal_iff_residues_nonsingular(saad_2x2):
    report = saad_minimality(saad_2x2)
    assert report.verdict.holds and report.verdict.region == ALL
    assert [c.passes for c in report.checks] == [True, True]
    assert is_minimal_in(saad_build(saad_2x2).psm, ALL)


def test_singular_residue_breaks_minimality_at_its_pole():
    params = SaadParams(PolyMatrix.identity(2), pm([[0, 0], [0, 0]]), (pm([[1, 1], [1, 1]]),), (0,))
    report = saad_minimality(params)
    assert not report.verdict.holds
    assert "sigma_1 = 0" in report.verdict.witness
    psm = saad_build(params).psm
    assert not is_minimal_at(psm, 0)
    assert is_minimal_at(psm, 1)
    assert not is_minimal_in(psm, ALL)


def test_pencil_eigenvalues_match_target_away_from_poles(saad_2x2):
    built = saad_build(saad_2x2)
    region = Region.excluding([1, -1])
    assert eigen_set(eigenvalues(built.pencil, region)) == eigen_set(eigenvalues(built.G, region))


def test_certificate(saad_scalar, saad_2x2):
    cert = saad_certificate(saad_scalar)
    assert cert.target == rm([["l + 1/l"]])
    assert cert.region == Region.excluding([0])
    assert cert.infinity.holds and cert.infinity.grade == 1
    assert cert.minimality.verdict.holds

    cert = saad_certificate(saad_2x2)
    assert cert.region == Region.excluding([1, -1])
    assert cert.infinity.holds and cert.infinity.grade == 1


def test_block_full_rank_view_is_a_linearization_in_the_region(saad_scalar, saad_2x2):
    for params in (saad_scalar, saad_2x2):
        built = saad_build(params)
        cert = saad_certificate(params)
        claim = LinearizationClaim.build(Psm(built.fullrank_view.pencil), cert.target)
        assert is_linearization_in(claim, cert.region)


def test_parameter_checks():
    I = PolyMatrix.identity(1)
    with pytest.raises(DimensionError):
        SaadParams(I, I, (I,), (0, 1))
    with pytest.raises(ParameterError):
        SaadParams(I, I, (I, I), (1, 1))
    with pytest.raises(ParameterError):
        SaadParams(pm([["l"]]), I)
    with pytest.raises(DimensionError):
        SaadParams(I, PolyMatrix.identity(2))
