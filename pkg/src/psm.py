"""
Polynomial System Matrices

A polynomial matrix P with a designated nonsingular state submatrix A
(any rows and columns, not necessarily the leading block). The matrix it
represents is the Schur complement D + C A^{-1} B.

Features:
- Validated construction with arbitrary state index lists
- Transfer function by exact fraction-free solve
- Minimality at a point, in a region, at infinity, and strong minimality
- Finite defect set of non-minimal points (rational points plus symbolic factors)
- Pole/zero structure recovery at a point and at infinity
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from sympy import QQ

from .errors import DimensionError, MinimalityPreconditionError, StateMatrixSingularError
from .polymat import (
    ElementaryDivisors, PolyMatrix, determinant, local_elementary_divisors,
    normal_rank, rank_at, reversal, smith_form,
)
from .ratmat import (
    InvariantOrders, LocalStructure, RatMatrix, Region, normal_rank as rat_normal_rank, poly_solve,
)
from .scalars import INFINITY, Point, Poly, Rat, Scalar, irreducible_factors, rat_to_str, to_rat

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Psm:
    """
    Polynomial system matrix.

    Blocks are taken by complement of the state indices:
    A = P[state_rows, state_cols], B = P[state_rows, other_cols],
    C = -P[other_rows, state_cols], D = P[other_rows, other_cols].
    """
    P: PolyMatrix
    state_rows: Tuple[int, ...] = ()
    state_cols: Tuple[int, ...] = ()

    def __post_init__(self):
        rows, cols = self.P.shape
        if len(self.state_rows) != len(self.state_cols):
            raise DimensionError(
                f"state index lists differ in length: {len(self.state_rows)} rows, {len(self.state_cols)} cols"
            )
        for name, indices, bound in (("row", self.state_rows, rows), ("column", self.state_cols, cols)):
            if len(set(indices)) != len(indices):
                raise DimensionError(f"repeated state {name} index in {list(indices)}")
            if any(i < 0 or i >= bound for i in indices):
                raise DimensionError(f"state {name} index out of range 0..{bound - 1}: {list(indices)}")
        if self.n > 0 and not determinant(self.state_matrix):
            raise StateMatrixSingularError()

    @property
    def n(self) -> int:
        return len(self.state_rows)

    @property
    def other_rows(self) -> Tuple[int, ...]:
        chosen = set(self.state_rows)
        return tuple(i for i in range(self.P.rows) if i not in chosen)

    @property
    def other_cols(self) -> Tuple[int, ...]:
        chosen = set(self.state_cols)
        return tuple(j for j in range(self.P.cols) if j not in chosen)

    @property
    def state_matrix(self) -> PolyMatrix:
        return self.P.submatrix(self.state_rows, self.state_cols)

    @property
    def input_matrix(self) -> PolyMatrix:
        return self.P.submatrix(self.state_rows, self.other_cols)

    @property
    def output_matrix(self) -> PolyMatrix:
        return -self.P.submatrix(self.other_rows, self.state_cols)

    @property
    def feedthrough(self) -> PolyMatrix:
        return self.P.submatrix(self.other_rows, self.other_cols)

    @property
    def column_block(self) -> PolyMatrix:
        """P restricted to the state columns, i.e. [A; -C] up to row order."""
        return self.P.submatrix(tuple(range(self.P.rows)), self.state_cols)

    @property
    def row_block(self) -> PolyMatrix:
        """P restricted to the state rows, i.e. [A B] up to column order."""
        return self.P.submatrix(self.state_rows, tuple(range(self.P.cols)))

    @property
    def degree(self) -> int:
        # the zero system matrix is read as a constant
        return 0 if self.P.is_zero() else self.P.degree()

    @property
    def transfer_shape(self) -> Tuple[int, int]:
        return (self.P.rows - self.n, self.P.cols - self.n)

    def reversal(self, g: Optional[int] = None) -> "Psm":
        """Same state placement on l^g P(1/l); g >= deg P."""
        g = self.degree if g is None else g
        return Psm(reversal(self.P, g), self.state_rows, self.state_cols)


def make_psm(P: PolyMatrix, state_rows: Sequence[int] = (), state_cols: Sequence[int] = ()) -> Psm:
    """
    Validated polynomial system matrix.

    Args:
        P: The full polynomial matrix
        state_rows: 0-based rows of the state block (may be empty)
        state_cols: 0-based columns of the state block, same length

    Raises:
        DimensionError: bad index lists
        StateMatrixSingularError: the state block has zero determinant
    """
    return Psm(P, tuple(state_rows), tuple(state_cols))


def transfer_function(psm: Psm) -> RatMatrix:
    """D + C A^{-1} B; D when the state is empty."""
    D = RatMatrix.from_poly(psm.feedthrough)
    if psm.n == 0:
        return D
    X = poly_solve(psm.state_matrix, psm.input_matrix)
    return D + RatMatrix.from_poly(psm.output_matrix) @ X


def rank_relation_check(psm: Psm) -> bool:
    """normal rank of P equals n plus the normal rank of the transfer function."""
    return normal_rank(psm.P) == psm.n + rat_normal_rank(transfer_function(psm))


def is_minimal_at(psm: Psm, x: Scalar) -> bool:
    if psm.n == 0:
        return True
    x = to_rat(x)
    return rank_at(psm.column_block, x) == psm.n and rank_at(psm.row_block, x) == psm.n


@dataclass(frozen=True)
class DefectSet:
    """Points where minimality fails: rational ones, and irreducible factors for the rest."""
    points: Tuple[Rat, ...] = ()
    factors: Tuple[Poly, ...] = ()

    def is_empty(self) -> bool:
        return not self.points and not self.factors

    def region(self) -> Region:
        return Region.only(self.points)

    def __str__(self) -> str:
        return "{" + ", ".join(rat_to_str(p) for p in self.points) + "}"


def minimality_defect_points(psm: Psm) -> DefectSet:
    """Roots of the last invariant polynomials of [A; -C] and [A B]."""
    if psm.n == 0:
        return DefectSet()
    product = smith_form(psm.column_block).last() * smith_form(psm.row_block).last()
    points = []
    factors = []
    for factor, _ in irreducible_factors(product):
        if factor.degree() == 1:
            points.append(-factor.get((0,), QQ.zero))
        else:
            factors.append(factor)
    logger.debug(f"Minimality defects: points={[rat_to_str(p) for p in points]}, factors={len(factors)}")
    return DefectSet(tuple(sorted(points)), tuple(factors))


def is_minimal_in(psm: Psm, region: Region) -> bool:
    defects = minimality_defect_points(psm)
    return (not any(region.contains(p) for p in defects.points)
            and not any(region.contains_roots_of(f) for f in defects.factors))


def is_minimal_at_infinity(psm: Psm) -> bool:
    """Rank test on the coefficient of l^d, d = deg P."""
    d = psm.degree
    if d == 0 or psm.n == 0:
        return True
    top = psm.P.coefficient(d)
    top_psm_cols = top.submatrix(tuple(range(top.rows)), psm.state_cols)
    top_psm_rows = top.submatrix(psm.state_rows, tuple(range(top.cols)))
    return rank_at(top_psm_cols, 0) == psm.n and rank_at(top_psm_rows, 0) == psm.n


def is_strongly_minimal(psm: Psm) -> bool:
    return minimality_defect_points(psm).is_empty() and is_minimal_at_infinity(psm)


@dataclass(frozen=True)
class PsmStructureReport:
    pole_eds: ElementaryDivisors
    zero_eds: ElementaryDivisors
    point: Point
    minimal: bool = True

    def to_local_structure(self) -> LocalStructure:
        return LocalStructure(self.pole_eds.multiplicities, self.zero_eds.multiplicities, self.point)


def structure_at(psm: Psm, x: Scalar) -> PsmStructureReport:
    """
    Pole and zero elementary divisors of the transfer function at x, read from
    the state matrix and from P.

    Raises:
        MinimalityPreconditionError: psm is not minimal at x
    """
    x = to_rat(x)
    if not is_minimal_at(psm, x):
        raise MinimalityPreconditionError(rat_to_str(x))
    return PsmStructureReport(
        pole_eds=local_elementary_divisors(psm.state_matrix, x),
        zero_eds=local_elementary_divisors(psm.P, x),
        point=Point(x),
    )


def orders_from_reversal(psm: Psm, shift: int, rank: Optional[int] = None) -> InvariantOrders:
    """
    Orders at 0 of the transfer function of rev_d P (d = deg P), shifted down by
    ``shift``. With shift = d these are the invariant orders at infinity.
    ``rank`` overrides the number of orders (default: the transfer rank).
    """
    d = psm.degree
    reversed_psm = psm.reversal(d)
    zero = QQ.zero
    e = local_elementary_divisors(reversed_psm.state_matrix, zero).multiplicities
    e_tilde = local_elementary_divisors(reversed_psm.P, zero).multiplicities
    r = normal_rank(psm.P) - psm.n if rank is None else rank
    zeros = r - len(e) - len(e_tilde)
    if zeros < 0:
        raise DimensionError(f"rank {r} leaves no room for {len(e) + len(e_tilde)} nonzero orders")
    orders = sorted([-k for k in e] + [0] * zeros + list(e_tilde))
    return InvariantOrders(tuple(k - shift for k in orders), INFINITY)


def structure_at_infinity(psm: Psm) -> InvariantOrders:
    """
    Invariant orders at infinity of the transfer function.

    Raises:
        MinimalityPreconditionError: psm is not minimal at infinity
    """
    if not is_minimal_at_infinity(psm):
        raise MinimalityPreconditionError("inf")
    return orders_from_reversal(psm, psm.degree)
