"""
Local Linearization Verdicts

Decides whether a linear polynomial system matrix L is a linearization of a
rational matrix G at a point, in a region, at infinity of a given grade, or
g-strong. Everything goes through spectral characterizations (minimality,
normal ranks, matching pole and zero elementary divisors); the transforming
matrices are never searched for.

Features:
- LinearizationClaim with the identity-padding sizes s1, s2 derived from shapes
- Verdict objects carrying a witness for every failure
- Finite candidate-point reduction for region checks, symbolic factors included
- Recovery of the invariant orders at infinity from a linearization
- Comparison against strong linearizations with an invertible leading state coefficient
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from sympy import QQ

from .errors import DegreeError, DimensionError, MinimalityPreconditionError
from .polymat import SmithForm, dm_rank, normal_rank as poly_normal_rank, smith_form
from .psm import (
    DefectSet, Psm, is_minimal_at, is_minimal_at_infinity, minimality_defect_points,
    orders_from_reversal, transfer_function,
)
from .ratmat import (
    ALL, InvariantOrders, RatMatrix, Region, SmithMcMillan, as_ratmatrix,
    g_reversal, invariant_orders, normal_rank as rat_normal_rank, polynomial_degree, smith_mcmillan,
)
from .scalars import (
    Point, Poly, Scalar, irreducible_factors, linear_factor, poly_to_str,
    rat_to_str, to_rat,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a linearization or minimality check; ``witness`` explains a failure."""
    holds: bool
    witness: str = ""
    grade: Optional[int] = None
    region: Optional[Region] = None

    def __bool__(self) -> bool:
        return self.holds


def _factor_multiplicity(p: Poly, factor: Poly) -> int:
    k = 0
    while p and p.rem(factor) == 0:
        p = p.exquo(factor)
        k += 1
    return k


def _multiplicities(polys, factor: Poly) -> Tuple[int, ...]:
    return tuple(sorted(k for k in (_factor_multiplicity(p, factor) for p in polys) if k > 0))


def _describe_factor(factor: Poly) -> str:
    if factor.degree() == 1:
        return rat_to_str(-factor.get((0,), QQ.zero))
    return f"roots of {poly_to_str(factor)}"


@dataclass(frozen=True)
class LinearizationClaim:
    """
    The claim that L (degree <= 1) linearizes G, with diag(G, I_s1) matched
    against diag(transfer(L), I_s2).
    """
    L: Psm
    G: RatMatrix
    s1: int
    s2: int

    def __post_init__(self):
        object.__setattr__(self, "G", as_ratmatrix(self.G))
        if self.L.P.degree() > 1:
            raise DegreeError(f"linearization claims need a pencil, got degree {self.L.P.degree()}")
        q, r = self.L.transfer_shape
        p, m = self.G.shape
        if self.s1 < 0 or self.s2 < 0:
            raise DimensionError("identity padding sizes must be nonnegative")
        if p + self.s1 != q + self.s2 or m + self.s1 != r + self.s2:
            raise DimensionError(
                f"padding ({self.s1}, {self.s2}) does not match G {p}x{m} and transfer {q}x{r}"
            )

    @classmethod
    def build(cls, L: Psm, G: RatMatrix) -> "LinearizationClaim":
        """Derive the smallest paddings from the shapes of G and the transfer function."""
        q, r = L.transfer_shape
        p, m = as_ratmatrix(G).shape
        if q - p != r - m:
            raise DimensionError(
                f"size excess differs between rows ({q - p}) and columns ({r - m})"
            )
        return cls(L, G, max(q - p, 0), max(p - q, 0))

    def normalized(self) -> "LinearizationClaim":
        shift = min(self.s1, self.s2)
        return LinearizationClaim(self.L, self.G, self.s1 - shift, self.s2 - shift)

    @cached_property
    def target_form(self) -> SmithMcMillan:
        return smith_mcmillan(self.G)

    @cached_property
    def state_form(self) -> SmithForm:
        return smith_form(self.L.state_matrix)

    @cached_property
    def system_form(self) -> SmithForm:
        return smith_form(self.L.P)

    @cached_property
    def defects(self) -> DefectSet:
        return minimality_defect_points(self.L)

    @cached_property
    def rank_gap(self) -> int:
        """rank transfer(L) - (rank G + s1 - s2); zero when the rank condition holds."""
        transfer_rank = poly_normal_rank(self.L.P) - self.L.n
        return transfer_rank - (rat_normal_rank(self.G) + self.s1 - self.s2)


def _rank_witness(claim: LinearizationClaim) -> Optional[str]:
    if claim.rank_gap:
        return (f"normal rank mismatch: transfer rank exceeds rank of G plus padding by "
                f"{claim.rank_gap}")
    return None


def _compare_at_factor(claim: LinearizationClaim, factor: Poly) -> Optional[str]:
    """Compare pole and zero multiplicities of G and of L's transfer at the roots of factor."""
    where = _describe_factor(factor)
    g_poles = _multiplicities(claim.target_form.denominators, factor)
    l_poles = _multiplicities(claim.state_form.invariant_polys, factor)
    if g_poles != l_poles:
        return f"pole elementary divisors differ at {where}: G has {g_poles}, pencil has {l_poles}"
    g_zeros = _multiplicities(claim.target_form.numerators, factor)
    l_zeros = _multiplicities(claim.system_form.invariant_polys, factor)
    if g_zeros != l_zeros:
        return f"zero elementary divisors differ at {where}: G has {g_zeros}, pencil has {l_zeros}"
    return None


def is_linearization_at(claim: LinearizationClaim, x: Scalar) -> Verdict:
    """
    Local linearization test at a rational point: minimality of L there, the
    normal rank relation, and equal pole/zero elementary divisors.
    """
    x = to_rat(x)
    region = Region.only([x])
    if not is_minimal_at(claim.L, x):
        return Verdict(False, f"pencil is not minimal at {rat_to_str(x)}", region=region)
    witness = _rank_witness(claim) or _compare_at_factor(claim, linear_factor(x))
    if witness:
        return Verdict(False, witness, region=region)
    return Verdict(True, region=region)


def candidate_factors(claim: LinearizationClaim, region: Region) -> List[Poly]:
    """Irreducible factors whose roots can break the claim inside region."""
    sources = []
    if claim.target_form.fractions:
        sources.append(claim.target_form.fractions[0][1])
        sources.append(claim.target_form.fractions[-1][0])
    sources.append(claim.state_form.last())
    sources.append(claim.system_form.last())
    seen: Dict[Poly, None] = {}
    for poly in sources:
        for factor, _ in irreducible_factors(poly):
            if region.contains_roots_of(factor):
                seen.setdefault(factor, None)
    for x in claim.defects.points:
        if region.contains(x):
            seen.setdefault(linear_factor(x), None)
    for factor in claim.defects.factors:
        if region.contains_roots_of(factor):
            seen.setdefault(factor, None)
    return list(seen)


def is_linearization_in(claim: LinearizationClaim, region: Region = ALL) -> Verdict:
    """Linearization at every point of region, checked on the finite candidate set."""
    witness = _rank_witness(claim)
    if witness:
        return Verdict(False, witness, region=region)

    defect_factors = set(claim.defects.factors) | {linear_factor(x) for x in claim.defects.points}
    candidates = candidate_factors(claim, region)
    logger.debug(f"Checking {len(candidates)} candidate factors in {region}")
    for factor in candidates:
        if factor in defect_factors:
            return Verdict(False, f"pencil is not minimal at {_describe_factor(factor)}", region=region)
        witness = _compare_at_factor(claim, factor)
        if witness:
            return Verdict(False, witness, region=region)
    return Verdict(True, region=region)


def is_linearization_at_infinity(claim: LinearizationClaim, g: int) -> Verdict:
    """
    Linearization at infinity of grade g: rev L must be minimal at 0 and must
    linearize rev_g G at 0.
    """
    ell = claim.L.degree
    if not is_minimal_at_infinity(claim.L):
        return Verdict(False, "reversed pencil is not minimal at 0", grade=g)
    reversed_claim = LinearizationClaim(
        claim.L.reversal(ell), g_reversal(claim.G, g), claim.s1, claim.s2
    )
    local = is_linearization_at(reversed_claim, 0)
    if not local:
        return Verdict(False, f"at infinity (grade {g}): {local.witness}", grade=g)
    return Verdict(True, grade=g)


def is_g_strong(claim: LinearizationClaim, g: int) -> Verdict:
    finite = is_linearization_in(claim, ALL)
    if not finite:
        return Verdict(False, finite.witness, grade=g, region=ALL)
    infinite = is_linearization_at_infinity(claim, g)
    if not infinite:
        return Verdict(False, infinite.witness, grade=g, region=ALL)
    return Verdict(True, grade=g, region=ALL)


def recover_infinite_orders(L: Psm, g: int, rank: Optional[int] = None) -> InvariantOrders:
    """
    Invariant orders at infinity of G from a linearization at infinity of grade g.

    Args:
        L: The linearization; rev L must be minimal at 0
        g: Grade of the linearization
        rank: Normal rank of G (defaults to the rank of L's transfer function)

    Raises:
        MinimalityPreconditionError: rev L is not minimal at 0
    """
    if not is_minimal_at_infinity(L):
        raise MinimalityPreconditionError("inf", "reversed pencil is not minimal at 0")
    return orders_from_reversal(L, g, rank)


class StrongKind(Enum):
    GG_STRONG = "gG_strong"
    GG_PLUS_1_STRONG = "gG_plus_1_strong"
    NOT_G_STRONG_ANY_G = "not_g_strong_any_g"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class StrongComparison:
    kind: StrongKind
    grade: Optional[int] = None
    witness: str = ""


def _leading_transfer_coefficient_is_zero(L: Psm) -> bool:
    """D1 + C1 A1^{-1} B1 == 0, with A1 invertible."""
    D1 = L.feedthrough.coefficient(1)
    if D1.rows == 0 or D1.cols == 0:
        return True
    total = D1.constant_part()
    if L.n > 0:
        A1 = L.state_matrix.coefficient(1).constant_part()
        B1 = L.input_matrix.coefficient(1).constant_part()
        C1 = L.output_matrix.coefficient(1).constant_part()
        total = total + C1 * (A1.inv() * B1)
    return total.is_zero_matrix


def _orders_at_zero_padded(G: RatMatrix, grade: int, padding: int) -> Tuple[int, ...]:
    orders = invariant_orders(g_reversal(G, grade), Point(QQ.zero)).orders
    return tuple(sorted(orders + (0,) * padding))


def classify_vs_strong(L: Psm, G: RatMatrix) -> StrongComparison:
    """
    Place a strong linearization with invertible leading state coefficient in the
    g-strong hierarchy.

    Returns not_applicable when L is not such a strong linearization of G;
    otherwise gG_strong (n = 0 or D1 + C1 A1^{-1} B1 != 0), gG_plus_1_strong
    (that matrix vanishes and sizes agree) or not_g_strong_any_g.
    """
    G = as_ratmatrix(G)
    try:
        claim = LinearizationClaim.build(L, G)
    except (DegreeError, DimensionError) as e:
        return StrongComparison(StrongKind.NOT_APPLICABLE, witness=str(e))

    finite = is_linearization_in(claim, ALL)
    if not finite:
        return StrongComparison(StrongKind.NOT_APPLICABLE, witness=f"not a linearization in all: {finite.witness}")

    if L.n > 0:
        A1 = L.state_matrix.coefficient(1).constant_part()
        if dm_rank(A1) != L.n:
            return StrongComparison(StrongKind.NOT_APPLICABLE, witness="leading coefficient of state matrix is singular")

    g_G = polynomial_degree(G)
    transfer = transfer_function(L)
    lhs = _orders_at_zero_padded(G, g_G, claim.s1)
    rhs = _orders_at_zero_padded(transfer, polynomial_degree(transfer), claim.s2)
    if lhs != rhs:
        return StrongComparison(
            StrongKind.NOT_APPLICABLE,
            witness=f"reversals differ at 0: orders {lhs} vs {rhs}",
        )

    if L.n == 0 or not _leading_transfer_coefficient_is_zero(L):
        kind, grade = StrongKind.GG_STRONG, g_G
    elif claim.s1 == claim.s2:
        kind, grade = StrongKind.GG_PLUS_1_STRONG, g_G + 1
    else:
        kind, grade = StrongKind.NOT_G_STRONG_ANY_G, None
    logger.info(f"Strong comparison: {kind.value} (grade {grade})")
    return StrongComparison(kind, grade)
