"""
Block Full Rank Pencils

Pencils L = [[M, K2^T], [K1, 0]] whose off-diagonal blocks have full row
normal rank. With rational bases N1, N2 dual to K1, K2 such a pencil is an
empty-state linearization of G = N2 M N1^T wherever all four bases keep
full row rank, and at infinity with grade 1 + t1 + t2.

Features:
- Minimal-basis factorization R = S T of a full row rank rational matrix
- Region where a rational matrix has full row rank
- Duality checks, associated rational matrix and certified linearization region
- Grade at infinity from reversal rank tests, and a bounded grade search
- One-block-column specialization for sums of pencils times rational matrices
"""

import logging
from dataclasses import dataclass
from functools import reduce as fold
from typing import List, Optional, Sequence, Tuple

from sympy import QQ

from .errors import DegreeError, DimensionError, DualityError, RankDeficientError
from .linearize import Verdict
from .polymat import (
    PolyMatrix, dm_rank, hstack as poly_hstack,
    is_minimal_basis, normal_rank as poly_normal_rank, smith_form,
)
from .psm import Psm
from .ratmat import (
    ALL, RatMatrix, Region, as_ratmatrix, block_diag as rat_block_diag, g_reversal,
    hstack as rat_hstack, is_defined_at, normal_rank, value_at,
)
from .scalars import (
    LAMBDA, RING, Point, RatFun, irreducible_factors, poly_gcd, poly_lcm, reduce,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockFullRank:
    """
    Block full rank pencil.

    ``M`` is p x m, ``K1`` is k1 x m, ``K2`` is k2 x p; absent blocks are None.
    With ``k1_first`` the K1 block rows are placed above M (a row permutation
    that does not change any linearization property).
    """
    M: PolyMatrix
    K1: Optional[PolyMatrix] = None
    K2: Optional[PolyMatrix] = None
    k1_first: bool = False

    def __post_init__(self):
        if self.K1 is not None and self.K1.cols != self.M.cols:
            raise DimensionError(f"K1 has {self.K1.cols} columns, M has {self.M.cols}")
        if self.K2 is not None and self.K2.cols != self.M.rows:
            raise DimensionError(f"K2 has {self.K2.cols} columns, M has {self.M.rows} rows")
        for name, block in (("M", self.M), ("K1", self.K1), ("K2", self.K2)):
            if block is not None and block.degree() > 1:
                raise DegreeError(f"block {name} has degree {block.degree()}")
        for name, block in (("K1", self.K1), ("K2", self.K2)):
            if block is not None and poly_normal_rank(block) != block.rows:
                raise RankDeficientError(f"block {name} lacks full row normal rank")

    @property
    def k1(self) -> int:
        return 0 if self.K1 is None else self.K1.rows

    @property
    def k2(self) -> int:
        return 0 if self.K2 is None else self.K2.rows

    @property
    def pencil(self) -> PolyMatrix:
        L = _assemble(self.M, self.K1, self.K2)
        if not self.k1_first or self.K1 is None:
            return L
        p = self.M.rows
        order = tuple(range(p, L.rows)) + tuple(range(p))
        return L.submatrix(order, tuple(range(L.cols)))

    def as_psm(self) -> Psm:
        return Psm(self.pencil)


@dataclass(frozen=True)
class DualBasisPair:
    K: PolyMatrix
    N: RatMatrix


def _row_content_split(R: RatMatrix) -> Tuple[List[RatFun], PolyMatrix]:
    """R = diag(scales) * P with P polynomial and every row of P primitive."""
    scales = []
    rows = []
    for row in R.entries:
        d = fold(poly_lcm, (e.den for e in row), RING.one)
        polys = [e.num * d.exquo(e.den) for e in row]
        nonzero = [p for p in polys if p]
        g = fold(lambda a, b: poly_gcd(a, b), nonzero[1:], nonzero[0].monic()) if nonzero else RING.one
        rows.append([p.exquo(g) for p in polys])
        scales.append(reduce(g, d))
    return scales, PolyMatrix.from_rows(rows, R.cols)


def _reduce_row_degrees(T: PolyMatrix) -> PolyMatrix:
    """Unimodular row operations until the highest-row-degree coefficient matrix has full row rank."""
    rows = [list(r) for r in T.entries]
    while True:
        current = PolyMatrix.from_rows(rows, T.cols)
        degrees = current.row_degrees()
        H = current.highest_row_degree_coefficient().constant_part()
        if dm_rank(H) == T.rows:
            return current
        c = H.transpose().nullspace().to_list()[0]
        support = [j for j, cj in enumerate(c) if cj]
        i = max(support, key=lambda j: degrees[j])
        combined = [RING.zero] * T.cols
        for j in support:
            shift = LAMBDA ** (degrees[i] - degrees[j])
            factor = shift.mul_ground(c[j] / c[i])
            combined = [a + factor * b for a, b in zip(combined, rows[j])]
        logger.debug(f"Row degree reduction on row {i} (degree {degrees[i]})")
        rows[i] = combined


def minimal_basis_factor(R: RatMatrix) -> Tuple[RatMatrix, PolyMatrix]:
    """
    Factor R = S T with T a minimal basis of the row space of R and S regular.

    Args:
        R: Rational matrix with full row normal rank

    Returns:
        (S, T) with T polynomial, S square and regular

    Raises:
        RankDeficientError: R lacks full row normal rank
    """
    R = as_ratmatrix(R)
    k, m = R.shape
    if normal_rank(R) != k:
        raise RankDeficientError("minimal basis factorization needs full row normal rank")
    if k == 0:
        return RatMatrix.zeros(0, 0), PolyMatrix.zeros(0, m)
    if k == m:
        return R, PolyMatrix.identity(m)

    scales, T0 = _row_content_split(R)
    if is_minimal_basis(T0):
        S = RatMatrix(k, k, tuple(
            tuple(scales[i] if i == j else RatFun.zero() for j in range(k)) for i in range(k)
        ))
        return S, T0

    form = smith_form(T0, with_transforms=True)
    T = _reduce_row_degrees(form.V_inv.submatrix(tuple(range(k)), tuple(range(m))))
    _, pivots = T.to_domain_matrix().to_field().rref()
    columns = tuple(pivots)
    S = R.submatrix(tuple(range(k)), columns) @ RatMatrix.from_poly(T.submatrix(tuple(range(k)), columns)).inverse()
    return S, T


def full_row_rank_region(R: RatMatrix) -> Region:
    """
    Points where R is defined and keeps full row rank: everything except
    the poles of R and the rank drops of its cleared numerator.

    Raises:
        RankDeficientError: R lacks full row normal rank
    """
    R = as_ratmatrix(R)
    if normal_rank(R) != R.rows:
        raise RankDeficientError("full row rank region needs full row normal rank")
    N, d = R.numerator_matrix()
    bad = d * smith_form(N).last()
    points = []
    factors = []
    for factor, _ in irreducible_factors(bad):
        if factor.degree() == 1:
            points.append(-factor.get((0,), QQ.zero))
        else:
            factors.append(factor)
    return Region.excluding(points, factors)


def check_duality(pair: DualBasisPair) -> bool:
    K = pair.K
    N = as_ratmatrix(pair.N)
    if K.cols != N.cols or K.rows + N.rows != K.cols:
        return False
    if not (RatMatrix.from_poly(K) @ N.transpose()).is_zero():
        return False
    return poly_normal_rank(K) == K.rows and normal_rank(N) == N.rows


def _resolve_dual(K: Optional[PolyMatrix], N: Optional[RatMatrix], size: int, name: str) -> RatMatrix:
    """
    The dual basis to use for one side. Absent K means N defaults to the
    identity; a supplied N must then be square of full normal rank.
    """
    if K is None:
        if N is None:
            return RatMatrix.identity(size)
        N = as_ratmatrix(N)
        if N.shape != (size, size) or normal_rank(N) != size:
            raise DualityError(f"{name}: without K the basis must be a regular {size}x{size} matrix")
        return N
    if N is None:
        raise DualityError(f"{name}: a dual basis is required when K is present")
    if not check_duality(DualBasisPair(K, as_ratmatrix(N))):
        raise DualityError(f"{name}: rational bases are not dual")
    return as_ratmatrix(N)


def associated_rational(bfr: BlockFullRank, N1: Optional[RatMatrix] = None,
                        N2: Optional[RatMatrix] = None) -> RatMatrix:
    """G = N2 M N1^T."""
    N1 = _resolve_dual(bfr.K1, N1, bfr.M.cols, "K1/N1")
    N2 = _resolve_dual(bfr.K2, N2, bfr.M.rows, "K2/N2")
    return N2 @ RatMatrix.from_poly(bfr.M) @ N1.transpose()


def linearization_region(bfr: BlockFullRank, N1: Optional[RatMatrix] = None,
                         N2: Optional[RatMatrix] = None) -> Tuple[RatMatrix, Region]:
    """
    The rational matrix the pencil linearizes with empty state, and the region
    where all of K1, K2, N1, N2 keep full row rank.
    """
    G = associated_rational(bfr, N1, N2)
    region = ALL
    for block in (bfr.K1, bfr.K2):
        if block is not None:
            region = region.intersect(full_row_rank_region(RatMatrix.from_poly(block)))
    for N in (N1, N2):
        if N is not None:
            region = region.intersect(full_row_rank_region(as_ratmatrix(N)))
    logger.info(f"Block full rank pencil certified in {region}")
    return G, region


def _full_row_rank_at_zero(R: RatMatrix) -> bool:
    zero = Point(QQ.zero)
    return is_defined_at(R, zero) and dm_rank(value_at(R, zero)) == R.rows


def linearization_at_infinity_grade(bfr: BlockFullRank, N1: Optional[RatMatrix] = None,
                                    N2: Optional[RatMatrix] = None,
                                    t1: int = 0, t2: int = 0) -> Verdict:
    """
    Rank conditions at 0 on rev_1 K_i and rev_{t_i} N_i; on success the pencil
    linearizes G at infinity with grade 1 + t1 + t2.

    A side with neither K nor N contributes t = 0.

    Raises:
        DegreeError: the assembled pencil does not have degree exactly one
        DualityError: a supplied basis is not dual to its K block
    """
    if bfr.pencil.degree() != 1:
        raise DegreeError(f"grade at infinity needs a degree one pencil, got {bfr.pencil.degree()}")
    sides = []
    for name, K, N, t, size in (("K1", bfr.K1, N1, t1, bfr.M.cols), ("K2", bfr.K2, N2, t2, bfr.M.rows)):
        if K is None and N is None:
            sides.append((name, None, None, 0))
        else:
            sides.append((name, K, _resolve_dual(K, N, size, f"{name}/N"), t))
    grade = 1 + sum(t for _, _, _, t in sides)

    for name, K, N, t in sides:
        if K is not None and dm_rank(K.coefficient(1).constant_part()) != K.rows:
            return Verdict(False, f"rev_1 {name} loses row rank at 0", grade=grade)
        if N is not None and not _full_row_rank_at_zero(g_reversal(N, t)):
            return Verdict(False, f"rev_{t} of the basis dual to {name} lacks full row rank at 0", grade=grade)
    return Verdict(True, grade=grade)


@dataclass(frozen=True)
class GradeChoice:
    t1: int
    t2: int
    grade: int


def _degree_span(N: RatMatrix) -> int:
    spans = [max(e.num.degree(), e.den.degree()) for row in N.entries for e in row if not e.is_zero()]
    return max(spans + [1])


def search_grades(bfr: BlockFullRank, N1: Optional[RatMatrix] = None,
                  N2: Optional[RatMatrix] = None, bound: Optional[int] = None) -> List[GradeChoice]:
    """
    Every (t1, t2) in [-d, d]^2 passing the rank tests at infinity.

    ``bound`` defaults to the largest degree of a numerator or denominator in
    the dual bases. Sides without a K block or a basis only try t = 0.
    """
    if bound is None:
        spans = [_degree_span(as_ratmatrix(N)) for N in (N1, N2) if N is not None]
        bound = max(spans + [1])
    full_range = list(range(-bound, bound + 1))
    range1 = full_range if bfr.K1 is not None or N1 is not None else [0]
    range2 = full_range if bfr.K2 is not None or N2 is not None else [0]
    successes = []
    for t1 in range1:
        for t2 in range2:
            verdict = linearization_at_infinity_grade(bfr, N1, N2, t1, t2)
            if verdict:
                successes.append(GradeChoice(t1, t2, verdict.grade))
    logger.debug(f"Grade search in [-{bound}, {bound}]: {len(successes)} successes")
    return successes


def _assemble(M: PolyMatrix, K1: Optional[PolyMatrix], K2: Optional[PolyMatrix]) -> PolyMatrix:
    k1 = 0 if K1 is None else K1.rows
    k2 = 0 if K2 is None else K2.rows
    top = M if K2 is None else poly_hstack(M, K2.transpose())
    if K1 is None:
        return top
    bottom = K1 if K2 is None else poly_hstack(K1, PolyMatrix.zeros(k1, k2))
    return PolyMatrix.block([[top], [bottom]])


def factorization_check(bfr: BlockFullRank) -> bool:
    """L == diag(I, S1) [[M, T2^T], [T1, 0]] diag(I, S2^T) with K_i = S_i T_i."""
    p, m = bfr.M.shape
    left = [RatMatrix.identity(p)]
    right = [RatMatrix.identity(m)]
    T1 = T2 = None
    if bfr.K1 is not None:
        S1, T1 = minimal_basis_factor(RatMatrix.from_poly(bfr.K1))
        left.append(S1)
    if bfr.K2 is not None:
        S2, T2 = minimal_basis_factor(RatMatrix.from_poly(bfr.K2))
        right.append(S2.transpose())
    middle = RatMatrix.from_poly(_assemble(bfr.M, T1, T2))
    product = rat_block_diag(*left) @ middle @ rat_block_diag(*right)
    return product == RatMatrix.from_poly(_assemble(bfr.M, bfr.K1, bfr.K2))


@dataclass(frozen=True)
class LocalLinearizationCertificate:
    G: RatMatrix
    region: Region
    infinity: Optional[Verdict] = None


def cor_locallin_check(m_blocks: Sequence[PolyMatrix], r_blocks: Sequence[RatMatrix],
                       K1: PolyMatrix, t: Optional[int] = None) -> LocalLinearizationCertificate:
    """
    One-block-column pencil [M; K1] with M = [A_0 - l B_0, ..., A_N - l B_N]
    and N1 = [R_0^T, ..., R_N^T], representing R = sum (A_i - l B_i) R_i.

    Raises:
        RankDeficientError: N1 lacks full row normal rank
        DualityError: K1 and N1 are not dual
    """
    if len(m_blocks) != len(r_blocks) or not m_blocks:
        raise DimensionError("need one rational block per pencil block")
    M = poly_hstack(*m_blocks)
    N1 = rat_hstack(*[as_ratmatrix(R).transpose() for R in r_blocks])
    if normal_rank(N1) != N1.rows:
        raise RankDeficientError("stacked rational blocks lack full row normal rank")
    bfr = BlockFullRank(M, K1)
    G, region = linearization_region(bfr, N1)
    infinity = linearization_at_infinity_grade(bfr, N1, None, t, 0) if t is not None else None
    return LocalLinearizationCertificate(G, region, infinity)
