"""
Rational Matrices

Immutable matrices over QQ(l) and their local pole/zero structure.

Features:
- Regions of the line: everything, a finite point set, or a cofinite set
- Smith-McMillan form globally or restricted to a region
- Invariant orders and pole/zero partial multiplicities at a point or at infinity
- Eigenvalues (zeros that are not poles), rational and symbolic
- g-reversals, polynomial / strictly proper split, equivalence in a region
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import reduce as fold
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from .errors import DimensionError, FormatError, RankDeficientError, ZeroDivisorError
from .polymat import POLY_DOMAIN, PolyMatrix, dm_rank, smith_form
from .scalars import (
    INFINITY, RING, Point, Poly, Rat, RatFun, Scalar,
    irreducible_factors, linear_factor, poly_lcm, poly_sort_key, poly_to_str,
    rat_to_str, ratfun, reduce, root_multiplicity, to_rat,
)

logger = logging.getLogger(__name__)


class RegionKind(Enum):
    ALL = "all"
    FINITE = "only"
    COFINITE = "except"


@dataclass(frozen=True)
class Region:
    """
    A subset of the line: all of it, finitely many rational points, or the
    complement of finitely many rational points and of the roots of some
    irreducible non-linear polynomials (``excluded_factors``, cofinite only).
    """
    kind: RegionKind
    points: FrozenSet[Rat] = frozenset()
    excluded_factors: FrozenSet[Poly] = frozenset()

    @classmethod
    def all(cls) -> "Region":
        return cls(RegionKind.ALL)

    @classmethod
    def only(cls, points: Iterable[Scalar]) -> "Region":
        return cls(RegionKind.FINITE, frozenset(to_rat(p) for p in points))

    @classmethod
    def excluding(cls, points: Iterable[Scalar], factors: Iterable[Poly] = ()) -> "Region":
        points = frozenset(to_rat(p) for p in points)
        factors = frozenset(f.monic() for f in factors)
        if not points and not factors:
            return cls.all()
        return cls(RegionKind.COFINITE, points, factors)

    @classmethod
    def parse(cls, text: str) -> "Region":
        text = text.strip()
        if text == "all":
            return cls.all()
        for kind in (RegionKind.FINITE, RegionKind.COFINITE):
            prefix = f"{kind.value}:"
            if text.startswith(prefix):
                body = text[len(prefix):].strip()
                if not (body.startswith("{") and body.endswith("}")):
                    raise FormatError(f"region set must be braced: {text!r}")
                items = [s for s in (p.strip() for p in body[1:-1].split(",")) if s]
                points = [to_rat(s) for s in items]
                return cls.only(points) if kind is RegionKind.FINITE else cls.excluding(points)
        raise FormatError(f"unknown region syntax: {text!r} (use all, only:{{..}} or except:{{..}})")

    def contains(self, x: Scalar) -> bool:
        x = to_rat(x)
        if self.kind is RegionKind.ALL:
            return True
        if self.kind is RegionKind.FINITE:
            return x in self.points
        return x not in self.points

    def contains_roots_of(self, factor: Poly) -> bool:
        """Whether the region meets the roots of a monic irreducible factor."""
        if factor.degree() == 1:
            return self.contains(-factor.get((0,), QQ.zero))
        if self.kind is RegionKind.FINITE:
            return False
        if self.kind is RegionKind.COFINITE:
            return factor.monic() not in self.excluded_factors
        return True

    def intersect(self, other: "Region") -> "Region":
        if self.kind is RegionKind.ALL:
            return other
        if other.kind is RegionKind.ALL:
            return self
        if self.kind is RegionKind.FINITE and other.kind is RegionKind.FINITE:
            return Region(RegionKind.FINITE, self.points & other.points)
        if self.kind is RegionKind.FINITE:
            return Region(RegionKind.FINITE, frozenset(p for p in self.points if other.contains(p)))
        if other.kind is RegionKind.FINITE:
            return other.intersect(self)
        return Region.excluding(self.points | other.points, self.excluded_factors | other.excluded_factors)

    def __str__(self) -> str:
        if self.kind is RegionKind.ALL:
            return "all"
        text = f"{self.kind.value}:{{{','.join(rat_to_str(p) for p in sorted(self.points))}}}"
        if self.excluded_factors:
            roots = ", ".join(poly_to_str(f) for f in sorted(self.excluded_factors, key=poly_sort_key))
            text += f" minus roots of {{{roots}}}"
        return text


ALL = Region.all()


@dataclass(frozen=True)
class RatMatrix:
    """A rows x cols grid of reduced rational functions in l."""
    rows: int
    cols: int
    entries: Tuple[Tuple[RatFun, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError(f"entry grid does not match declared shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "RatMatrix":
        grid = tuple(tuple(ratfun(e) for e in row) for row in rows)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        return cls(len(grid), cols, grid)

    @classmethod
    def from_poly(cls, P: PolyMatrix) -> "RatMatrix":
        return cls(P.rows, P.cols, tuple(tuple(RatFun.from_poly(e) for e in row) for row in P.entries))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls.from_poly(PolyMatrix.zeros(rows, cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.from_poly(PolyMatrix.identity(n))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["RatMatrix"]]) -> "RatMatrix":
        return vstack(*[hstack(*row) for row in blocks])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: Tuple[int, int]) -> RatFun:
        i, j = index
        return self.entries[i][j]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix(len(rows), len(cols), tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, tuple(
            tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)
        ))

    @property
    def T(self) -> "RatMatrix":
        return self.transpose()

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def is_polynomial(self) -> bool:
        return all(e.is_polynomial() for row in self.entries for e in row)

    def to_poly(self) -> PolyMatrix:
        if not self.is_polynomial():
            raise DimensionError("rational matrix has non-polynomial entries")
        return PolyMatrix(self.rows, self.cols, tuple(tuple(e.num for e in row) for row in self.entries))

    def common_denominator(self) -> Poly:
        """Monic lcm of all entry denominators."""
        return fold(poly_lcm, (e.den for row in self.entries for e in row), RING.one)

    def numerator_matrix(self) -> Tuple[PolyMatrix, Poly]:
        """(N, d) with self = N / d and d the common denominator."""
        d = self.common_denominator()
        grid = tuple(tuple(e.num * d.exquo(e.den) for e in row) for row in self.entries)
        return PolyMatrix(self.rows, self.cols, grid), d

    def evaluate(self, x: Scalar) -> DomainMatrix:
        x = to_rat(x)
        return DomainMatrix([[e.evaluate(x) for e in row] for row in self.entries], self.shape, QQ)

    def compose_reciprocal(self, g: int) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(
            tuple(e.compose_reciprocal(g) for e in row) for row in self.entries
        ))

    def _check_same_shape(self, other: "RatMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        other = _coerce(other)
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-_coerce(other))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        other = _coerce(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        columns = other.transpose().entries
        grid = []
        for row in self.entries:
            out = []
            for col in columns:
                acc = RatFun.zero()
                for a, b in zip(row, col):
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                out.append(acc)
            grid.append(tuple(out))
        return RatMatrix(self.rows, other.cols, tuple(grid))

    def scale(self, factor) -> "RatMatrix":
        factor = ratfun(factor)
        return RatMatrix(self.rows, self.cols, tuple(tuple(factor * e for e in row) for row in self.entries))

    def inverse(self) -> "RatMatrix":
        if not self.is_square():
            raise DimensionError(f"inverse needs a square matrix, got {self.shape}")
        if self.rows == 0:
            return self
        N, d = self.numerator_matrix()
        X = poly_solve(N, PolyMatrix.identity(self.rows))
        return X.scale(RatFun.from_poly(d))

    def __str__(self) -> str:
        return "\n".join("; ".join(str(e) for e in row) for row in self.entries)


def _coerce(value) -> RatMatrix:
    if isinstance(value, RatMatrix):
        return value
    if isinstance(value, PolyMatrix):
        return RatMatrix.from_poly(value)
    raise DimensionError(f"cannot use {type(value).__name__} as a rational matrix")


def as_ratmatrix(value: Union[RatMatrix, PolyMatrix]) -> RatMatrix:
    return _coerce(value)


def hstack(*blocks: RatMatrix) -> RatMatrix:
    blocks = tuple(_coerce(b) for b in blocks)
    if not blocks or any(b.rows != blocks[0].rows for b in blocks):
        raise DimensionError("hstack blocks differ in height")
    grid = tuple(tuple(e for b in blocks for e in b.entries[i]) for i in range(blocks[0].rows))
    return RatMatrix(blocks[0].rows, sum(b.cols for b in blocks), grid)


def vstack(*blocks: RatMatrix) -> RatMatrix:
    blocks = tuple(_coerce(b) for b in blocks)
    if not blocks or any(b.cols != blocks[0].cols for b in blocks):
        raise DimensionError("vstack blocks differ in width")
    return RatMatrix(sum(b.rows for b in blocks), blocks[0].cols, tuple(row for b in blocks for row in b.entries))


def block_diag(*blocks: RatMatrix) -> RatMatrix:
    blocks = tuple(_coerce(b) for b in blocks)
    total = sum(b.cols for b in blocks)
    grid = []
    offset = 0
    for b in blocks:
        for row in b.entries:
            grid.append(
                tuple([RatFun.zero()] * offset) + row + tuple([RatFun.zero()] * (total - offset - b.cols))
            )
        offset += b.cols
    return RatMatrix(len(grid), total, tuple(grid))


def poly_solve(A: PolyMatrix, B: PolyMatrix) -> RatMatrix:
    """A^{-1} B for square nonsingular A, by a fraction-free solve over QQ[l]."""
    if not A.is_square() or A.rows != B.rows:
        raise DimensionError(f"cannot solve {A.shape} system with right-hand side {B.shape}")
    if A.rows == 0 or B.cols == 0:
        return RatMatrix.zeros(A.cols, B.cols)
    try:
        xnum, xden = A.to_domain_matrix().solve_den(B.to_domain_matrix())
    except DMNonInvertibleMatrixError as e:
        raise RankDeficientError("matrix is singular") from e
    xnum = xnum.convert_to(POLY_DOMAIN).to_list()
    return RatMatrix(A.cols, B.cols, tuple(tuple(reduce(e, xden) for e in row) for row in xnum))


def normal_rank(G: Union[RatMatrix, PolyMatrix]) -> int:
    G = _coerce(G)
    N, _ = G.numerator_matrix()
    return dm_rank(N.to_domain_matrix())


def rank_at(G: RatMatrix, x: Scalar) -> int:
    return dm_rank(_coerce(G).evaluate(x))


def poly_sp_split(G: RatMatrix) -> Tuple[PolyMatrix, RatMatrix]:
    """G = Q + Gsp with Q polynomial and Gsp strictly proper (entrywise division)."""
    G = _coerce(G)
    q_grid = []
    sp_grid = []
    for row in G.entries:
        q_row = []
        sp_row = []
        for e in row:
            q, r = divmod(e.num, e.den)
            q_row.append(q)
            sp_row.append(reduce(r, e.den))
        q_grid.append(tuple(q_row))
        sp_grid.append(tuple(sp_row))
    return PolyMatrix(G.rows, G.cols, tuple(q_grid)), RatMatrix(G.rows, G.cols, tuple(sp_grid))


def polynomial_degree(G: Union[RatMatrix, PolyMatrix]) -> int:
    """Degree of the polynomial part of G, or 0 when G is strictly proper."""
    G = _coerce(G)
    degrees = [e.degree() for row in G.entries for e in row if not e.is_zero()]
    return max([0] + [d for d in degrees if d >= 0])


def g_reversal(G: Union[RatMatrix, PolyMatrix], g: Optional[int] = None) -> RatMatrix:
    """l^g G(1/l); g defaults to the degree of the polynomial part."""
    G = _coerce(G)
    if g is None:
        g = polynomial_degree(G)
    return G.compose_reciprocal(g)


@dataclass(frozen=True)
class SmithMcMillan:
    """Fractions eps_i / psi_i of the Smith-McMillan form, restricted to ``region``."""
    fractions: Tuple[Tuple[Poly, Poly], ...]
    rank: int
    rows: int
    cols: int
    region: Region

    @property
    def numerators(self) -> Tuple[Poly, ...]:
        return tuple(eps for eps, _ in self.fractions)

    @property
    def denominators(self) -> Tuple[Poly, ...]:
        return tuple(psi for _, psi in self.fractions)

    def __str__(self) -> str:
        return "\n".join(f"{poly_to_str(e)} / {poly_to_str(p)}" for e, p in self.fractions)


def _restrict(p: Poly, region: Region) -> Poly:
    """Product of the irreducible factor powers of p whose roots lie in region."""
    if region.kind is RegionKind.ALL:
        return p
    if region.kind is RegionKind.FINITE:
        result = RING.one
        for x in region.points:
            k = root_multiplicity(p, x)
            if k:
                result = result * linear_factor(x) ** k
        return result
    result = RING.one
    for factor, k in irreducible_factors(p):
        if region.contains_roots_of(factor):
            result = result * factor ** k
    return result


def smith_mcmillan(G: Union[RatMatrix, PolyMatrix], region: Region = ALL) -> SmithMcMillan:
    """
    Smith-McMillan form of G in a region.

    Clears a monic common denominator d, takes the Smith form of d*G and
    reduces each invariant polynomial against d. For a proper region only the
    factors with roots inside it are kept.
    """
    G = _coerce(G)
    N, d = G.numerator_matrix()
    fractions = []
    for inv in smith_form(N).invariant_polys:
        f = reduce(inv, d)
        fractions.append((_restrict(f.num, region), _restrict(f.den, region)))
    logger.debug(f"Smith-McMillan form of {G.rows}x{G.cols} matrix in {region}: rank {len(fractions)}")
    return SmithMcMillan(tuple(fractions), len(fractions), G.rows, G.cols, region)


@dataclass(frozen=True)
class InvariantOrders:
    """Ascending invariant orders at ``point``; one per unit of normal rank."""
    orders: Tuple[int, ...]
    point: Point

    def __str__(self) -> str:
        return " ".join(str(k) for k in self.orders)


@dataclass(frozen=True)
class LocalStructure:
    pole_mults: Tuple[int, ...]
    zero_mults: Tuple[int, ...]
    point: Point

    @classmethod
    def from_orders(cls, orders: InvariantOrders) -> "LocalStructure":
        poles = tuple(sorted(-k for k in orders.orders if k < 0))
        zeros = tuple(sorted(k for k in orders.orders if k > 0))
        return cls(poles, zeros, orders.point)


def invariant_orders(G: Union[RatMatrix, PolyMatrix], point: Point) -> InvariantOrders:
    G = _coerce(G)
    if point.is_infinite:
        at_zero = invariant_orders(g_reversal(G, 0), Point(QQ.zero))
        return InvariantOrders(at_zero.orders, INFINITY)
    form = smith_mcmillan(G)
    orders = [
        root_multiplicity(eps, point.value) - root_multiplicity(psi, point.value)
        for eps, psi in form.fractions
    ]
    return InvariantOrders(tuple(sorted(orders)), point)


def local_structure(G: Union[RatMatrix, PolyMatrix], point: Point) -> LocalStructure:
    return LocalStructure.from_orders(invariant_orders(G, point))


@dataclass(frozen=True)
class Eigenvalue:
    value: Rat
    zero_mults: Tuple[int, ...]


@dataclass(frozen=True)
class SymbolicEigenvalue:
    """Roots of an irreducible non-linear factor; multiplicities per invariant polynomial."""
    factor: Poly
    zero_mults: Tuple[int, ...]


@dataclass(frozen=True)
class EigenvalueReport:
    rational: Tuple[Eigenvalue, ...]
    symbolic: Tuple[SymbolicEigenvalue, ...]

    def points(self) -> List[Rat]:
        return [e.value for e in self.rational]


def eigenvalues(G: Union[RatMatrix, PolyMatrix], region: Region = ALL) -> EigenvalueReport:
    """Finite zeros of G that are not poles, restricted to region."""
    form = smith_mcmillan(G)
    if not form.fractions:
        return EigenvalueReport((), ())
    eps_last = form.fractions[-1][0]
    psi_first = form.fractions[0][1]

    rational = []
    symbolic = []
    for factor, _ in irreducible_factors(eps_last):
        if not region.contains_roots_of(factor):
            continue
        if factor.degree() == 1:
            x = -factor.get((0,), QQ.zero)
            if psi_first(x) == 0:
                continue
            mults = [root_multiplicity(eps, x) for eps in form.numerators]
            rational.append(Eigenvalue(x, tuple(sorted(k for k in mults if k > 0))))
        else:
            if psi_first.rem(factor) == 0:
                continue
            mults = []
            for eps in form.numerators:
                k = 0
                rest = eps
                while rest.rem(factor) == 0:
                    rest = rest.exquo(factor)
                    k += 1
                if k:
                    mults.append(k)
            symbolic.append(SymbolicEigenvalue(factor, tuple(sorted(mults))))
    rational.sort(key=lambda e: e.value)
    return EigenvalueReport(tuple(rational), tuple(symbolic))


def is_defined_at(G: Union[RatMatrix, PolyMatrix], point: Point) -> bool:
    G = _coerce(G)
    if point.is_infinite:
        return all(e.is_proper() for row in G.entries for e in row)
    return all(e.den(point.value) != 0 for row in G.entries for e in row)


def value_at(G: Union[RatMatrix, PolyMatrix], point: Point) -> DomainMatrix:
    """G evaluated at a point where it is defined; at infinity the limit matrix."""
    G = _coerce(G)
    if not is_defined_at(G, point):
        raise ZeroDivisorError(f"matrix is not defined at {point}")
    if point.is_infinite:
        return g_reversal(G, 0).evaluate(QQ.zero)
    return G.evaluate(point.value)


def is_regular_at(G: Union[RatMatrix, PolyMatrix], point: Point) -> bool:
    G = _coerce(G)
    if not G.is_square():
        raise DimensionError(f"regularity needs a square matrix, got {G.shape}")
    if not is_defined_at(G, point):
        return False
    return dm_rank(value_at(G, point)) == G.rows


def are_equivalent_in(G: Union[RatMatrix, PolyMatrix], H: Union[RatMatrix, PolyMatrix],
                      region: Region = ALL) -> bool:
    G = _coerce(G)
    H = _coerce(H)
    if G.shape != H.shape:
        raise DimensionError(f"cannot compare {G.shape} with {H.shape}")
    if normal_rank(G) != normal_rank(H):
        return False
    return smith_mcmillan(G, region).fractions == smith_mcmillan(H, region).fractions
