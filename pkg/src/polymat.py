"""
Polynomial Matrices

Immutable matrices over QQ[l] together with the exact structure queries
built on them.

Features:
- Block assembly, products, evaluation at rational points, coefficient extraction
- Normal rank and evaluated rank through sympy DomainMatrix
- Smith normal form by gcd pivoting, with optional unimodular transforms
- Independent Smith oracle from determinantal divisors (gcd of minors)
- Local and global elementary divisors, unimodularity and minimal-basis tests
- g-reversals
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import DimensionError
from .scalars import (
    RING, LAMBDA, ZERO_DEGREE, Degree, Point, Poly, Rat, Scalar,
    const_poly, irreducible_factors, poly_reverse, poly_to_str,
    root_multiplicity, to_rat,
)

logger = logging.getLogger(__name__)

POLY_DOMAIN = RING.to_domain()


def _as_poly(value) -> Poly:
    if isinstance(value, type(RING.zero)):
        return value
    return const_poly(value)


def dm_rank(dm: DomainMatrix) -> int:
    """Rank of a DomainMatrix, tolerating empty shapes."""
    rows, cols = dm.shape
    if rows == 0 or cols == 0:
        return 0
    if dm.domain.is_Field:
        return dm.rank()
    return dm.to_field().rank()


@dataclass(frozen=True)
class PolyMatrix:
    """A rows x cols grid of polynomials in l, stored row-major as tuples."""
    rows: int
    cols: int
    entries: Tuple[Tuple[Poly, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError(
                f"entry grid does not match declared shape {self.rows}x{self.cols}"
            )

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "PolyMatrix":
        grid = tuple(tuple(_as_poly(e) for e in row) for row in rows)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        return cls(len(grid), cols, grid)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls(rows, cols, tuple(tuple(RING.zero for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls(n, n, tuple(
            tuple(RING.one if i == j else RING.zero for j in range(n)) for i in range(n)
        ))

    @classmethod
    def constant(cls, values: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> "PolyMatrix":
        return cls.from_rows([[const_poly(v) for v in row] for row in values], cols)

    @classmethod
    def from_domain_matrix(cls, dm: DomainMatrix) -> "PolyMatrix":
        rows, cols = dm.shape
        if rows == 0 or cols == 0:
            return cls.zeros(rows, cols)
        dm = dm.convert_to(POLY_DOMAIN)
        return cls.from_rows(dm.to_list(), cols)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["PolyMatrix"]]) -> "PolyMatrix":
        """Assemble a block matrix; every block row must share its height."""
        return vstack(*[hstack(*row) for row in blocks])

    # -- access --------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: Tuple[int, int]) -> Poly:
        i, j = index
        return self.entries[i][j]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(len(rows), len(cols), tuple(
            tuple(self.entries[i][j] for j in cols) for i in rows
        ))

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.cols, self.rows, tuple(
            tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)
        ))

    @property
    def T(self) -> "PolyMatrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return all(not e for row in self.entries for e in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def degree(self) -> Degree:
        """Largest entry degree; the zero sentinel for the zero matrix."""
        degrees = [e.degree() for row in self.entries for e in row if e]
        return max(degrees) if degrees else ZERO_DEGREE

    def row_degrees(self) -> List[Degree]:
        return [max((e.degree() for e in row if e), default=ZERO_DEGREE) for row in self.entries]

    def coefficient(self, k: int) -> "PolyMatrix":
        """Constant matrix of the l^k coefficients."""
        return PolyMatrix(self.rows, self.cols, tuple(
            tuple(RING.ground_new(e.get((k,), QQ.zero)) for e in row) for row in self.entries
        ))

    def highest_row_degree_coefficient(self) -> "PolyMatrix":
        degrees = self.row_degrees()
        grid = []
        for row, d in zip(self.entries, degrees):
            if d is ZERO_DEGREE:
                grid.append(tuple(RING.zero for _ in row))
            else:
                grid.append(tuple(RING.ground_new(e.get((d,), QQ.zero)) for e in row))
        return PolyMatrix(self.rows, self.cols, tuple(grid))

    def evaluate(self, x: Scalar) -> DomainMatrix:
        """Constant matrix P(x) over QQ."""
        x = to_rat(x)
        return DomainMatrix([[e(x) for e in row] for row in self.entries], self.shape, QQ)

    def constant_part(self) -> DomainMatrix:
        """The matrix over QQ of a degree <= 0 polynomial matrix."""
        return DomainMatrix(
            [[e.get((0,), QQ.zero) for e in row] for row in self.entries], self.shape, QQ
        )

    def to_domain_matrix(self) -> DomainMatrix:
        return DomainMatrix([list(row) for row in self.entries], self.shape, POLY_DOMAIN)

    # -- algebra -------------------------------------------------------------

    def _check_same_shape(self, other: "PolyMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same_shape(other)
        return PolyMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries))

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        columns = other.transpose().entries
        return PolyMatrix(self.rows, other.cols, tuple(
            tuple(sum((a * b for a, b in zip(row, col)), RING.zero) for col in columns)
            for row in self.entries
        ))

    def scale(self, factor) -> "PolyMatrix":
        factor = _as_poly(factor)
        return PolyMatrix(self.rows, self.cols, tuple(
            tuple(factor * e for e in row) for row in self.entries
        ))

    def __str__(self) -> str:
        return "\n".join("; ".join(poly_to_str(e) for e in row) for row in self.entries)


def hstack(*blocks: PolyMatrix) -> PolyMatrix:
    if not blocks:
        raise DimensionError("hstack needs at least one block")
    height = blocks[0].rows
    if any(b.rows != height for b in blocks):
        raise DimensionError("hstack blocks differ in height")
    grid = tuple(
        tuple(e for b in blocks for e in b.entries[i]) for i in range(height)
    )
    return PolyMatrix(height, sum(b.cols for b in blocks), grid)


def vstack(*blocks: PolyMatrix) -> PolyMatrix:
    if not blocks:
        raise DimensionError("vstack needs at least one block")
    width = blocks[0].cols
    if any(b.cols != width for b in blocks):
        raise DimensionError("vstack blocks differ in width")
    return PolyMatrix(sum(b.rows for b in blocks), width, tuple(
        row for b in blocks for row in b.entries
    ))


def block_diag(*blocks: PolyMatrix) -> PolyMatrix:
    total_cols = sum(b.cols for b in blocks)
    grid = []
    offset = 0
    for b in blocks:
        for row in b.entries:
            grid.append(
                tuple([RING.zero] * offset) + row + tuple([RING.zero] * (total_cols - offset - b.cols))
            )
        offset += b.cols
    return PolyMatrix(len(grid), total_cols, tuple(grid))


def determinant(P: PolyMatrix) -> Poly:
    if not P.is_square():
        raise DimensionError(f"determinant needs a square matrix, got {P.shape}")
    if P.rows == 0:
        return RING.one
    return P.to_domain_matrix().det()


def normal_rank(P: PolyMatrix) -> int:
    return dm_rank(P.to_domain_matrix())


def rank_at(P: PolyMatrix, x: Scalar) -> int:
    return dm_rank(P.evaluate(x))


@dataclass(frozen=True)
class SmithForm:
    """
    Invariant polynomials d_1 | d_2 | ... | d_r of a polynomial matrix.

    When computed with transforms, U @ P @ V is the Smith diagonal and
    U_inv, V_inv are the inverses (all unimodular).
    """
    invariant_polys: Tuple[Poly, ...]
    rank: int
    rows: int
    cols: int
    U: Optional[PolyMatrix] = field(default=None, compare=False, repr=False)
    V: Optional[PolyMatrix] = field(default=None, compare=False, repr=False)
    U_inv: Optional[PolyMatrix] = field(default=None, compare=False, repr=False)
    V_inv: Optional[PolyMatrix] = field(default=None, compare=False, repr=False)

    def last(self) -> Poly:
        """d_r, or 1 for the zero matrix."""
        return self.invariant_polys[-1] if self.invariant_polys else RING.one

    def diagonal(self) -> PolyMatrix:
        grid = [[RING.zero] * self.cols for _ in range(self.rows)]
        for i, d in enumerate(self.invariant_polys):
            grid[i][i] = d
        return PolyMatrix.from_rows(grid, self.cols)

    def __str__(self) -> str:
        return ", ".join(poly_to_str(d) for d in self.invariant_polys)


class _SmithEliminator:
    """Gcd-pivoting elimination over QQ[l] with optional transform bookkeeping."""

    def __init__(self, P: PolyMatrix, track: bool):
        self.p, self.m = P.shape
        self.S = [list(row) for row in P.entries]
        self.track = track
        if track:
            self.U = [list(r) for r in PolyMatrix.identity(self.p).entries]
            self.U_inv = [list(r) for r in PolyMatrix.identity(self.p).entries]
            self.V = [list(r) for r in PolyMatrix.identity(self.m).entries]
            self.V_inv = [list(r) for r in PolyMatrix.identity(self.m).entries]

    # Row operations act on S and U; their inverses act on columns of U_inv.
    def swap_rows(self, a: int, b: int) -> None:
        if a == b:
            return
        self.S[a], self.S[b] = self.S[b], self.S[a]
        if self.track:
            self.U[a], self.U[b] = self.U[b], self.U[a]
            for row in self.U_inv:
                row[a], row[b] = row[b], row[a]

    def add_row(self, target: int, source: int, q: Poly) -> None:
        """row_target += q * row_source"""
        self.S[target] = [t + q * s for t, s in zip(self.S[target], self.S[source])]
        if self.track:
            self.U[target] = [t + q * s for t, s in zip(self.U[target], self.U[source])]
            for row in self.U_inv:
                row[source] = row[source] - q * row[target]

    def scale_row(self, target: int, c: Rat) -> None:
        self.S[target] = [e.mul_ground(c) for e in self.S[target]]
        if self.track:
            self.U[target] = [e.mul_ground(c) for e in self.U[target]]
            for row in self.U_inv:
                row[target] = row[target].quo_ground(c)

    # Column operations act on S and V; their inverses act on rows of V_inv.
    def swap_cols(self, a: int, b: int) -> None:
        if a == b:
            return
        for row in self.S:
            row[a], row[b] = row[b], row[a]
        if self.track:
            for row in self.V:
                row[a], row[b] = row[b], row[a]
            self.V_inv[a], self.V_inv[b] = self.V_inv[b], self.V_inv[a]

    def add_col(self, target: int, source: int, q: Poly) -> None:
        """col_target += q * col_source"""
        for row in self.S:
            row[target] = row[target] + q * row[source]
        if self.track:
            for row in self.V:
                row[target] = row[target] + q * row[source]
            self.V_inv[source] = [s - q * t for s, t in zip(self.V_inv[source], self.V_inv[target])]

    def _min_degree_entry(self, t: int) -> Optional[Tuple[int, int]]:
        best = None
        best_degree = None
        for i in range(t, self.p):
            for j in range(t, self.m):
                e = self.S[i][j]
                if e and (best_degree is None or e.degree() < best_degree):
                    best, best_degree = (i, j), e.degree()
        return best

    def _find_non_multiple(self, t: int) -> Optional[int]:
        pivot = self.S[t][t]
        for i in range(t + 1, self.p):
            for j in range(t + 1, self.m):
                if self.S[i][j] and self.S[i][j].rem(pivot):
                    return i
        return None

    def run(self) -> List[Poly]:
        invariants = []
        for t in range(min(self.p, self.m)):
            while True:
                position = self._min_degree_entry(t)
                if position is None:
                    return invariants
                i, j = position
                self.swap_rows(t, i)
                self.swap_cols(t, j)
                pivot = self.S[t][t]

                clean = True
                for i in range(t + 1, self.p):
                    if self.S[i][t]:
                        q, r = divmod(self.S[i][t], pivot)
                        self.add_row(i, t, -q)
                        clean = clean and not r
                for j in range(t + 1, self.m):
                    if self.S[t][j]:
                        q, r = divmod(self.S[t][j], pivot)
                        self.add_col(j, t, -q)
                        clean = clean and not r
                if not clean:
                    continue

                offender = self._find_non_multiple(t)
                if offender is not None:
                    self.add_row(t, offender, RING.one)
                    continue
                break

            lc = self.S[t][t].LC
            if lc != 1:
                self.scale_row(t, QQ.one / lc)
            invariants.append(self.S[t][t])
            logger.debug(f"Smith pivot {t}: {poly_to_str(self.S[t][t])}")
        return invariants


def smith_form(P: PolyMatrix, with_transforms: bool = False) -> SmithForm:
    """
    Smith normal form of P over QQ[l].

    Args:
        P: Polynomial matrix
        with_transforms: Also return unimodular U, V (and inverses) with U P V diagonal

    Returns:
        SmithForm with monic invariant polynomials d_1 | ... | d_r
    """
    eliminator = _SmithEliminator(P, with_transforms)
    invariants = eliminator.run()
    if not with_transforms:
        return SmithForm(tuple(invariants), len(invariants), P.rows, P.cols)
    return SmithForm(
        tuple(invariants), len(invariants), P.rows, P.cols,
        U=PolyMatrix.from_rows(eliminator.U, P.rows),
        V=PolyMatrix.from_rows(eliminator.V, P.cols),
        U_inv=PolyMatrix.from_rows(eliminator.U_inv, P.rows),
        V_inv=PolyMatrix.from_rows(eliminator.V_inv, P.cols),
    )


def smith_via_minors(P: PolyMatrix) -> SmithForm:
    """Invariant polynomials as quotients of determinantal divisors; test oracle only."""
    invariants = []
    previous = RING.one
    for k in range(1, min(P.rows, P.cols) + 1):
        divisor = RING.zero
        for rows in combinations(range(P.rows), k):
            for cols in combinations(range(P.cols), k):
                minor = determinant(P.submatrix(rows, cols))
                if minor:
                    divisor = minor if not divisor else divisor.gcd(minor)
        if not divisor:
            break
        divisor = divisor.monic()
        invariants.append(divisor.exquo(previous))
        previous = divisor
    return SmithForm(tuple(invariants), len(invariants), P.rows, P.cols)


@dataclass(frozen=True)
class ElementaryDivisors:
    """Partial multiplicities of (l - point) across the invariant polynomials, ascending."""
    point: Point
    multiplicities: Tuple[int, ...]

    def __bool__(self) -> bool:
        return bool(self.multiplicities)


def local_elementary_divisors(P: Union[PolyMatrix, SmithForm], x: Scalar) -> ElementaryDivisors:
    """Elementary divisors of P at the rational point x (zeros omitted)."""
    x = to_rat(x)
    form = P if isinstance(P, SmithForm) else smith_form(P)
    mults = [root_multiplicity(d, x) for d in form.invariant_polys]
    return ElementaryDivisors(Point(x), tuple(sorted(k for k in mults if k > 0)))


def elementary_divisors(P: Union[PolyMatrix, SmithForm]) -> Dict[Poly, Tuple[int, ...]]:
    """Elementary divisors keyed by monic irreducible factor over QQ."""
    form = P if isinstance(P, SmithForm) else smith_form(P)
    result: Dict[Poly, List[int]] = {}
    for d in form.invariant_polys:
        for factor, k in irreducible_factors(d):
            result.setdefault(factor, []).append(k)
    return {f: tuple(sorted(ks)) for f, ks in result.items()}


def is_unimodular(P: PolyMatrix) -> bool:
    if not P.is_square():
        raise DimensionError(f"unimodularity needs a square matrix, got {P.shape}")
    det = determinant(P)
    return bool(det) and det.degree() == 0


def is_minimal_basis(K: PolyMatrix) -> bool:
    """
    True iff the rows of K form a minimal basis: full row rank at every point
    (Smith form [I 0]) and a full row rank highest-row-degree coefficient matrix.
    """
    if K.rows >= K.cols:
        raise DimensionError(f"minimal basis test needs rows < cols, got {K.shape}")
    form = smith_form(K)
    if form.rank != K.rows or any(d != RING.one for d in form.invariant_polys):
        return False
    return dm_rank(K.highest_row_degree_coefficient().constant_part()) == K.rows


def reversal(P: PolyMatrix, g: int):
    """
    l^g P(1/l).

    Returns a PolyMatrix when g >= deg P, otherwise a RatMatrix.
    """
    if g >= P.degree():
        return PolyMatrix(P.rows, P.cols, tuple(
            tuple(poly_reverse(e, g) for e in row) for row in P.entries
        ))
    from .ratmat import RatMatrix, g_reversal
    return g_reversal(RatMatrix.from_poly(P), g)


def pencil(A0: PolyMatrix, A1: PolyMatrix) -> PolyMatrix:
    """A0 + l*A1."""
    return A0 + A1.scale(LAMBDA)
