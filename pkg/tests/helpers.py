"""Builders shared by the test modules."""

import random
from typing import List, Optional, Sequence

from src.errors import StateMatrixSingularError
from src.formats import parse_poly, parse_ratfun
from src.polymat import PolyMatrix
from src.psm import Psm
from src.ratmat import RatMatrix
from src.scalars import LAMBDA, RING, Poly, poly_from_coeffs, reduce


def pm(rows: Sequence[Sequence], cols: Optional[int] = None) -> PolyMatrix:
    """PolyMatrix from literals such as ``"l^2 - 1"`` or plain ints."""
    return PolyMatrix.from_rows([[parse_poly(str(e)) for e in row] for row in rows], cols)


def rm(rows: Sequence[Sequence], cols: Optional[int] = None) -> RatMatrix:
    return RatMatrix.from_rows([[parse_ratfun(str(e)) for e in row] for row in rows], cols)


def random_poly(rng: random.Random, degree: int, bound: int = 3) -> Poly:
    return poly_from_coeffs([rng.randint(-bound, bound) for _ in range(degree + 1)])


def random_polymatrix(rng: random.Random, rows: int, cols: int, degree: int, bound: int = 3) -> PolyMatrix:
    return PolyMatrix.from_rows(
        [[random_poly(rng, rng.randint(0, degree), bound) for _ in range(cols)] for _ in range(rows)], cols
    )


def random_ratmatrix(rng: random.Random, rows: int, cols: int) -> RatMatrix:
    """Entries num/den with small random numerators and monic linear or constant denominators."""
    grid = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            num = random_poly(rng, rng.randint(0, 2))
            den = RING.one if rng.random() < 0.5 else LAMBDA - rng.randint(-2, 2)
            row.append(reduce(num, den))
        grid.append(row)
    return RatMatrix.from_rows(grid, cols)


def random_linear_psm(rng: random.Random, n: int, extra: int, attempts: int = 50) -> Psm:
    """A degree <= 1 system matrix of size (n + extra) with a nonsingular leading n x n state."""
    size = n + extra
    for _ in range(attempts):
        P = random_polymatrix(rng, size, size, 1, bound=2)
        try:
            return Psm(P, tuple(range(n)), tuple(range(n)))
        except StateMatrixSingularError:
            continue
    raise RuntimeError("could not draw a nonsingular state matrix")


def eigen_set(report) -> List:
    """Order-insensitive view of an EigenvalueReport."""
    return sorted(
        [("rat", e.value, e.zero_mults) for e in report.rational]
        + [("sym", str(e.factor), e.zero_mults) for e in report.symbolic],
        key=str,
    )
