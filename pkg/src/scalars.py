"""
Exact Scalars

Rational numbers, univariate polynomials over QQ and reduced rational
functions, the scalars every matrix in ratlin is built from.

Features:
- Rat is sympy's QQ element type (arbitrary precision, always reduced)
- Poly is a sympy sparse ring element in the variable ``l``
- RatFun keeps a reduced fraction with monic denominator
- Valuations at rational points and at infinity
- Factorization into monic irreducibles over QQ
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, Union

from sympy import QQ, Rational
from sympy.polys.rings import ring, PolyElement

from .errors import FormatError, PolyGcdError, ZeroDivisorError

logger = logging.getLogger(__name__)

RING, LAMBDA = ring("l", QQ)
Rat = type(QQ(0))
Poly = PolyElement



class ZeroDegree:
    """Degree of the zero polynomial: ordered below every integer, rejected by arithmetic."""

    _instance: Optional["ZeroDegree"] = None

    def __new__(cls) -> "ZeroDegree":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ZERO_DEGREE"

    def __lt__(self, other: object) -> bool:
        return other is not self

    def __le__(self, other: object) -> bool:
        return True

    def __gt__(self, other: object) -> bool:
        return False

    def __ge__(self, other: object) -> bool:
        return other is self


ZERO_DEGREE = ZeroDegree()
Degree = Union[int, ZeroDegree]

# Valuation of the zero function.
INFINITE_ORDER = math.inf

Scalar = Union[int, Rat, str]


def to_rat(value: Scalar) -> Rat:
    """Convert an int, a Rat or a literal like ``'-3/4'`` to a Rat."""
    if isinstance(value, str):
        text = value.strip()
        try:
            return QQ.from_sympy(Rational(text))
        except (TypeError, ValueError) as e:
            raise FormatError(f"not a rational literal: {value!r}") from e
    return QQ.convert(value)


def rat_to_str(value: Rat) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def poly_from_coeffs(coeffs: Iterable[Scalar]) -> Poly:
    """Build a polynomial from coefficients listed lowest degree first."""
    terms = {}
    for k, c in enumerate(coeffs):
        c = to_rat(c)
        if c:
            terms[(k,)] = c
    return RING.from_dict(terms)


def poly_coeffs(p: Poly) -> List[Rat]:
    """Dense coefficient list, lowest degree first; empty for the zero polynomial."""
    if not p:
        return []
    return [p.get((k,), QQ.zero) for k in range(p.degree() + 1)]


def const_poly(c: Scalar) -> Poly:
    return RING.ground_new(to_rat(c))


def linear_factor(root: Rat) -> Poly:
    """The monic polynomial l - root."""
    return LAMBDA - RING.ground_new(root)


def degree(p: Poly) -> Degree:
    return p.degree() if p else ZERO_DEGREE


def poly_reverse(p: Poly, d: Optional[int] = None) -> Poly:
    """l^d p(1/l); d defaults to deg p and must not be smaller than it."""
    if not p:
        return p
    if d is None:
        d = p.degree()
    if d < p.degree():
        raise ValueError(f"reversal degree {d} below polynomial degree {p.degree()}")
    return RING.from_dict({(d - k,): c for (k,), c in p.items()})


def poly_sort_key(p: Poly) -> Tuple:
    coeffs = poly_coeffs(p)
    return (len(coeffs), tuple(reversed(coeffs)))


def poly_to_str(p: Poly) -> str:
    """Render as ``c*l^k`` terms, highest degree first."""
    if not p:
        return "0"
    pieces = []
    for k in sorted((m[0] for m in p.keys()), reverse=True):
        c = p[(k,)]
        sign = "-" if c < 0 else "+"
        magnitude = -c if c < 0 else c
        if k == 0:
            body = rat_to_str(magnitude)
        else:
            power = "l" if k == 1 else f"l^{k}"
            body = power if magnitude == 1 else f"{rat_to_str(magnitude)}*{power}"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor; undefined for two zero polynomials."""
    if not a and not b:
        raise PolyGcdError()
    return a.gcd(b).monic()


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return RING.zero
    return a.lcm(b).monic()


def root_multiplicity(p: Poly, root: Rat) -> Union[int, float]:
    """Multiplicity of l - root in p; infinite for the zero polynomial."""
    if not p:
        return INFINITE_ORDER
    factor = linear_factor(root)
    count = 0
    while p(root) == 0:
        p = p.exquo(factor)
        count += 1
    return count


def irreducible_factors(p: Poly) -> List[Tuple[Poly, int]]:
    """Monic irreducible factors over QQ with multiplicities, in a stable order."""
    if not p or p.degree() <= 0:
        return []
    _, factors = p.factor_list()
    monic = [(f.monic(), k) for f, k in factors if f.degree() > 0]
    return sorted(monic, key=lambda item: poly_sort_key(item[0]))


def rational_roots(p: Poly) -> List[Tuple[Rat, int]]:
    """Rational roots of p in ascending order, with multiplicities."""
    roots = []
    for f, k in irreducible_factors(p):
        if f.degree() == 1:
            roots.append((-f.get((0,), QQ.zero), k))
    return sorted(roots, key=lambda item: item[0])


@dataclass(frozen=True)
class Point:
    """A rational point of the line, or the point at infinity (value None)."""
    value: Optional[Rat] = None

    @classmethod
    def finite(cls, value: Scalar) -> "Point":
        return cls(to_rat(value))

    @classmethod
    def parse(cls, text: str) -> "Point":
        text = text.strip()
        if text.lower() in ("inf", "infinity", "oo"):
            return INFINITY
        return cls.finite(text)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def sort_key(self) -> Tuple:
        return (1, QQ.zero) if self.value is None else (0, self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else rat_to_str(self.value)


INFINITY = Point(None)


@dataclass(frozen=True)
class RatFun:
    """
    Reduced rational function num/den.

    Instances built through ``reduce`` satisfy: den monic, gcd(num, den) = 1,
    and zero is stored as 0/1, so equality is structural.
    """
    num: Poly
    den: Poly

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFun":
        return cls(p, RING.one)

    @classmethod
    def constant(cls, c: Scalar) -> "RatFun":
        return cls(const_poly(c), RING.one)

    @classmethod
    def zero(cls) -> "RatFun":
        return cls(RING.zero, RING.one)

    @classmethod
    def one(cls) -> "RatFun":
        return cls(RING.one, RING.one)

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den == RING.one

    def degree(self) -> Degree:
        """deg num - deg den; the zero sentinel for 0."""
        if not self.num:
            return ZERO_DEGREE
        return self.num.degree() - self.den.degree()

    def is_proper(self) -> bool:
        return valuation_at_infinity(self) >= 0

    def is_strictly_proper(self) -> bool:
        return valuation_at_infinity(self) > 0

    def is_biproper(self) -> bool:
        return valuation_at_infinity(self) == 0

    def evaluate(self, x: Scalar) -> Rat:
        x = to_rat(x)
        d = self.den(x)
        if d == 0:
            raise ZeroDivisorError(f"rational function {self} has a pole at {rat_to_str(x)}")
        return self.num(x) / d

    def compose_reciprocal(self, g: int) -> "RatFun":
        """l^g f(1/l), reduced."""
        if not self.num:
            return self
        shift = g + self.den.degree() - self.num.degree()
        num = poly_reverse(self.num)
        den = poly_reverse(self.den)
        if shift >= 0:
            num = num * LAMBDA ** shift
        else:
            den = den * LAMBDA ** (-shift)
        return reduce(num, den)

    def __add__(self, other: "RatFun") -> "RatFun":
        other = _coerce(other)
        if self.den == other.den:
            return reduce(self.num + other.num, self.den)
        return reduce(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den)

    def __sub__(self, other: "RatFun") -> "RatFun":
        return self + (-_coerce(other))

    def __rsub__(self, other: "RatFun") -> "RatFun":
        return _coerce(other) - self

    def __mul__(self, other: "RatFun") -> "RatFun":
        other = _coerce(other)
        if not self.num or not other.num:
            return RatFun.zero()
        return reduce(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatFun") -> "RatFun":
        other = _coerce(other)
        if not other.num:
            raise ZeroDivisorError()
        return reduce(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: "RatFun") -> "RatFun":
        return _coerce(other) / self

    def __pow__(self, k: int) -> "RatFun":
        if k >= 0:
            return RatFun(self.num ** k, self.den ** k)
        if not self.num:
            raise ZeroDivisorError()
        return reduce(self.den ** (-k), self.num ** (-k))

    def __str__(self) -> str:
        if self.den == RING.one:
            return poly_to_str(self.num)
        return f"({poly_to_str(self.num)}) / ({poly_to_str(self.den)})"


def _coerce(value) -> RatFun:
    if isinstance(value, RatFun):
        return value
    if isinstance(value, PolyElement):
        return RatFun.from_poly(value)
    return RatFun.constant(value)


def reduce(num: Poly, den: Poly) -> RatFun:
    """
    Reduced representative of num/den.

    Args:
        num: Numerator polynomial
        den: Denominator polynomial, nonzero

    Returns:
        RatFun with gcd(num, den) = 1 and den monic; zero becomes 0/1

    Raises:
        ZeroDivisorError: den is the zero polynomial
    """
    if not den:
        raise ZeroDivisorError()
    if not num:
        return RatFun(RING.zero, RING.one)
    g = num.gcd(den)
    if g.degree() > 0:
        num = num.exquo(g)
        den = den.exquo(g)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return RatFun(num, den)


def ratfun(value: Union[RatFun, Poly, Scalar]) -> RatFun:
    """Coerce ints, Rats, literals and polynomials to RatFun."""
    return _coerce(to_rat(value) if isinstance(value, str) else value)


def valuation_at(f: RatFun, x: Scalar) -> Union[int, float]:
    """Order of f at the rational point x: positive for zeros, negative for poles."""
    if not f.num:
        return INFINITE_ORDER
    x = to_rat(x)
    return root_multiplicity(f.num, x) - root_multiplicity(f.den, x)


def valuation_at_infinity(f: RatFun) -> Union[int, float]:
    """deg den - deg num; nonnegative exactly for proper functions."""
    if not f.num:
        return INFINITE_ORDER
    return f.den.degree() - f.num.degree()


def valuation(f: RatFun, point: Point) -> Union[int, float]:
    if point.is_infinite:
        return valuation_at_infinity(f)
    return valuation_at(f, point.value)
