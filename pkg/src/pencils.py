"""
Pencil Families

Constructors and dedicated minimality criteria for the linear polynomial
system matrices used on rational eigenvalue problems: the Saad pencil for a
pencil plus simple poles, the Su-Bai pencil for a polynomial plus a proper
state-space part, and the NLEIGS pencils in their basic and low-rank forms.

Features:
- Validated parameter records with the derived scalar functions g_i, h_j, b_i
- Each build returns the target, the pencil, its system-matrix and block full rank views and the dual basis
- Identity self-checks (transfer function, duality, associated rational matrix)
- NLEIGS minimality criteria evaluated on small matrices at the finite poles
- Pole structure of the NLEIGS state matrix, region and grade certificates
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from sympy import QQ

from .errors import (
    DimensionError, LowRankFactorError, NodePoleCoincidenceError, ParameterError,
)
from .fullrank import (
    BlockFullRank, DualBasisPair, associated_rational, check_duality,
    linearization_at_infinity_grade, linearization_region,
)
from .linearize import Verdict
from .polymat import PolyMatrix, block_diag, dm_rank, hstack, vstack
from .psm import Psm, transfer_function
from .ratmat import ALL, RatMatrix, Region, hstack as rat_hstack, poly_solve, value_at
from .scalars import (
    LAMBDA, RING, Point, Poly, Rat, RatFun, Scalar, linear_factor, rat_to_str, reduce, to_rat,
)

logger = logging.getLogger(__name__)

CRITERIA = ("full", "infinite_head", "square")


def _constant(P: PolyMatrix, name: str) -> None:
    if P.degree() > 0:
        raise ParameterError(f"{name} must be a constant matrix, got degree {P.degree()}")


def _check_shape(P: PolyMatrix, shape: Tuple[int, int], name: str) -> None:
    if P.shape != shape:
        raise DimensionError(f"{name} is {P.rows}x{P.cols}, expected {shape[0]}x{shape[1]}")
    _constant(P, name)


def _scaled_identity(size: int, factor) -> PolyMatrix:
    return PolyMatrix.identity(size).scale(factor)


def _rat_scaled_identity(size: int, factor) -> RatMatrix:
    return RatMatrix.identity(size).scale(factor)


def _as_point(value: Union[Point, Scalar]) -> Point:
    if isinstance(value, Point):
        return value
    if isinstance(value, str):
        return Point.parse(value)
    return Point.finite(value)


# -- Saad ---------------------------------------------------------------------


@dataclass(frozen=True)
class SaadParams:
    """G = l A0 - B0 + sum B_i / (l - sigma_i), all blocks m x m and constant."""
    A0: PolyMatrix
    B0: PolyMatrix
    B: Tuple[PolyMatrix, ...] = ()
    sigma: Tuple[Rat, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(self.B))
        object.__setattr__(self, "sigma", tuple(to_rat(s) for s in self.sigma))
        if len(self.B) != len(self.sigma):
            raise DimensionError(f"{len(self.B)} residue matrices for {len(self.sigma)} poles")
        shape = (self.A0.rows, self.A0.rows)
        _check_shape(self.A0, shape, "A0")
        _check_shape(self.B0, shape, "B0")
        for i, block in enumerate(self.B, 1):
            _check_shape(block, shape, f"B{i}")
        if len(set(self.sigma)) != len(self.sigma):
            raise ParameterError(f"duplicate poles in sigma: {[rat_to_str(s) for s in self.sigma]}")

    @property
    def m(self) -> int:
        return self.A0.rows

    @property
    def s(self) -> int:
        return len(self.sigma)


@dataclass(frozen=True)
class SaadBuild:
    G: RatMatrix
    psm: Psm
    fullrank_view: BlockFullRank
    N1: RatMatrix

    @property
    def pencil(self) -> PolyMatrix:
        return self.psm.P

    def identities(self) -> Dict[str, bool]:
        return {
            "transfer": transfer_function(self.psm) == self.G,
            "associated": associated_rational(self.fullrank_view, self.N1) == self.G,
        }


def saad_build(params: SaadParams) -> SaadBuild:
    """
    Saad pencil with state diag((l - sigma_i) I) in its leading block rows.

    The block full rank view takes those rows as K1 (placed first) and the
    last block row as M, with N1 = [I/(sigma_1 - l), ..., I/(sigma_s - l), I].
    """
    m = params.m
    head = params.A0.scale(LAMBDA) - params.B0
    G = RatMatrix.from_poly(head)
    for B_i, sigma_i in zip(params.B, params.sigma):
        G = G + RatMatrix.from_poly(B_i).scale(reduce(RING.one, linear_factor(sigma_i)))

    if params.s == 0:
        return SaadBuild(G, Psm(head), BlockFullRank(head), RatMatrix.identity(m))

    state = block_diag(*[_scaled_identity(m, linear_factor(x)) for x in params.sigma])
    K1 = hstack(state, vstack(*[PolyMatrix.identity(m)] * params.s))
    M = hstack(*[-B_i for B_i in params.B], head)
    n = params.s * m
    psm = Psm(vstack(K1, M), tuple(range(n)), tuple(range(n)))
    N1 = rat_hstack(
        *[_rat_scaled_identity(m, reduce(RING.one, -linear_factor(x))) for x in params.sigma],
        RatMatrix.identity(m),
    )
    logger.debug(f"Saad pencil: m={m}, s={params.s}, size {psm.P.rows}x{psm.P.cols}")
    return SaadBuild(G, psm, BlockFullRank(M, K1, k1_first=True), N1)


# -- shared reports -----------------------------------------------------------


@dataclass(frozen=True)
class PoleCheck:
    """Rank test of a criterion matrix at one pole (or node, for Saad)."""
    index: int
    value: Rat
    passes: bool


@dataclass(frozen=True)
class MinimalityReport:
    verdict: Verdict
    checks: Tuple[PoleCheck, ...] = ()
    criterion: str = "full"
    conclusive: bool = True
    caveat: Optional[str] = None


@dataclass(frozen=True)
class FamilyCertificate:
    """What a family pencil linearizes, where, at infinity, and its minimality report."""
    target: RatMatrix
    region: Region
    infinity: Verdict
    minimality: Optional[MinimalityReport] = None
    caveats: Tuple[str, ...] = ()


def saad_minimality(params: SaadParams) -> MinimalityReport:
    """The Saad pencil is minimal in all of F iff every B_i is nonsingular."""
    checks = tuple(
        PoleCheck(i, x, dm_rank(B_i.constant_part()) == params.m)
        for i, (B_i, x) in enumerate(zip(params.B, params.sigma), 1)
    )
    failed = [c for c in checks if not c.passes]
    if failed:
        first = failed[0]
        witness = f"B_{first.index} is singular: not minimal at sigma_{first.index} = {rat_to_str(first.value)}"
        return MinimalityReport(Verdict(False, witness), checks, "residues")
    return MinimalityReport(Verdict(True, region=ALL), checks, "residues")


def saad_certificate(params: SaadParams) -> FamilyCertificate:
    built = saad_build(params)
    G, region = linearization_region(built.fullrank_view, built.N1)
    infinity = linearization_at_infinity_grade(built.fullrank_view, built.N1, None, 0, 0)
    return FamilyCertificate(G, region, infinity, saad_minimality(params))


# -- Su-Bai -------------------------------------------------------------------


@dataclass(frozen=True)
class SuBaiParams:
    """G = D_q l^q + ... + D_1 l + D_0 + C (l I - A)^{-1} B with q >= 2."""
    D: Tuple[PolyMatrix, ...]
    A: PolyMatrix
    B: PolyMatrix
    C: PolyMatrix

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(self.D))
        if len(self.D) < 3:
            raise ParameterError(f"need D_0..D_q with q >= 2, got {len(self.D)} coefficients")
        p, m = self.D[0].shape
        n = self.A.rows
        for k, block in enumerate(self.D):
            _check_shape(block, (p, m), f"D{k}")
        _check_shape(self.A, (n, n), "A")
        _check_shape(self.B, (n, m), "B")
        _check_shape(self.C, (p, n), "C")
        if self.D[-1].is_zero():
            raise ParameterError("leading coefficient D_q is zero")

    @property
    def q(self) -> int:
        return len(self.D) - 1

    @property
    def p(self) -> int:
        return self.D[0].rows

    @property
    def m(self) -> int:
        return self.D[0].cols

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def state_pencil(self) -> PolyMatrix:
        return _scaled_identity(self.n, LAMBDA) - self.A


@dataclass(frozen=True)
class SuBaiBuild:
    G: RatMatrix
    pencil: PolyMatrix
    psm_full_state: Psm
    psm_pencil_state: Psm
    fullrank_view: BlockFullRank
    N1: RatMatrix
    q: int

    def identities(self) -> Dict[str, bool]:
        return {
            "transfer": transfer_function(self.psm_full_state) == self.G,
            "duality": check_duality(DualBasisPair(self.fullrank_view.K1, self.N1)),
            "associated": associated_rational(self.fullrank_view, self.N1) == self.G,
        }


def subai_build(params: SuBaiParams) -> SuBaiBuild:
    """
    Su-Bai pencil and its three views.

    Column blocks are (l D_q + D_{q-1}, D_{q-2}, ..., D_0 | -C); the first p rows
    carry them, then q - 1 block rows [.. -I, l I ..] and finally [.. B | l I - A].
    The full state is everything except the first p rows and the D_0 column block.
    """
    q, p, m, n = params.q, params.p, params.m, params.n
    D = params.D
    G = RatMatrix.from_poly(_sum_scaled(D)) + (
        RatMatrix.from_poly(params.C) @ poly_solve(params.state_pencil, params.B)
    )

    top = hstack(D[q].scale(LAMBDA) + D[q - 1], *[D[q - 1 - k] for k in range(1, q)], -params.C)
    chain_rows = []
    for k in range(q - 1):
        blocks = [PolyMatrix.zeros(m, m) for _ in range(q)] + [PolyMatrix.zeros(m, n)]
        blocks[k] = -PolyMatrix.identity(m)
        blocks[k + 1] = _scaled_identity(m, LAMBDA)
        chain_rows.append(hstack(*blocks))
    bottom = hstack(*[PolyMatrix.zeros(n, m) for _ in range(q - 1)], params.B, params.state_pencil)
    K1 = vstack(*chain_rows, bottom)
    L = vstack(top, K1)

    state_rows = tuple(range(p, L.rows))
    state_cols = tuple(range((q - 1) * m)) + tuple(range(q * m, q * m + n))
    full_state = Psm(L, state_rows, state_cols)
    pencil_state = Psm(L, tuple(range(L.rows - n, L.rows)), tuple(range(q * m, q * m + n)))

    N1 = rat_hstack(
        *[RatMatrix.from_poly(_scaled_identity(m, LAMBDA ** (q - 1 - k))) for k in range(q)],
        -poly_solve(params.state_pencil, params.B).transpose(),
    )
    logger.debug(f"Su-Bai pencil: q={q}, p={p}, m={m}, n={n}, size {L.rows}x{L.cols}")
    return SuBaiBuild(G, L, full_state, pencil_state, BlockFullRank(top, K1), N1, q)


def _sum_scaled(D: Sequence[PolyMatrix]) -> PolyMatrix:
    """sum D_k l^k."""
    total = D[0]
    for k in range(1, len(D)):
        total = total + D[k].scale(LAMBDA ** k)
    return total


def subai_inverse_last_columns(params: SuBaiParams) -> RatMatrix:
    """
    Closed form of the last two block columns of A(l)^{-1} for the full state:
    [-l^{q-2} I; ...; -l I; -I; 0] and [0; (l I - A)^{-1}].
    """
    q, m, n = params.q, params.m, params.n
    column = PolyMatrix.block([[_scaled_identity(m, -(LAMBDA ** (q - 2 - k)))] for k in range(q - 1)])
    resolvent = poly_solve(params.state_pencil, PolyMatrix.identity(n))
    return RatMatrix.block([
        [RatMatrix.from_poly(column), RatMatrix.zeros((q - 1) * m, n)],
        [RatMatrix.zeros(n, m), resolvent],
    ])


def subai_minimal_at_infinity(params: SuBaiParams) -> bool:
    """The full-state system matrix is minimal at infinity iff D_q has full column rank."""
    return dm_rank(params.D[-1].constant_part()) == params.m


def subai_certificate(params: SuBaiParams) -> FamilyCertificate:
    built = subai_build(params)
    G, region = linearization_region(built.fullrank_view, built.N1)
    infinity = linearization_at_infinity_grade(built.fullrank_view, built.N1, None, built.q - 1, 0)
    at_infinity = subai_minimal_at_infinity(params)
    witness = "" if at_infinity else "D_q lacks full column rank: full-state system matrix not minimal at inf"
    report = MinimalityReport(Verdict(at_infinity, witness), (), "infinity")
    return FamilyCertificate(G, region, infinity, report)


# -- NLEIGS -------------------------------------------------------------------


@dataclass(frozen=True)
class NleigsParams:
    """
    Nodes sigma_0..sigma_{N-1}, poles xi_1..xi_N (finite nonzero or infinite)
    and scalings beta_0..beta_N. Tuples are 0-based: xi[0] is xi_1.
    """
    sigma: Tuple[Rat, ...]
    xi: Tuple[Point, ...]
    beta: Tuple[Rat, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(to_rat(s) for s in self.sigma))
        object.__setattr__(self, "xi", tuple(_as_point(x) for x in self.xi))
        object.__setattr__(self, "beta", tuple(to_rat(b) for b in self.beta))
        N = len(self.sigma)
        if N < 1:
            raise ParameterError("need at least one node")
        if len(self.xi) != N or len(self.beta) != N + 1:
            raise ParameterError(
                f"need N poles and N + 1 scalings for N = {N} nodes, "
                f"got {len(self.xi)} and {len(self.beta)}"
            )
        for i, b in enumerate(self.beta):
            if not b:
                raise ParameterError(f"scaling beta_{i} is zero")
        for i, x in enumerate(self.xi, 1):
            if not x.is_infinite and not x.value:
                raise ParameterError(f"pole xi_{i} is zero")

    @property
    def N(self) -> int:
        return len(self.sigma)

    @property
    def i_N(self) -> int:
        """Number of infinite poles among xi_1..xi_N."""
        return sum(1 for x in self.xi if x.is_infinite)

    def pole_factor(self, i: int) -> Poly:
        """1 - l/xi_i, which is 1 for an infinite pole."""
        x = self.xi[i - 1]
        if x.is_infinite:
            return RING.one
        return RING.one - LAMBDA.mul_ground(QQ.one / x.value)

    def g(self, i: int) -> Poly:
        return self.pole_factor(i).mul_ground(self.beta[i])

    def h(self, j: int) -> Poly:
        return linear_factor(self.sigma[j])

    def b(self, i: int) -> RatFun:
        return nleigs_b(self, i)

    def finite_poles(self, upto: int) -> List[Tuple[int, Rat]]:
        """(k, xi_k) for the finite poles with k <= upto."""
        return [(k, x.value) for k, x in enumerate(self.xi[:upto], 1) if not x.is_infinite]

    def coincidence(self) -> Optional[Tuple[int, int, Rat]]:
        """First (node index j, pole index i, value) with xi_i = sigma_j."""
        for i, x in enumerate(self.xi, 1):
            for j, s in enumerate(self.sigma):
                if not x.is_infinite and x.value == s:
                    return j, i, s
        return None


def nleigs_b(params: NleigsParams, i: int) -> RatFun:
    """
    b_0 = 1/beta_0 and b_k = b_{k-1} h_{k-1} / g_k.

    Raises:
        ParameterError: i outside 0..N
    """
    if not 0 <= i <= params.N:
        raise ParameterError(f"b index {i} out of range 0..{params.N}")
    b = RatFun.constant(QQ.one / params.beta[0])
    for k in range(1, i + 1):
        b = b * reduce(params.h(k - 1), params.g(k))
    return b


@dataclass(frozen=True)
class NleigsBasic:
    params: NleigsParams
    D: Tuple[PolyMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(self.D))
        if len(self.D) != self.params.N + 1:
            raise DimensionError(f"need {self.params.N + 1} coefficients D_0..D_N, got {len(self.D)}")
        m = self.D[0].rows
        for k, block in enumerate(self.D):
            _check_shape(block, (m, m), f"D{k}")

    @property
    def m(self) -> int:
        return self.D[0].rows


@dataclass(frozen=True)
class NleigsLowRank:
    """
    Q~ = sum_{i<=p} b_i D~_i + sum_{i>p} b_i L~_i U~^T. ``Lt`` holds
    L~_{p+1}..L~_N in order.
    """
    params: NleigsParams
    Dt: Tuple[PolyMatrix, ...]
    Lt: Tuple[PolyMatrix, ...]
    Ut: PolyMatrix
    p: int

    def __post_init__(self):
        object.__setattr__(self, "Dt", tuple(self.Dt))
        object.__setattr__(self, "Lt", tuple(self.Lt))
        N = self.params.N
        if not 0 <= self.p < N:
            raise ParameterError(f"split index p = {self.p} outside 0..{N - 1}")
        if len(self.Dt) != self.p + 1 or len(self.Lt) != N - self.p:
            raise DimensionError(
                f"need {self.p + 1} full-rank and {N - self.p} low-rank coefficients, "
                f"got {len(self.Dt)} and {len(self.Lt)}"
            )
        m, r = self.Ut.shape
        if not 0 < r <= m:
            raise DimensionError(f"low-rank factor U~ is {m}x{r}; need 0 < r <= m")
        _constant(self.Ut, "U~")
        for k, block in enumerate(self.Dt):
            _check_shape(block, (m, m), f"D~{k}")
        for k, block in enumerate(self.Lt, self.p + 1):
            _check_shape(block, (m, r), f"L~{k}")

    @property
    def m(self) -> int:
        return self.Ut.rows

    @property
    def r(self) -> int:
        return self.Ut.cols

    def L(self, i: int) -> PolyMatrix:
        return self.Lt[i - self.p - 1]

    def as_basic(self) -> NleigsBasic:
        """The same Q~ written with full coefficients D_i = L~_i U~^T for i > p."""
        Uh = self.Ut.transpose()
        return NleigsBasic(self.params, self.Dt + tuple(L @ Uh for L in self.Lt))


@dataclass(frozen=True)
class NleigsBuild:
    """
    Q, the pencil, its system-matrix view (state = K block without the first
    block column), its block full rank view and the dual basis. ``p`` is the
    low-rank split (N - 1 for the basic family).
    """
    params: NleigsParams
    p: int
    Q: RatMatrix
    pencil: PolyMatrix
    psm_view: Psm
    fullrank_view: BlockFullRank
    N: RatMatrix

    @property
    def transfer_scale(self) -> Poly:
        """beta_0 (1 - l/xi_N): the transfer function of psm_view is this times Q."""
        return self.params.pole_factor(self.params.N).mul_ground(self.params.beta[0])

    @property
    def state_matrix(self) -> PolyMatrix:
        return self.psm_view.state_matrix

    def identities(self) -> Dict[str, bool]:
        checks = {
            "transfer": transfer_function(self.psm_view) == self.Q.scale(self.transfer_scale),
            "associated": associated_rational(self.fullrank_view, self.N) == self.Q,
        }
        if self.fullrank_view.K1 is not None:
            checks["duality"] = check_duality(DualBasisPair(self.fullrank_view.K1, self.N))
        return checks


def _rational_sum(params: NleigsParams, D: Sequence[PolyMatrix]) -> RatMatrix:
    total = RatMatrix.from_poly(D[0]).scale(nleigs_b(params, 0))
    for i in range(1, len(D)):
        total = total + RatMatrix.from_poly(D[i]).scale(nleigs_b(params, i))
    return total


def _assemble_nleigs(params: NleigsParams, p: int, blocks: Sequence[PolyMatrix],
                     Ut: Optional[PolyMatrix]) -> Tuple[PolyMatrix, Optional[PolyMatrix], RatMatrix]:
    """
    M, K and the dual basis for coefficient blocks X_0..X_N where X_i is
    m x m for i <= p and m x r (paired with U~) for i > p.
    """
    N = params.N
    m = blocks[0].rows
    widths = [block.cols for block in blocks[:N]]

    f = params.pole_factor(N)
    top = [block.scale(f) for block in blocks[:N]]
    top[-1] = top[-1] + blocks[N].scale(params.h(N - 1).mul_ground(QQ.one / params.beta[N]))
    M = hstack(*top)

    rows = []
    for j in range(N - 1):
        height = widths[j + 1]
        row = [PolyMatrix.zeros(height, w) for w in widths]
        if j == p:
            row[j] = Ut.transpose().scale(-params.h(j))
        else:
            row[j] = _scaled_identity(height, -params.h(j))
        row[j + 1] = _scaled_identity(height, params.g(j + 1))
        rows.append(hstack(*row))
    K = vstack(*rows) if rows else None

    inverse_factor = reduce(RING.one, f)
    dual = []
    for i in range(N):
        coefficient = nleigs_b(params, i) * inverse_factor
        if i <= p:
            dual.append(_rat_scaled_identity(m, coefficient))
        else:
            dual.append(RatMatrix.from_poly(Ut).scale(coefficient))
    return M, K, rat_hstack(*dual)


def _finish_build(params: NleigsParams, p: int, Q: RatMatrix, M: PolyMatrix,
                  K: Optional[PolyMatrix], N_dual: RatMatrix) -> NleigsBuild:
    view = BlockFullRank(M, K)
    L = view.pencil
    m = M.rows
    psm_view = Psm(L, tuple(range(m, L.rows)), tuple(range(m, L.cols)))
    logger.debug(f"NLEIGS pencil: N={params.N}, p={p}, size {L.rows}x{L.cols}")
    return NleigsBuild(params, p, Q, L, psm_view, view, N_dual)


def nleigs_build(basic: NleigsBasic) -> NleigsBuild:
    """
    Basic NLEIGS pencil [M_N; K_N] for Q_N = sum b_i D_i.

    M_N = [g_N/beta_N D_0, ..., g_N/beta_N D_{N-1} + h_{N-1}/beta_N D_N] and
    K_N has block rows (-h_j I, g_{j+1} I) on the block diagonal and the one above it.
    """
    params = basic.params
    Q = _rational_sum(params, basic.D)
    M, K, N_dual = _assemble_nleigs(params, params.N - 1, basic.D, None)
    return _finish_build(params, params.N - 1, Q, M, K, N_dual)


def nleigs_lowrank_build(lr: NleigsLowRank) -> NleigsBuild:
    """
    Low-rank NLEIGS pencil. With p = N - 1 there is no low-rank block column
    and the basic pencil of D_N = L~_N U~^T is returned.
    """
    params = lr.params
    if lr.p == params.N - 1:
        return nleigs_build(lr.as_basic())
    Q = _rational_sum(params, lr.as_basic().D)
    M, K, N_dual = _assemble_nleigs(params, lr.p, lr.Dt + lr.Lt, lr.Ut)
    return _finish_build(params, lr.p, Q, M, K, N_dual)


def _gh_product(params: NleigsParams, start: int, stop: int) -> RatFun:
    """prod_{k=start}^{stop} g_k / h_{k-1}."""
    result = RatFun.one()
    for k in range(start, stop + 1):
        result = result * reduce(params.g(k), params.h(k - 1))
    return result


def _weighted_tail(params: NleigsParams, block: Callable[[int], PolyMatrix],
                   start: int, stop: int) -> RatMatrix:
    """sum_{j=start}^{stop-1} (prod_{k=j+1}^{stop} g_k/h_{k-1}) X_j + X_stop."""
    total = RatMatrix.from_poly(block(stop))
    for j in range(start, stop):
        total = total + RatMatrix.from_poly(block(j)).scale(_gh_product(params, j + 1, stop))
    return total


def nleigs_RN(basic: NleigsBasic) -> RatMatrix:
    """R_N = (Q_N - b_0 D_0) / b_N in its expanded form."""
    return _weighted_tail(basic.params, lambda j: basic.D[j], 1, basic.params.N)


def _require_distinct(params: NleigsParams) -> None:
    hit = params.coincidence()
    if hit is not None:
        node, pole, value = hit
        raise NodePoleCoincidenceError(node, pole, rat_to_str(value))


def _psm_region(params: NleigsParams) -> Region:
    last = params.xi[-1]
    return ALL if last.is_infinite else Region.excluding([last.value])


def _caveat(params: NleigsParams) -> Optional[str]:
    last = params.xi[-1]
    if last.is_infinite:
        return None
    return f"xi_N = {last} is finite: this state matrix carries no pole information at xi_N"


def _check_poles(params: NleigsParams, R: RatMatrix, rank: int) -> Tuple[PoleCheck, ...]:
    return tuple(
        PoleCheck(k, x, dm_rank(value_at(R, Point(x))) == rank)
        for k, x in params.finite_poles(params.N - 1)
    )


def _report(params: NleigsParams, checks: Tuple[PoleCheck, ...], criterion: str,
            label: str, sufficient_only: bool = False) -> MinimalityReport:
    caveat = _caveat(params)
    failed = [c for c in checks if not c.passes]
    if not failed:
        region = _psm_region(params)
        logger.info(f"NLEIGS pencil minimal in all of F ({criterion} criterion), linearization in {region}")
        return MinimalityReport(Verdict(True, region=region), checks, criterion, True, caveat)
    first = failed[0]
    witness = f"{label} loses rank at xi_{first.index} = {rat_to_str(first.value)}"
    if sufficient_only:
        witness += " (sufficient test only: minimality undecided)"
    return MinimalityReport(Verdict(False, witness), checks, criterion, not sufficient_only, caveat)


def nleigs_minimality(basic: NleigsBasic) -> MinimalityReport:
    """
    Minimality in all of F of the basic pencil with state A_N, through R_N
    evaluated at each finite xi_k with k <= N - 1. On success the verdict
    region is where L_N linearizes Q_N with that state.

    Raises:
        NodePoleCoincidenceError: some xi_i equals some sigma_j
    """
    params = basic.params
    _require_distinct(params)
    checks = _check_poles(params, nleigs_RN(basic), basic.m)
    return _report(params, checks, "full", "R_N")


def nleigs_pole_structure(basic: NleigsBasic) -> Tuple[Poly, ...]:
    """
    The m invariant polynomials of A_N different from 1, all equal to the
    monic product of (l - xi_k) over the finite xi_k with k <= N - 1.

    Raises:
        NodePoleCoincidenceError: some xi_i equals some sigma_j
    """
    params = basic.params
    _require_distinct(params)
    p = RING.one
    for _, x in params.finite_poles(params.N - 1):
        p = p * linear_factor(x)
    return (p,) * basic.m


@dataclass(frozen=True)
class LowRankCriterion:
    """R~_N and its pieces; ``full`` and ``square`` are None when p = 0."""
    tail: RatMatrix
    full: Optional[RatMatrix]
    square: Optional[RatMatrix]


def nleigs_lowrank_R(lr: NleigsLowRank) -> LowRankCriterion:
    """
    R~_N = [[R1, R2], [c_p I_m, 0], [-h_p U~^T, c_N I_r]] where
    R1 = g_N/h_{N-1} (sum_{j=1}^{p-1} (prod_{k=j+1}^{p} g_k/h_{k-1}) D~_j + D~_p),
    R2 = sum_{j=p+1}^{N-1} (prod_{k=j+1}^{N} g_k/h_{k-1}) L~_j + L~_N,
    c_p = (prod_{i=1}^{p-1} g_i/h_i) g_p and c_N = (prod_{i=p+1}^{N-2} g_i/h_i) g_{N-1}.
    The square variant drops the middle block row.
    """
    params = lr.params
    N, p, m, r = params.N, lr.p, lr.m, lr.r
    tail = _weighted_tail(params, lr.L, p + 1, N)
    if p == 0:
        return LowRankCriterion(tail, None, None)

    head = _weighted_tail(params, lambda j: lr.Dt[j], 1, p).scale(reduce(params.g(N), params.h(N - 1)))
    c_p = RatFun.from_poly(params.g(p))
    for i in range(1, p):
        c_p = c_p * reduce(params.g(i), params.h(i))
    c_N = RatFun.from_poly(params.g(N - 1))
    for i in range(p + 1, N - 1):
        c_N = c_N * reduce(params.g(i), params.h(i))

    first = rat_hstack(head, tail)
    middle = rat_hstack(_rat_scaled_identity(m, c_p), RatMatrix.zeros(m, r))
    last = rat_hstack(RatMatrix.from_poly(lr.Ut.transpose().scale(-params.h(p))), _rat_scaled_identity(r, c_N))
    return LowRankCriterion(
        tail,
        RatMatrix.block([[first], [middle], [last]]),
        RatMatrix.block([[first], [last]]),
    )


def nleigs_lowrank_minimality(lr: NleigsLowRank, criterion: str = "full") -> MinimalityReport:
    """
    Minimality in all of F of the low-rank pencil with state A~_N.

    Args:
        lr: Low-rank family
        criterion: ``full`` (R~_N has full column rank at each finite xi_k, k <= N-1),
            ``infinite_head`` (only R2, valid when xi_1..xi_p are infinite) or
            ``square`` (R~_N without its middle block row invertible; sufficient only)

    Raises:
        ParameterError: unknown criterion, or infinite_head with a finite xi_k, k <= p
        LowRankFactorError: rank U~ < r
        NodePoleCoincidenceError: some xi_i equals some sigma_j
    """
    if criterion not in CRITERIA:
        raise ParameterError(f"unknown criterion {criterion!r}; use one of {', '.join(CRITERIA)}")
    params = lr.params
    if lr.p == params.N - 1:
        return nleigs_minimality(lr.as_basic())
    if dm_rank(lr.Ut.constant_part()) < lr.r:
        raise LowRankFactorError(f"U~ has rank {dm_rank(lr.Ut.constant_part())} < r = {lr.r}")
    _require_distinct(params)
    if criterion == "infinite_head" and params.finite_poles(lr.p):
        k, _ = params.finite_poles(lr.p)[0]
        raise ParameterError(f"infinite_head criterion needs xi_1..xi_p infinite; xi_{k} is finite")

    matrices = nleigs_lowrank_R(lr)
    if matrices.full is None or criterion == "infinite_head":
        checks = _check_poles(params, matrices.tail, lr.r)
        return _report(params, checks, criterion, "R~_N^(2)")
    if criterion == "square":
        checks = _check_poles(params, matrices.square, lr.m + lr.r)
        return _report(params, checks, criterion, "square R~_N", sufficient_only=True)
    checks = _check_poles(params, matrices.full, lr.m + lr.r)
    return _report(params, checks, criterion, "R~_N")


def nleigs_grade_certificate(built: NleigsBuild) -> Verdict:
    """
    Empty-state linearization at infinity of grade i_N, through the dual
    basis reversed with t = i_N - 1. The low-rank claim needs
    xi_{p+1}..xi_{N-1} finite and is refused otherwise.
    """
    params = built.params
    for k in range(built.p + 1, params.N):
        if params.xi[k - 1].is_infinite:
            return Verdict(
                False,
                f"grade claim needs xi_{built.p + 1}..xi_{params.N - 1} finite; xi_{k} is infinite",
            )
    return linearization_at_infinity_grade(built.fullrank_view, built.N, None, params.i_N - 1, 0)


def _nleigs_certificate(built: NleigsBuild, minimality: Callable[[], MinimalityReport]) -> FamilyCertificate:
    G, region = linearization_region(built.fullrank_view, built.N)
    infinity = nleigs_grade_certificate(built)
    caveats = []
    report = None
    if built.params.coincidence() is None:
        report = minimality()
    else:
        node, pole, value = built.params.coincidence()
        caveats.append(
            f"xi_{pole} = sigma_{node} = {rat_to_str(value)}: system-matrix minimality criteria do not apply"
        )
    caveat = _caveat(built.params)
    if caveat:
        caveats.append(caveat)
    return FamilyCertificate(G, region, infinity, report, tuple(caveats))


def nleigs_certificate(basic: NleigsBasic) -> FamilyCertificate:
    return _nleigs_certificate(nleigs_build(basic), lambda: nleigs_minimality(basic))


def nleigs_lowrank_certificate(lr: NleigsLowRank, criterion: str = "full") -> FamilyCertificate:
    return _nleigs_certificate(nleigs_lowrank_build(lr), lambda: nleigs_lowrank_minimality(lr, criterion))
