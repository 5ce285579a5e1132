"""
Text Formats

Readers and writers for every file ratlin consumes or emits, plus the
line-oriented report renderers used by the CLI.

Features:
- Polynomial and rational-function literals in the variable ``l`` (parsed with sympy)
- ``polymatrix`` / ``ratmatrix`` files, and psm files (a polymatrix plus state index lines)
- YAML parameter files for the Saad, Su-Bai and NLEIGS families
- Deterministic report lines: sorted points, ascending multiplicities
"""

import logging
import re
from dataclasses import dataclass
from tokenize import TokenError
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml
from sympy import Float, Symbol, fraction, nan, together, zoo
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import FormatError, RatlinError
from .linearize import StrongComparison, Verdict
from .pencils import (
    FamilyCertificate, MinimalityReport, NleigsBasic, NleigsLowRank, NleigsParams,
    SaadParams, SuBaiParams,
)
from .polymat import PolyMatrix, SmithForm
from .psm import DefectSet, Psm, PsmStructureReport, make_psm, transfer_function
from .ratmat import EigenvalueReport, InvariantOrders, LocalStructure, RatMatrix, SmithMcMillan
from .scalars import RING, Poly, RatFun, poly_to_str, rat_to_str, reduce, to_rat

logger = logging.getLogger(__name__)

_SYMBOL = Symbol("l")
_TRANSFORMS = standard_transformations + (convert_xor,)
_LITERAL = re.compile(r"^[0-9l+\-*/^() \t]+$")

FAMILIES = ("saad", "subai", "nleigs", "nleigs-lowrank")

FamilyParams = Union[SaadParams, SuBaiParams, NleigsBasic, NleigsLowRank]


# -- literals -----------------------------------------------------------------


def _parse_fraction(text: str, line: Optional[int]) -> Tuple[Poly, Poly]:
    text = text.strip()
    if not text:
        raise FormatError("empty entry", line)
    if not _LITERAL.match(text):
        raise FormatError(f"unexpected characters in {text!r} (use integers, p/q, l, ^)", line)
    if "**" in text:
        raise FormatError(f"use ^ for powers, not ** in {text!r}", line)
    try:
        expr = parse_expr(text, local_dict={"l": _SYMBOL}, transformations=_TRANSFORMS)
    except (SyntaxError, TypeError, ValueError, TokenError) as e:
        raise FormatError(f"cannot parse {text!r}: {e}", line) from e
    if expr.has(zoo, nan) or expr.atoms(Float):
        raise FormatError(f"not an exact rational function: {text!r}", line)
    num, den = fraction(together(expr))
    try:
        return RING.from_expr(num), RING.from_expr(den)
    except ValueError as e:
        raise FormatError(f"not a rational function of l: {text!r}", line) from e


def parse_poly(text: str, line: Optional[int] = None) -> Poly:
    """Parse ``3/4*l^2 - l + 1`` into a polynomial."""
    num, den = _parse_fraction(text, line)
    f = reduce(num, den)
    if not f.is_polynomial():
        raise FormatError(f"expected a polynomial, got {text!r}", line)
    return f.num


def parse_ratfun(text: str, line: Optional[int] = None) -> RatFun:
    """Parse ``<poly> / <poly>`` or a bare polynomial into a reduced rational function."""
    num, den = _parse_fraction(text, line)
    if not den:
        raise FormatError(f"zero denominator in {text!r}", line)
    return reduce(num, den)


def format_ratfun(f: RatFun) -> str:
    return str(f)


# -- matrix files -------------------------------------------------------------


@dataclass(frozen=True)
class MatrixDocument:
    """A parsed matrix file; ``psm`` is set for psm files."""
    kind: str
    matrix: Union[PolyMatrix, RatMatrix]
    psm: Optional[Psm] = None

    def rational(self) -> RatMatrix:
        """The rational matrix the file stands for (the transfer function for a psm)."""
        if self.psm is not None:
            return transfer_function(self.psm)
        if isinstance(self.matrix, PolyMatrix):
            return RatMatrix.from_poly(self.matrix)
        return self.matrix

    def polynomial(self) -> PolyMatrix:
        if isinstance(self.matrix, PolyMatrix):
            return self.matrix
        if self.matrix.is_polynomial():
            return self.matrix.to_poly()
        raise FormatError(f"{self.kind} file holds a non-polynomial matrix")


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((number, stripped))
    return lines


def _parse_indices(body: str, bound: int, line: int) -> Tuple[int, ...]:
    indices = []
    for token in body.replace(",", " ").split():
        try:
            k = int(token)
        except ValueError as e:
            raise FormatError(f"state index {token!r} is not an integer", line) from e
        if not 1 <= k <= bound:
            raise FormatError(f"state index {k} outside 1..{bound}", line)
        indices.append(k - 1)
    return tuple(indices)


def parse_matrix_text(text: str) -> MatrixDocument:
    """
    Parse a ``polymatrix p m`` or ``ratmatrix p m`` document. A polymatrix
    followed by ``staterows:`` and ``statecols:`` lines (1-based) is a psm.

    Raises:
        FormatError: malformed header, row, entry or index line
        StateMatrixSingularError: psm state block is singular
    """
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty matrix file")
    number, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] not in ("polymatrix", "ratmatrix"):
        raise FormatError(f"expected 'polymatrix p m' or 'ratmatrix p m', got {header!r}", number)
    kind = parts[0]
    try:
        rows, cols = int(parts[1]), int(parts[2])
    except ValueError as e:
        raise FormatError(f"bad dimensions in header {header!r}", number) from e
    if rows < 0 or cols < 0:
        raise FormatError(f"negative dimensions in header {header!r}", number)

    body = lines[1:]
    entry_lines = [] if cols == 0 else body[:rows]
    if len(entry_lines) != (0 if cols == 0 else rows):
        raise FormatError(f"expected {rows} rows, found {len(entry_lines)}", number)
    parse = parse_poly if kind == "polymatrix" else parse_ratfun
    grid = []
    for line_number, content in entry_lines:
        cells = [c for c in content.split(";")]
        if len(cells) != cols:
            raise FormatError(f"expected {cols} entries, found {len(cells)}", line_number)
        grid.append([parse(c, line_number) for c in cells])
    if cols == 0:
        grid = [[] for _ in range(rows)]

    if kind == "polymatrix":
        matrix: Union[PolyMatrix, RatMatrix] = PolyMatrix.from_rows(grid, cols)
    else:
        matrix = RatMatrix.from_rows(grid, cols)

    rest = body[len(entry_lines):]
    if not rest:
        return MatrixDocument(kind, matrix)
    if kind != "polymatrix":
        raise FormatError("state index lines need a polymatrix", rest[0][0])
    state: Dict[str, Tuple[int, ...]] = {}
    for line_number, content in rest:
        key, _, value = content.partition(":")
        key = key.strip()
        if key not in ("staterows", "statecols") or key in state:
            raise FormatError(f"unexpected line {content!r}", line_number)
        state[key] = _parse_indices(value, rows if key == "staterows" else cols, line_number)
    if set(state) != {"staterows", "statecols"}:
        raise FormatError("psm files need both staterows and statecols lines", rest[-1][0])
    return MatrixDocument("psm", matrix, make_psm(matrix, state["staterows"], state["statecols"]))


def read_matrix_file(path: str) -> MatrixDocument:
    try:
        with open(path, 'r') as handle:
            text = handle.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e
    logger.debug(f"Parsing matrix file {path}")
    return parse_matrix_text(text)


def dump_polymatrix(P: PolyMatrix) -> str:
    lines = [f"polymatrix {P.rows} {P.cols}"]
    if P.cols:
        lines.extend("; ".join(poly_to_str(e) for e in row) for row in P.entries)
    return "\n".join(lines) + "\n"


def dump_ratmatrix(G: RatMatrix) -> str:
    lines = [f"ratmatrix {G.rows} {G.cols}"]
    if G.cols:
        lines.extend("; ".join(format_ratfun(e) for e in row) for row in G.entries)
    return "\n".join(lines) + "\n"


def dump_psm(psm: Psm) -> str:
    rows = " ".join(str(i + 1) for i in psm.state_rows)
    cols = " ".join(str(j + 1) for j in psm.state_cols)
    return dump_polymatrix(psm.P) + f"staterows: {rows}".rstrip() + "\n" + f"statecols: {cols}".rstrip() + "\n"


# -- parameter files ----------------------------------------------------------


def _scalar(value: Any, name: str):
    if isinstance(value, bool) or isinstance(value, float):
        raise FormatError(f"{name}: use integers or 'p/q' strings, got {value!r}")
    if isinstance(value, (int, str)):
        try:
            return to_rat(value)
        except RatlinError as e:
            raise FormatError(f"{name}: {e}") from e
    raise FormatError(f"{name}: expected a rational number, got {value!r}")


def _constant_matrix(value: Any, name: str, cols: Optional[int] = None) -> PolyMatrix:
    """Nested list of rationals; an empty list is a matrix with no rows."""
    if not isinstance(value, list) or any(not isinstance(row, list) for row in value):
        raise FormatError(f"{name}: expected a list of rows")
    width = len(value[0]) if value else (cols or 0)
    if any(len(row) != width for row in value):
        raise FormatError(f"{name}: rows differ in length")
    grid = [[_scalar(v, f"{name}[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(value)]
    return PolyMatrix.constant(grid, width)


def _matrix_list(data: Dict[str, Any], key: str) -> Tuple[PolyMatrix, ...]:
    value = _require(data, key)
    if not isinstance(value, list) or not value:
        raise FormatError(f"{key}: expected a nonempty list of matrices")
    return tuple(_constant_matrix(block, f"{key}[{k}]") for k, block in enumerate(value))


def _scalar_list(data: Dict[str, Any], key: str) -> Tuple:
    value = data.get(key, [])
    if not isinstance(value, list):
        raise FormatError(f"{key}: expected a list")
    return tuple(_scalar(v, f"{key}[{k}]") for k, v in enumerate(value))


def _require(data: Dict[str, Any], key: str) -> Any:
    if key not in data:
        raise FormatError(f"missing key {key!r}")
    return data[key]


def _nleigs_params(data: Dict[str, Any]) -> NleigsParams:
    xi = []
    for k, v in enumerate(_require(data, "xi")):
        if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "oo"):
            xi.append("inf")
        elif isinstance(v, float) and v == float("inf"):
            xi.append("inf")
        else:
            xi.append(_scalar(v, f"xi[{k}]"))
    return NleigsParams(_scalar_list(data, "sigma"), tuple(xi), _scalar_list(data, "beta"))


def params_from_mapping(data: Dict[str, Any]) -> Tuple[str, FamilyParams]:
    """
    Build family parameters from a YAML mapping.

    Raises:
        FormatError: unknown family, missing keys or non-rational entries
        ParameterError / DimensionError: from the family constructors
    """
    family = str(_require(data, "family")).strip().lower()
    if family == "saad":
        A0 = _constant_matrix(_require(data, "A0"), "A0")
        B = tuple(_constant_matrix(b, f"B[{k}]") for k, b in enumerate(data.get("B", []) or []))
        return family, SaadParams(A0, _constant_matrix(_require(data, "B0"), "B0"), B, _scalar_list(data, "sigma"))
    if family == "subai":
        D = _matrix_list(data, "D")
        p, m = D[0].shape
        A = _constant_matrix(data.get("A", []) or [], "A")
        n = A.rows
        B = _constant_matrix(data.get("B", []) or [], "B", m) if n else PolyMatrix.zeros(0, m)
        C = _constant_matrix(data.get("C", []) or [], "C") if n else PolyMatrix.zeros(p, 0)
        return family, SuBaiParams(D, A, B, C)
    if family == "nleigs":
        return family, NleigsBasic(_nleigs_params(data), _matrix_list(data, "D"))
    if family == "nleigs-lowrank":
        p = _require(data, "p")
        if not isinstance(p, int) or isinstance(p, bool):
            raise FormatError(f"p: expected an integer, got {p!r}")
        return family, NleigsLowRank(
            _nleigs_params(data), _matrix_list(data, "Dt"), _matrix_list(data, "Lt"),
            _constant_matrix(_require(data, "U"), "U"), p,
        )
    raise FormatError(f"unknown family {family!r}; use one of {', '.join(FAMILIES)}")


def load_params(path: str) -> Tuple[str, FamilyParams]:
    try:
        with open(path, 'r') as handle:
            data = yaml.safe_load(handle)
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e
    except yaml.YAMLError as e:
        raise FormatError(f"invalid YAML in {path}: {e}") from e
    if not isinstance(data, dict):
        raise FormatError(f"parameter file {path} must contain a mapping")
    return params_from_mapping(data)


# -- reports ------------------------------------------------------------------


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _ints(values: Sequence[int]) -> str:
    return " ".join(str(v) for v in values)


def smith_lines(form: SmithForm) -> List[str]:
    lines = [f"rank: {form.rank}"]
    lines.extend(f"d{i}: {poly_to_str(d)}" for i, d in enumerate(form.invariant_polys, 1))
    return lines


def smith_mcmillan_lines(form: SmithMcMillan) -> List[str]:
    lines = [f"rank: {form.rank}", f"region: {form.region}"]
    lines.extend(
        f"{i}: {poly_to_str(eps)} / {poly_to_str(psi)}" for i, (eps, psi) in enumerate(form.fractions, 1)
    )
    return lines


def orders_lines(orders: InvariantOrders, structure: LocalStructure) -> List[str]:
    return [
        f"point: {orders.point}",
        f"orders: {_ints(orders.orders)}".rstrip(),
        f"pole multiplicities: {_ints(structure.pole_mults)}".rstrip(),
        f"zero multiplicities: {_ints(structure.zero_mults)}".rstrip(),
    ]


def psm_structure_lines(report: PsmStructureReport) -> List[str]:
    return [
        f"point: {report.point}",
        f"pole multiplicities: {_ints(report.pole_eds.multiplicities)}".rstrip(),
        f"zero multiplicities: {_ints(report.zero_eds.multiplicities)}".rstrip(),
    ]


def verdict_lines(verdict: Verdict, with_witness: bool = True) -> List[str]:
    lines = [f"holds: {_bool(verdict.holds)}"]
    if verdict.grade is not None:
        lines.append(f"grade: {verdict.grade}")
    if verdict.region is not None:
        lines.append(f"region: {verdict.region}")
    if not verdict.holds and with_witness and verdict.witness:
        lines.append(f"witness: {verdict.witness}")
    return lines


def defect_lines(defects: DefectSet) -> List[str]:
    lines = [f"defects: {defects}"]
    if defects.factors:
        lines.append("defect factors: " + ", ".join(poly_to_str(f) for f in defects.factors))
    return lines


def strong_lines(comparison: StrongComparison, with_witness: bool = True) -> List[str]:
    lines = [f"kind: {comparison.kind.value}"]
    if comparison.grade is not None:
        lines.append(f"grade: {comparison.grade}")
    if comparison.witness and with_witness:
        lines.append(f"witness: {comparison.witness}")
    return lines


def eigenvalue_lines(report: EigenvalueReport) -> List[str]:
    lines = [f"eigenvalue {rat_to_str(e.value)}: {_ints(e.zero_mults)}" for e in report.rational]
    lines.extend(f"eigenvalues roots of {poly_to_str(e.factor)}: {_ints(e.zero_mults)}" for e in report.symbolic)
    return lines or ["none"]


def minimality_report_lines(report: MinimalityReport, with_witness: bool = True) -> List[str]:
    lines = [f"minimality criterion: {report.criterion}"]
    lines.extend(f"  {line}" for line in verdict_lines(report.verdict, with_witness))
    for check in report.checks:
        lines.append(f"  check {check.index} at {rat_to_str(check.value)}: {'ok' if check.passes else 'fails'}")
    if not report.conclusive:
        lines.append("  conclusive: false")
    return lines


def certificate_lines(family: str, cert: FamilyCertificate, with_witness: bool = True) -> List[str]:
    lines = [
        f"family: {family}",
        f"target: {cert.target.rows}x{cert.target.cols}",
        f"empty-state region: {cert.region}",
        "infinity:",
    ]
    lines.extend(f"  {line}" for line in verdict_lines(cert.infinity, with_witness))
    if cert.minimality is not None:
        lines.extend(minimality_report_lines(cert.minimality, with_witness))
    lines.extend(f"caveat: {c}" for c in cert.caveats)
    return lines
