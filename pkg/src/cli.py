"""
ratlin command-line driver

Reads matrix, system-matrix and parameter files, runs one structure or
linearization query and prints a line-oriented report on stdout.

Usage:
    ratlin smith <polymatrix-file>
    ratlin sm <ratmatrix-file> [--region all|only:{..}|except:{..}]
    ratlin structure <file> (--at <rat> | --at-inf) [--grade g]
    ratlin minimal <psm-file> [--at <rat> | --region R | --inf | --strong]
    ratlin check-lin <psm-file> --target <file> [--at <rat> | --region R | --inf --grade g | --g-strong g | --classify]
    ratlin build (saad|subai|nleigs|nleigs-lowrank) <params-file> -o <prefix> [--criterion full|infinite_head|square]
    ratlin eig <file> [--region R]
    ratlin oracle smith <polymatrix-file>

Exit codes:
    0   the query was answered (a negative verdict is still exit 0, reported as 'holds: false')
    2   bad input: parse failure, precondition violation or invalid flags
    1   unexpected failure
    130 interrupted

Environment variables:
    RATLIN_LOG_LEVEL, RATLIN_LOG_FILE, RATLIN_GRADE_SEARCH_BOUND, RATLIN_VERIFY_BUILDS
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from .config import RatlinConfig, configure_logging, load_config
from .errors import DimensionError, FormatError, RatlinError
from .fullrank import search_grades
from .formats import (
    FamilyParams, certificate_lines, defect_lines, dump_polymatrix, dump_psm, dump_ratmatrix,
    eigenvalue_lines, load_params, orders_lines, psm_structure_lines, read_matrix_file,
    smith_lines, smith_mcmillan_lines, strong_lines, verdict_lines,
)
from .linearize import (
    LinearizationClaim, classify_vs_strong, is_g_strong, is_linearization_at,
    is_linearization_at_infinity, is_linearization_in, recover_infinite_orders,
)
from .pencils import (
    nleigs_build, nleigs_certificate, nleigs_lowrank_build, nleigs_lowrank_certificate,
    saad_build, saad_certificate, subai_build, subai_certificate,
)
from .polymat import smith_form, smith_via_minors
from .psm import (
    is_minimal_at, is_minimal_at_infinity, is_minimal_in, is_strongly_minimal,
    minimality_defect_points, structure_at, structure_at_infinity,
)
from .ratmat import (
    ALL, LocalStructure, Region, eigenvalues, g_reversal, invariant_orders, local_structure,
    smith_mcmillan,
)
from .scalars import INFINITY, Point

logger = logging.getLogger(__name__)


def _region(text: Optional[str]) -> Region:
    return ALL if text is None else Region.parse(text)


def cmd_smith(args, config: RatlinConfig) -> List[str]:
    document = read_matrix_file(args.file)
    return smith_lines(smith_form(document.polynomial()))


def cmd_sm(args, config: RatlinConfig) -> List[str]:
    document = read_matrix_file(args.file)
    return smith_mcmillan_lines(smith_mcmillan(document.rational(), _region(args.region)))


def cmd_structure(args, config: RatlinConfig) -> List[str]:
    document = read_matrix_file(args.file)
    if (args.at is None) == (not args.at_inf):
        raise DimensionError("structure needs exactly one of --at or --at-inf")

    if document.psm is not None:
        psm = document.psm
        if args.at is not None:
            return psm_structure_lines(structure_at(psm, Point.parse(args.at).value))
        if args.grade is not None:
            orders = recover_infinite_orders(psm, args.grade)
        else:
            orders = structure_at_infinity(psm)
        return orders_lines(orders, LocalStructure.from_orders(orders))

    G = document.rational()
    point = INFINITY if args.at_inf else Point.parse(args.at)
    if point.is_infinite and args.at is not None:
        raise DimensionError("use --at-inf for the point at infinity")
    lines = orders_lines(invariant_orders(G, point), local_structure(G, point))
    if args.grade is not None:
        if not point.is_infinite:
            raise DimensionError("--grade only applies together with --at-inf")
        reversed_orders = invariant_orders(g_reversal(G, args.grade), Point.finite(0))
        lines.append(f"reversal orders at 0 (grade {args.grade}): "
                     f"{' '.join(str(k) for k in reversed_orders.orders)}".rstrip())
    return lines


def cmd_minimal(args, config: RatlinConfig) -> List[str]:
    document = read_matrix_file(args.file)
    if document.psm is None:
        raise FormatError("minimal needs a psm file (staterows/statecols lines)")
    psm = document.psm
    if args.at is not None:
        x = Point.parse(args.at).value
        return [f"point: {args.at}", f"minimal: {'true' if is_minimal_at(psm, x) else 'false'}"]
    if args.inf:
        return ["point: inf", f"minimal: {'true' if is_minimal_at_infinity(psm) else 'false'}"]
    if args.strong:
        return [f"strongly minimal: {'true' if is_strongly_minimal(psm) else 'false'}"]
    region = _region(args.region)
    lines = [f"region: {region}", f"minimal: {'true' if is_minimal_in(psm, region) else 'false'}"]
    return lines + defect_lines(minimality_defect_points(psm))


def cmd_check_lin(args, config: RatlinConfig) -> List[str]:
    document = read_matrix_file(args.file)
    if document.psm is None:
        raise FormatError("check-lin needs a psm file (staterows/statecols lines)")
    target = read_matrix_file(args.target).rational()
    claim = LinearizationClaim.build(document.psm, target)
    witness = config.report_witness

    if args.classify:
        return strong_lines(classify_vs_strong(document.psm, target), witness)
    if args.at is not None:
        return verdict_lines(is_linearization_at(claim, Point.parse(args.at).value), witness)
    if args.g_strong is not None:
        return verdict_lines(is_g_strong(claim, args.g_strong), witness)
    if args.inf:
        if args.grade is None:
            raise DimensionError("--inf needs --grade")
        return verdict_lines(is_linearization_at_infinity(claim, args.grade), witness)
    return verdict_lines(is_linearization_in(claim, _region(args.region)), witness)


def _build_family(family: str, params: FamilyParams, criterion: str):
    """(built pencil, certificate, target, main psm, dual basis) for a family."""
    if family == "saad":
        built = saad_build(params)
        return built, saad_certificate(params), built.G, built.psm, built.N1
    if family == "subai":
        built = subai_build(params)
        return built, subai_certificate(params), built.G, built.psm_full_state, built.N1
    if family == "nleigs":
        built = nleigs_build(params)
        return built, nleigs_certificate(params), built.Q, built.psm_view, built.N
    built = nleigs_lowrank_build(params)
    return built, nleigs_lowrank_certificate(params, criterion), built.Q, built.psm_view, built.N


def cmd_build(args, config: RatlinConfig) -> List[str]:
    family, params = load_params(args.params)
    if family != args.family:
        raise FormatError(f"parameter file describes family {family!r}, not {args.family!r}")
    built, certificate, target, psm, dual = _build_family(family, params, args.criterion)

    if config.verify_builds:
        failed = [name for name, ok in built.identities().items() if not ok]
        if failed:
            raise RatlinError(f"build identities failed: {', '.join(failed)}")
        logger.info(f"Build identities verified for {family}")

    report = certificate_lines(family, certificate, config.report_witness)
    choices = search_grades(built.fullrank_view, dual, None, config.grade_search_bound)
    report.append("grades: " + " ".join(f"({c.t1},{c.t2})->{c.grade}" for c in choices))
    outputs: Dict[str, str] = {
        f"{args.output}.G.rm": dump_ratmatrix(target),
        f"{args.output}.pencil.pm": dump_polymatrix(psm.P),
        f"{args.output}.psm": dump_psm(psm),
        f"{args.output}.dual.rm": dump_ratmatrix(dual),
        f"{args.output}.cert.txt": "\n".join(report) + "\n",
    }
    for path, content in outputs.items():
        try:
            with open(path, 'w') as handle:
                handle.write(content)
        except OSError as e:
            raise RatlinError(f"cannot write {path}: {e.strerror}") from e
        logger.debug(f"Wrote {path}")
    return report + [f"wrote: {path}" for path in outputs]


def cmd_eig(args, config: RatlinConfig) -> List[str]:
    document = read_matrix_file(args.file)
    return eigenvalue_lines(eigenvalues(document.rational(), _region(args.region)))


def cmd_oracle(args, config: RatlinConfig) -> List[str]:
    P = read_matrix_file(args.file).polynomial()
    pivoting = smith_form(P)
    minors = smith_via_minors(P)
    agree = pivoting.invariant_polys == minors.invariant_polys
    return (
        [f"agree: {'true' if agree else 'false'}", "gcd pivoting:"]
        + [f"  {line}" for line in smith_lines(pivoting)]
        + ["determinantal divisors:"]
        + [f"  {line}" for line in smith_lines(minors)]
    )


COMMANDS: Dict[str, Callable[..., List[str]]] = {
    "smith": cmd_smith,
    "sm": cmd_sm,
    "structure": cmd_structure,
    "minimal": cmd_minimal,
    "check-lin": cmd_check_lin,
    "build": cmd_build,
    "eig": cmd_eig,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratlin",
        description="Exact structure and linearization queries for rational matrices",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument('--config', help='YAML configuration file (see config_example.yaml)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging on stderr')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('smith', help='Smith normal form of a polynomial matrix')
    p.add_argument('file')

    p = sub.add_parser('sm', help='Smith-McMillan form of a rational matrix')
    p.add_argument('file')
    p.add_argument('--region', help='all, only:{a,b} or except:{a,b}')

    p = sub.add_parser('structure', help='Invariant orders at a point or at infinity')
    p.add_argument('file')
    p.add_argument('--at', help='Rational point')
    p.add_argument('--at-inf', action='store_true', help='The point at infinity')
    p.add_argument('--grade', type=int, help='Grade for reversal at infinity')

    p = sub.add_parser('minimal', help='Minimality of a polynomial system matrix')
    p.add_argument('file')
    group = p.add_mutually_exclusive_group()
    group.add_argument('--at', help='Rational point')
    group.add_argument('--region', help='all, only:{a,b} or except:{a,b}')
    group.add_argument('--inf', action='store_true', help='Minimality at infinity')
    group.add_argument('--strong', action='store_true', help='Strong minimality')

    p = sub.add_parser('check-lin', help='Linearization verdict for a pencil')
    p.add_argument('file')
    p.add_argument('--target', required=True, help='Matrix file of the target G')
    group = p.add_mutually_exclusive_group()
    group.add_argument('--at', help='Rational point')
    group.add_argument('--region', help='all, only:{a,b} or except:{a,b}')
    group.add_argument('--inf', action='store_true', help='At infinity (needs --grade)')
    group.add_argument('--g-strong', type=int, help='g-strong linearization of this grade')
    group.add_argument('--classify', action='store_true', help='Compare with strong linearizations')
    p.add_argument('--grade', type=int, help='Grade at infinity')

    p = sub.add_parser('build', help='Build a pencil family from a parameter file')
    p.add_argument('family', choices=['saad', 'subai', 'nleigs', 'nleigs-lowrank'])
    p.add_argument('params', help='YAML parameter file')
    p.add_argument('-o', '--output', required=True, help='Output file prefix')
    p.add_argument('--criterion', default='full', choices=['full', 'infinite_head', 'square'],
                   help='NLEIGS low-rank minimality criterion')

    p = sub.add_parser('eig', help='Eigenvalues of a rational matrix')
    p.add_argument('file')
    p.add_argument('--region', help='all, only:{a,b} or except:{a,b}')

    p = sub.add_parser('oracle', help='Cross-check against an independent oracle')
    p.add_argument('oracle', choices=['smith'])
    p.add_argument('file')
    return parser


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """
    Parse argv, run one command and print its report.

    Returns:
        Exit code (0 answered, 2 bad input, 1 unexpected failure, 130 interrupted)
    """
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = load_config(args.config)
        if args.verbose:
            config.log_level = "DEBUG"
        configure_logging(config)
        lines = COMMANDS[args.command](args, config)
        out.write("\n".join(lines) + "\n")
        return 0
    except RatlinError as e:
        logger.debug(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except Exception as e:
        logger.exception(f"Unexpected failure in {args.command}: {e}")
        return 1


def main() -> int:
    return run(sys.argv[1:])
