"""
Command-line entry point.

Every command prints exactly one JSON document on stdout and logs to stderr.
Exit codes: 0 holds or passes, 1 does not hold, 2 input or resource error,
3 property violation.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from msou import config as settings
from msou.config import Config
from msou.errors import MsouError, NotUniqueError, ResourceLimitError
from msou.services.compose import bottom_up_type
from msou.services.decompose import (
    apply_relabeling,
    build_omega,
    build_phi_mso,
    build_relabeling,
    check_thm1,
    check_thm2,
)
from msou.services.formula import Exists, Formula
from msou.services.fuzz import SUITES, check_synth_exhaustive, run_fuzz
from msou.services.oracle import Oracle
from msou.services.syntax import (
    parse_formula,
    parse_tree,
    parse_type,
    parse_valuation,
    print_formula,
    print_tree,
)
from msou.services.tree import EMPTY_VALUATION, Tree, Valuation, check_valuation, validate_tree
from msou.services.typespace import reachable_types, synth_psi, synth_psi_empty, tv
from msou.utils.serialization import (
    dumps,
    nodes_to_json,
    omega_to_json,
    relabeling_to_json,
    type_space_to_json,
)

logger = logging.getLogger(__name__)

EXIT_HOLDS, EXIT_FAILS, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2, 3


class InputError(MsouError):
    """An input file that cannot be read."""


def _emit(document) -> None:
    sys.stdout.write(dumps(document) + "\n")


def _text(args: argparse.Namespace, value: str) -> str:
    if args.inline:
        return value
    try:
        return Path(value).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {value}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"Cannot read {value}: not valid UTF-8 ({e.reason} at byte {e.start})") from e


def _formula(args: argparse.Namespace) -> Formula:
    return parse_formula(_text(args, args.formula))


def _tree(args: argparse.Namespace, config: Config) -> Tree:
    tree = parse_tree(_text(args, args.tree))
    validate_tree(tree, config)
    return tree


def _valuation(args: argparse.Namespace, tree: Tree) -> Valuation:
    if not getattr(args, "valuation", None):
        return EMPTY_VALUATION
    valuation = parse_valuation(_text(args, args.valuation))
    check_valuation(tree, valuation)
    return valuation


def _verdict(holds: bool) -> int:
    return EXIT_HOLDS if holds else EXIT_FAILS


# Commands


def cmd_eval(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    tree = _tree(args, config)
    valuation = _valuation(args, tree)
    oracle = Oracle(tree)
    holds = oracle.holds(formula, valuation)
    document = {"holds": holds}
    if isinstance(formula, Exists):
        document["witness"] = nodes_to_json(oracle.witness(formula, valuation))
    _emit(document)
    return _verdict(holds)


def cmd_type(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    tree = _tree(args, config)
    valuation = _valuation(args, tree)
    if args.check:
        direct = Oracle(tree).type_of(formula, valuation)
        folded = bottom_up_type(formula, tree, valuation, config)
        if direct != folded:
            logger.error(f"Direct type {direct} and bottom-up type {folded} differ")
            _emit({"direct": str(direct), "comp": str(folded)})
            return EXIT_VIOLATION
        t = direct
    elif args.method == "comp":
        t = bottom_up_type(formula, tree, valuation, config)
    else:
        t = Oracle(tree).type_of(formula, valuation)
    _emit({"type": str(t), "tv": tv(formula, t)})
    return EXIT_HOLDS


def cmd_typespace(args: argparse.Namespace, config: Config) -> int:
    space = reachable_types(_formula(args), config)
    _emit(type_space_to_json(space))
    return EXIT_HOLDS


def cmd_synth(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    t = parse_type(args.type, formula)
    psi = synth_psi_empty(formula, t, config) if args.empty else synth_psi(formula, t, config)
    _emit({"formula": print_formula(psi), "size": psi.size})
    return EXIT_HOLDS


def cmd_check_synth(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    problems = check_synth_exhaustive(formula, config, args.max_nodes, args.empty)
    _emit({"problems": problems, "failures": len(problems)})
    return EXIT_VIOLATION if problems else EXIT_HOLDS


def cmd_omega(args: argparse.Namespace, config: Config) -> int:
    _emit(omega_to_json(build_omega(_formula(args), config)))
    return EXIT_HOLDS


def cmd_check_thm1(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    tree = _tree(args, config)
    valuation = _valuation(args, tree)
    report = check_thm1(formula, tree, valuation, build_omega(formula, config))
    _emit(report.model_dump())
    return EXIT_HOLDS if report.lhs == report.rhs else EXIT_VIOLATION


def cmd_decompose(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    relabeling = build_relabeling(formula, config)
    phi_mso = build_phi_mso(formula, config)
    _emit(
        {
            "phi_mso": print_formula(phi_mso),
            "size": phi_mso.size,
            "relabeling": relabeling_to_json(relabeling),
            "legend": relabeling.legend,
        }
    )
    return EXIT_HOLDS


def cmd_relabel(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    tree = _tree(args, config)
    relabeling = build_relabeling(formula, config)
    try:
        relabeled = apply_relabeling(relabeling, tree)
    except NotUniqueError as e:
        logger.error(str(e))
        _emit({"error": "NotUniqueError", "message": str(e)})
        return EXIT_VIOLATION
    _emit({"relabeled_tree": print_tree(relabeled), "legend": relabeling.legend})
    return EXIT_HOLDS


def cmd_check_thm2(args: argparse.Namespace, config: Config) -> int:
    formula = _formula(args)
    tree = _tree(args, config)
    valuation = _valuation(args, tree)
    try:
        report = check_thm2(formula, tree, valuation, config)
    except NotUniqueError as e:
        logger.error(str(e))
        _emit({"error": "NotUniqueError", "message": str(e)})
        return EXIT_VIOLATION
    _emit(report.model_dump())
    ok = report.lhs == report.rhs and report.is_mso and report.fv_contained
    return EXIT_HOLDS if ok else EXIT_VIOLATION


def cmd_fuzz(args: argparse.Namespace, config: Config) -> int:
    if args.max_nodes > settings.NODE_CAP:
        raise InputError(f"--max-nodes {args.max_nodes} exceeds the node cap {settings.NODE_CAP}")
    summary = run_fuzz(
        seed=args.seed,
        cases=args.cases,
        config=config,
        max_nodes=args.max_nodes,
        max_qdepth=args.max_qdepth,
        suites=args.suite or None,
        shrink_failures=not args.no_shrink,
    )
    _emit(summary.model_dump())
    return EXIT_VIOLATION if summary.failures else EXIT_HOLDS


# Parser


def _count(minimum: int):
    def parse(value: str) -> int:
        try:
            number = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{value!r} is not an integer")
        if number < minimum:
            raise argparse.ArgumentTypeError(f"{value} is below {minimum}")
        return number

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msou", description="MSO+U on finite trees: evaluation, types and decompositions"
    )
    parser.add_argument("--alphabet", default="a,b", help="comma-separated letters (default a,b)")
    parser.add_argument("--rmax", type=_count(0), default=2, help="maximal arity (default 2)")
    parser.add_argument("--node-cap", type=_count(1), default=None, help="oracle node cap")
    parser.add_argument(
        "--inline", action="store_true", help="read FORMULA, TREE and VALUATION as text, not paths"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def with_tree(sub: argparse.ArgumentParser, valuation: bool = True) -> None:
        sub.add_argument("formula")
        sub.add_argument("tree")
        if valuation:
            sub.add_argument("valuation", nargs="?")

    sub = commands.add_parser("eval", help="decide T, nu |= phi")
    with_tree(sub)
    sub.set_defaults(handler=cmd_eval)

    sub = commands.add_parser("type", help="phi-type of (T, nu)")
    with_tree(sub)
    sub.add_argument("--method", choices=("direct", "comp"), default="direct")
    sub.add_argument("--check", action="store_true", help="run both methods, exit 3 on mismatch")
    sub.set_defaults(handler=cmd_type)

    sub = commands.add_parser("typespace", help="reachable and truthy types of phi")
    sub.add_argument("formula")
    sub.set_defaults(handler=cmd_typespace)

    sub = commands.add_parser("synth", help="formula defining a type")
    sub.add_argument("formula")
    sub.add_argument("type", help="type term, e.g. q({ff,tt},{})")
    sub.add_argument("--empty", action="store_true", help="type under the empty valuation")
    sub.set_defaults(handler=cmd_synth)

    sub = commands.add_parser("check-synth", help="exhaustively check the type-defining formulas")
    sub.add_argument("formula")
    sub.add_argument("--max-nodes", type=_count(1), default=4)
    sub.add_argument("--empty", action="store_true")
    sub.set_defaults(handler=cmd_check_synth)

    sub = commands.add_parser("omega", help="root/children decomposition tuples")
    sub.add_argument("formula")
    sub.set_defaults(handler=cmd_omega)

    sub = commands.add_parser("check-thm1", help="compare phi with its decomposition on a tree")
    with_tree(sub)
    sub.set_defaults(handler=cmd_check_thm1)

    sub = commands.add_parser("decompose", help="relabeling sentences and the U-free formula")
    sub.add_argument("formula")
    sub.set_defaults(handler=cmd_decompose)

    sub = commands.add_parser("relabel", help="relabel a tree with letters and types")
    with_tree(sub, valuation=False)
    sub.set_defaults(handler=cmd_relabel)

    sub = commands.add_parser("check-thm2", help="compare phi with the U-free formula on the relabeled tree")
    with_tree(sub)
    sub.set_defaults(handler=cmd_check_thm2)

    sub = commands.add_parser("fuzz", help="randomized differential checks")
    sub.add_argument("--seed", type=_count(0), default=42)
    sub.add_argument("--cases", type=_count(0), default=100)
    sub.add_argument("--max-nodes", type=_count(1), default=6)
    sub.add_argument("--max-qdepth", type=_count(0), default=2)
    sub.add_argument("--suite", action="append", choices=sorted(SUITES), help="repeatable; all by default")
    sub.add_argument("--no-shrink", action="store_true")
    # SUPPRESS keeps the global value unless the flag is repeated after "fuzz"
    sub.add_argument("--alphabet", default=argparse.SUPPRESS, help="comma-separated letters")
    sub.add_argument("--rmax", type=_count(0), default=argparse.SUPPRESS, help="maximal arity")
    sub.set_defaults(handler=cmd_fuzz)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage and 0 on --help
        return int(e.code or 0)

    if args.node_cap is not None:
        settings.NODE_CAP = args.node_cap
    try:
        config = Config.from_flags(args.alphabet, args.rmax)
        return args.handler(args, config)
    except ResourceLimitError as e:
        logger.error(f"Resource limit: {e}")
        _emit({"error": "ResourceLimitError", "message": str(e)})
        return EXIT_ERROR
    except MsouError as e:
        logger.error(f"{type(e).__name__}: {e}")
        _emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_ERROR
    except RecursionError:
        logger.error("Resource limit: formula or tree nested too deeply")
        _emit({"error": "ResourceLimitError", "message": "Formula or tree nested too deeply"})
        return EXIT_ERROR
