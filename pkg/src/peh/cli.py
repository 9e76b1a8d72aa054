"""
Command line front end.

    peh compute fibonacci --levels 6 --format json
    peh compute penrose-kite-dart --dagger
    peh limit "[[1, 1, 1], [1, 0, 0], [1, 0, 0]]"
    peh snf "[[2, 0], [0, 3]]"
    peh validate path/to/dataset.json
    peh examples

Exit codes: 0 success, 1 input error, 2 computation error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from peh import __version__
from peh.catalog import catalog, catalog_json, load_input, resolve
from peh.config import RunConfig
from peh.constants import COEFFICIENT_MODES, OUTPUT_FORMATS
from peh.datasets import ApproximantDataset, compute, validation_report
from peh.exceptions import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    InvariantViolation,
    ParseError,
    PEHError,
)
from peh.limits import stationary_limit
from peh.linalg import IntMatrix, smith_normal_form
from peh.report import PipelineReport, json_safe
from peh.subst1d import SubstitutionSystem1D, pe_homology_1d

logger = logging.getLogger(__name__)


def _positive(value: str) -> int:
    try:
        number = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}") from e
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return number


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="text")
    common.add_argument("--output", metavar="PATH", help="write the report here, not stdout")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="log progress to stderr (repeatable)"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="peh", description="PE homology of hierarchical tilings."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser(
        "compute", parents=[common], help="approximant homology, connecting maps and limits"
    )
    run.add_argument("input", help="system (.toml) or dataset (.json) file, or example name")
    run.add_argument("--levels", type=_positive, default=RunConfig.levels)
    run.add_argument("--horizon", type=_positive, default=RunConfig.horizon)
    run.add_argument("--limit-horizon", type=_positive, default=RunConfig.limit_horizon)
    run.add_argument("--verified-depth", type=_positive, default=RunConfig.verified_depth)
    run.add_argument("--dagger", action="store_true", help="also run the dagger pipeline")
    run.add_argument("--mode", choices=COEFFICIENT_MODES, help="coefficient override")
    run.add_argument("--timing", action="store_true", help="include stage timings")

    limit = commands.add_parser(
        "limit", parents=[common], help="direct limit along a repeated square matrix"
    )
    limit.add_argument("matrix", help="JSON file or inline JSON matrix")
    limit.add_argument("--verified-depth", type=_positive, default=RunConfig.verified_depth)

    snf = commands.add_parser("snf", parents=[common], help="Smith normal form of a matrix")
    snf.add_argument("matrix", help="JSON file or inline JSON matrix")

    check = commands.add_parser("validate", parents=[common], help="check an input file")
    check.add_argument("input", help="system (.toml) or dataset (.json) file, or example name")

    commands.add_parser("examples", parents=[common], help="list the bundled examples")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    options: Dict[str, Any] = {"format": args.format, "output": args.output}
    for name in ("levels", "horizon", "limit_horizon", "verified_depth", "dagger", "mode"):
        if hasattr(args, name):
            options[name] = getattr(args, name)
    options["include_timing"] = bool(getattr(args, "timing", False))
    return RunConfig(**options).validate()


def _emit(text: str, config: RunConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_matrix(source: str) -> IntMatrix:
    """
    Raises:
        ParseError: If the argument is neither a matrix file nor an inline matrix.
    """
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8") if path.is_file() else source
        document = json.loads(text)
    except (OSError, ValueError) as e:
        raise ParseError(f"Cannot read a matrix from {source!r}: {e}") from e
    if isinstance(document, dict):
        document = document.get("matrix")
    if not isinstance(document, list) or not all(isinstance(row, list) for row in document):
        raise ParseError("Please provide a matrix as a JSON list of integer rows.")
    try:
        return IntMatrix(document)
    except PEHError as e:
        raise ParseError(e.message) from e


def cmd_compute(args: argparse.Namespace, config: RunConfig) -> int:
    item = load_input(args.input)
    report: PipelineReport
    if isinstance(item, SubstitutionSystem1D):
        if config.dagger or config.mode == "Q":
            logger.warning("--dagger and --mode apply to datasets only; ignored for %s", item.name)
        report = pe_homology_1d(
            item, config.levels, config.horizon, config.limit_horizon, config.verified_depth
        )
    else:
        report = compute(
            item,
            limit_horizon=config.limit_horizon,
            verified_depth=config.verified_depth,
            dagger=config.dagger,
            mode=config.mode,
        )
    if config.format == "json":
        _emit(report.to_json(config.include_timing), config)
    else:
        _emit(report.to_text(config.include_timing), config)
    return report.exit_code


def cmd_limit(args: argparse.Namespace, config: RunConfig) -> int:
    M = _read_matrix(args.matrix)
    if M.rows != M.cols:
        raise ParseError(f"Please provide a square matrix (got {M.rows}x{M.cols}).")
    limit = stationary_limit(M, config.verified_depth)
    if config.format == "json":
        _emit(json.dumps(json_safe(limit.to_dict()), sort_keys=True, indent=2), config)
    else:
        _emit(f"{limit}\nverified_depth: {limit.verified_depth}", config)
    return EXIT_OK


def cmd_snf(args: argparse.Namespace, config: RunConfig) -> int:
    snf = smith_normal_form(_read_matrix(args.matrix))
    data = {
        "U": snf.U.to_lists(),
        "D": snf.D.to_lists(),
        "V": snf.V.to_lists(),
        "rank": snf.rank,
        "invariant_factors": list(snf.invariant_factors),
    }
    if config.format == "json":
        _emit(json.dumps(json_safe(data), sort_keys=True, indent=2), config)
    else:
        lines = [f"{key}: {data[key]}" for key in ("U", "D", "V", "rank", "invariant_factors")]
        _emit("\n".join(lines), config)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, config: RunConfig) -> int:
    item = load_input(args.input)
    violations: List[str] = []
    if isinstance(item, ApproximantDataset):
        violations = [str(v) for v in validation_report(item).violations]
    status = "valid" if not violations else "invalid"
    if config.format == "json":
        document = {"input": str(resolve(args.input)), "status": status, "violations": violations}
        _emit(json.dumps(document, sort_keys=True, indent=2), config)
    else:
        _emit("\n".join([status] + [f"  {v}" for v in violations]), config)
    return EXIT_OK if not violations else EXIT_INPUT_ERROR


def cmd_examples(args: argparse.Namespace, config: RunConfig) -> int:
    if config.format == "json":
        _emit(catalog_json(), config)
        return EXIT_OK
    entries = catalog()
    width = max((len(e.name) for e in entries), default=4)
    lines = []
    for entry in entries:
        groups = ", ".join(f"{k} = {v}" for k, v in entry.expected.items()) or "-"
        lines.append(f"{entry.name:<{width}}  {entry.kind:<7}  {groups}")
    _emit("\n".join(lines), config)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "compute": cmd_compute,
    "limit": cmd_limit,
    "snf": cmd_snf,
    "validate": cmd_validate,
    "examples": cmd_examples,
}


def _report_failure(error: PEHError) -> None:
    sys.stderr.write(f"error: {type(error).__name__}: {error}\n")
    if isinstance(error, InvariantViolation):
        for violation in error.violations:
            sys.stderr.write(f"  {violation}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT_ERROR

    if args.verbose:
        level = logging.INFO if args.verbose == 1 else logging.DEBUG
        logging.basicConfig(
            level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
        )

    try:
        config = _config(args)
        return COMMANDS[args.command](args, config)
    except PEHError as e:
        _report_failure(e)
        return e.exit_code
