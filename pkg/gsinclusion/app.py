"""
Command-line entry point for gsinclusion.

Subcommands parse space, sequence and weight specs, run condition checks,
decide inclusions, run the verification suites and render reports. Exit
codes: 0 pass or Included, 1 NotIncluded or a falsified check, 2 usage or
parse error, 3 Inconclusive, 130 interrupted.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

import pandas as pd

from gsinclusion import __version__
from gsinclusion.core.config import SpecEntry, get_user_config, load_spec_entries, update_config, validate_config
from gsinclusion.core.data.io import combine_reports, load_reports, render_summary, report_frame, write_report
from gsinclusion.core.data_structures import ApplicationConfig, Kind
from gsinclusion.core.decision import (
    Subject,
    VerdictTable,
    compare_functions,
    compare_sequences,
    condition_table,
    decide_inclusion,
)
from gsinclusion.core.exceptions import SpecParseError
from gsinclusion.core.harness import SUITES, run_suites
from gsinclusion.core.logging_config import setup_application_logging
from gsinclusion.core.parsing import (
    parse_entry,
    parse_exponent,
    parse_function_system,
    parse_kind,
    parse_growth,
    parse_omega,
    parse_sequence,
    parse_sequence_system,
    parse_space,
)

T = TypeVar("T")

EXIT_USAGE = 2
EXIT_INTERRUPTED = 130

SUBJECT_KINDS = ("auto", "space", "sequence", "omega", "sequence-system", "function-system")


def get_version() -> str:
    return __version__


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", default="roumieu", help="beurling or roumieu (default: roumieu)")
    common.add_argument("--p", default="2", help="E-model exponent: 0, 1, 2, inf or a mixed pair p1,p2 (default: 2)")
    common.add_argument("--qmax", type=int, help="order horizon of weight sequences")
    common.add_argument("--grid", help="one-dimensional grid as T,k: box [-T, T), spacing 2^-k")
    common.add_argument("--seed", type=int, help="seed of all random draws")
    common.add_argument("--tol", type=float, help="relative tolerance of sequence checks")
    common.add_argument("--workers", type=int, default=1, help="threads for independent checks (default: 1)")
    common.add_argument("--out", type=Path, help="write certificate.csv and summary.txt to this directory")
    common.add_argument("--spec-file", type=Path, help="file of `name = spec` lines; refer to entries as @name")
    common.add_argument("--debug", action="store_true", help="enable debug logging on the console")
    common.add_argument("--log-dir", type=Path, help="custom log directory")
    common.add_argument("--no-log-file", action="store_true", help="do not write the rotating log file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="gsinclusion",
        description="Inclusion relations between Gelfand-Shilov type spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  gsinclusion conditions "gevrey(s=1)"
  gsinclusion conditions "pow(rho=1/2)" --as omega
  gsinclusion compare-sequences "gevrey(s=0.5)" "gevrey(s=1)"
  gsinclusion decide-inclusion "gs(M=gevrey(s=0.5),A=gevrey(s=0.5))" "gs(M=gevrey(s=1),A=gevrey(s=1))"
  gsinclusion verify --suite norms,reconstruction --seed 42
  gsinclusion report runs/a runs/b --out combined
        """,
    )
    parser.add_argument("--version", action="version", version=f"gsinclusion {get_version()}")
    commands = parser.add_subparsers(dest="command", required=True)

    conditions = commands.add_parser("conditions", parents=[common], help="verdicts of the structural conditions")
    conditions.add_argument("spec", help="space, sequence, BMT weight function or system spec")
    conditions.add_argument("--as", dest="subject", choices=SUBJECT_KINDS, default="auto", help="how to read the spec")

    sequences = commands.add_parser("compare-sequences", parents=[common], help="M ⊆ N, M ≼ N or M [⊆] N")
    sequences.add_argument("left")
    sequences.add_argument("right")
    sequences.add_argument("--systems", action="store_true", help="read both specs as sequence systems")

    functions = commands.add_parser("compare-functions", parents=[common], help="sigma = O(omega) or W [⊆] V")
    functions.add_argument("left")
    functions.add_argument("right")
    functions.add_argument("--systems", action="store_true", help="read both specs as weight function systems")

    decide = commands.add_parser("decide-inclusion", parents=[common], help="decide whether space A is contained in B")
    decide.add_argument("left", metavar="A")
    decide.add_argument("right", metavar="B")
    decide.add_argument("--no-cross-check", action="store_true", help="skip the probe and membership cross-checks")

    verify = commands.add_parser("verify", parents=[common], help="run verification suites")
    verify.add_argument("--suite", default="all", help=f"all or a comma-separated list of {', '.join(SUITES)}")

    report = commands.add_parser("report", parents=[common], help="combine and render saved reports")
    report.add_argument("inputs", nargs="*", type=Path, help="certificate.csv files or directories holding one")
    return parser


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def apply_overrides(config: ApplicationConfig, args: argparse.Namespace) -> ApplicationConfig:
    """
    Command-line flags over the loaded configuration.

    Raises:
        ValueError: a malformed --grid value
    """
    if args.qmax is not None:
        config = update_config(config, "sequences", {"q_max": args.qmax})
    if args.tol is not None:
        config = update_config(config, "sequences", {"tolerance": args.tol})
    if args.seed is not None:
        config = update_config(config, "advanced", {"seed": args.seed})
    if args.grid is not None:
        try:
            half_width, exponent = (int(part) for part in args.grid.split(","))
        except ValueError as e:
            raise ValueError(f"--grid expects T,k with integers T and k, got '{args.grid}'") from e
        config = update_config(config, "spaces", {"half_width_1d": half_width, "spacing_exponent_1d": exponent})
    if args.debug:
        config = update_config(config, "advanced", {"debug_mode": True, "log_level": "DEBUG"})
    is_valid, errors = validate_config(config)
    if not is_valid:
        raise ValueError("invalid settings: " + "; ".join(errors))
    return config


def setup_application(args: argparse.Namespace) -> tuple[logging.Logger, ApplicationConfig]:
    """Logging, then the user configuration with command-line overrides."""
    run_label = args.command if args.seed is None else f"{args.command} seed={args.seed}"
    logger = setup_application_logging(
        debug_mode=args.debug, log_directory=args.log_dir, file_output=not args.no_log_file, run_label=run_label
    )
    logger.info(f"Starting gsinclusion version {get_version()}")
    logger.info(f"Python version: {sys.version}")
    config = apply_overrides(get_user_config(), args)
    logger.info("Application setup complete")
    return logger, config


class SpecResolver:
    """Reads spec arguments, resolving @name references from the spec file."""

    def __init__(self, spec_file: Optional[Path]):
        self.entries: Dict[str, SpecEntry] = load_spec_entries(spec_file) if spec_file is not None else {}

    def parse(self, argument: str, parse: Callable[[str, int], T]) -> T:
        if argument.startswith("@"):
            name = argument[1:]
            if name not in self.entries:
                known = ", ".join(self.entries) or "none loaded"
                raise SpecParseError(f"unknown spec reference '{argument}' (known: {known})", 1, 1, argument)
            return parse_entry(self.entries[name], parse)
        return parse(argument, 1)


def _first_parse(argument: str, resolver: SpecResolver, parsers: List[Callable[[str, int], T]]) -> T:
    """The first grammar that accepts the spec; the error of the first one otherwise."""
    first_error: Optional[SpecParseError] = None
    for parse in parsers:
        try:
            return resolver.parse(argument, parse)
        except SpecParseError as e:
            first_error = first_error or e
    assert first_error is not None
    raise first_error


def read_subject(argument: str, subject: str, resolver: SpecResolver, args: argparse.Namespace, q_max: int) -> Subject:
    kind, p = parse_kind(args.kind), parse_exponent(args.p)
    grammars: Dict[str, Callable[[str, int], Subject]] = {
        "space": lambda text, line: parse_space(text, kind, p, q_max, line=line),
        "omega": lambda text, line: parse_omega(text, line),
        "sequence": lambda text, line: parse_sequence(text, q_max, line=line),
        "sequence-system": lambda text, line: parse_sequence_system(text, q_max, line=line),
        "function-system": lambda text, line: parse_function_system(text, q_max, line=line),
    }
    if subject != "auto":
        return resolver.parse(argument, grammars[subject])
    return _first_parse(argument, resolver, list(grammars.values()))


def emit(frame: pd.DataFrame, args: argparse.Namespace) -> None:
    """Print the records and the summary; write both files with --out."""
    if not frame.empty:
        print(frame[["check", "status", "witness", "counterexample"]].to_string(index=False))
    print(render_summary(frame), end="")
    if args.out is not None:
        csv_path, summary_path = write_report(frame, args.out)
        print(f"wrote {csv_path} and {summary_path}")


def _table_exit(table: VerdictTable, source: str, args: argparse.Namespace) -> int:
    emit(report_frame(table, source), args)
    return table.exit_code


def run_conditions(args: argparse.Namespace, config: ApplicationConfig, resolver: SpecResolver) -> int:
    subject = read_subject(args.spec, args.subject, resolver, args, config.sequences.q_max)
    table = condition_table(subject, parse_kind(args.kind), config, args.workers)
    return _table_exit(table, f"conditions {table.subject}", args)


def run_compare_sequences(args: argparse.Namespace, config: ApplicationConfig, resolver: SpecResolver) -> int:
    q_max = config.sequences.q_max
    as_sequence: Callable[[str, int], object] = lambda text, line: parse_sequence(text, q_max, line=line)  # noqa: E731
    as_system: Callable[[str, int], object] = lambda text, line: parse_sequence_system(text, q_max, line=line)  # noqa: E731
    parsers = [as_system] if args.systems else [as_sequence, as_system]
    left = _first_parse(args.left, resolver, parsers)
    right = _first_parse(args.right, resolver, parsers)
    table = compare_sequences(left, right, parse_kind(args.kind), config)  # type: ignore[arg-type]
    return _table_exit(table, f"compare-sequences {table.subject}", args)


def run_compare_functions(args: argparse.Namespace, config: ApplicationConfig, resolver: SpecResolver) -> int:
    q_max = config.sequences.q_max
    as_omega: Callable[[str, int], object] = lambda text, line: parse_omega(text, line)  # noqa: E731
    as_growth: Callable[[str, int], object] = lambda text, line: parse_growth(text, line)  # noqa: E731
    as_system: Callable[[str, int], object] = lambda text, line: parse_function_system(text, q_max, line=line)  # noqa: E731
    left = _first_parse(args.left, resolver, [as_system] if args.systems else [as_omega, as_system])
    right = _first_parse(args.right, resolver, [as_system] if args.systems else [as_growth, as_system])
    table = compare_functions(left, right, parse_kind(args.kind), config)  # type: ignore[arg-type]
    return _table_exit(table, f"compare-functions {table.subject}", args)


def run_decide(args: argparse.Namespace, config: ApplicationConfig, resolver: SpecResolver) -> int:
    kind, p, q_max = parse_kind(args.kind), parse_exponent(args.p), config.sequences.q_max
    as_space: Callable[[str, int], object] = lambda text, line: parse_space(text, kind, p, q_max, line=line)  # noqa: E731
    a = resolver.parse(args.left, as_space)
    b = resolver.parse(args.right, as_space)
    certificate = decide_inclusion(  # type: ignore[arg-type]
        a, b, config, workers=args.workers, cross_check=not args.no_cross_check
    )
    emit(report_frame(certificate, f"decide-inclusion {certificate.space_a} vs {certificate.space_b}"), args)
    for note in certificate.notes:
        print(f"note: {note}")
    return certificate.conclusion.exit_code


def run_verify(args: argparse.Namespace, config: ApplicationConfig, resolver: SpecResolver) -> int:
    results = run_suites(args.suite, config.advanced.seed, config)
    frames = [report_frame(result, f"verify {result.name} (seed {result.seed})") for result in results]
    emit(combine_reports(frames), args)
    return 0 if all(result.passed for result in results) else 1


def run_report(args: argparse.Namespace, config: ApplicationConfig, resolver: SpecResolver) -> int:
    emit(load_reports(args.inputs), args)
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, ApplicationConfig, SpecResolver], int]] = {
    "conditions": run_conditions,
    "compare-sequences": run_compare_sequences,
    "compare-functions": run_compare_functions,
    "decide-inclusion": run_decide,
    "verify": run_verify,
    "report": run_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main application entry point.

    Returns:
        Exit code
    """
    logger: Optional[logging.Logger] = None
    try:
        args = parse_arguments(argv)
        logger, config = setup_application(args)
        resolver = SpecResolver(args.spec_file)
        exit_code = COMMANDS[args.command](args, config, resolver)
        logger.info(f"{args.command} exiting with code {exit_code}")
        return exit_code
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    except KeyboardInterrupt:
        print("\ninterrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    except (SpecParseError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        if logger is not None:
            logger.debug("unexpected failure", exc_info=True)
        print(f"fatal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
