"""Command-line entry point for nilplab.

Exit codes: 0 success, 1 a verdict failed, 2 usage or input error,
3 a computed result contradicted an identity that must hold.
"""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

import structlog
from pydantic import ValidationError

from . import __version__
from .algebra import Algebra, derived_series, strong_series, structure_checks, weak_series
from .config import settings
from .exceptions import DimensionLimitError, InvariantViolation, NilplabError, UnknownScenarioError
from .models import (
    AlgebraFile,
    AnalysisReport,
    CliConfig,
    Command,
    OutputFormat,
    RunSummary,
    ScenarioParams,
    ScenarioReport,
    TowerConfig,
)
from .multiplication import nilpotence_report, operator_nilpotence, stable_image
from .scenarios import SCENARIOS, _TOWERS, custom_tower_report, run_all, run_scenario, tower_report

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3

BANNER = "=" * 60


def configure_logging(level: str) -> None:
    """Send structlog output to stderr so stdout carries only reports."""
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(logging.getLevelName(level.upper())),
        logger_factory=lambda *args: structlog.PrintLogger(sys.stderr),
        cache_logger_on_first_use=False,
    )


# ----------------------------------------------------------------------------
# Analysis
# ----------------------------------------------------------------------------

def analyze_algebra(A: Algebra) -> AnalysisReport:
    """Nilpotence, solvability, identities and operator algebras of A."""
    derived = derived_series(A)
    image, steps = stable_image(A)
    return AnalysisReport(
        field=str(A.field),
        dim=A.dim,
        labels=list(A.labels),
        nilpotence=nilpotence_report(A),
        series=[weak_series(A).summary(), strong_series(A).summary(), derived.summary()],
        solvable=derived.vanishing_index is not None,
        derived_length=derived.vanishing_index,
        structure=structure_checks(A),
        operator_algebras=operator_nilpotence(A),
        stable_image_dim=image.dim,
        stable_image_steps=steps,
    )


def load_algebra_file(path: str) -> AlgebraFile:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return AlgebraFile.model_validate(data)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def format_analysis(report: AnalysisReport) -> str:
    nil = report.nilpotence
    lines = [BANNER, f"Algebra over {report.field}, dimension {report.dim}", BANNER]
    head = f"nilpotent: yes, N1={nil.N1} N2={nil.N2} N3={nil.N3}" if nil.is_nilpotent else "nilpotent: no"
    solvable = f"solvable: yes (length {report.derived_length})" if report.solvable else "solvable: no"
    lines.append(f"{head}, {solvable}")
    s = report.structure
    lines.append(
        f"associative: {_yes(s.associative)}  anticommutative: {_yes(s.anticommutative)}  "
        f"jacobi: {_yes(s.jacobi)}  lie: {_yes(s.lie)}"
    )
    lines.append("")
    lines.append("Series dimensions:")
    for series in report.series:
        end = f"vanishes at {series.vanishing_index}" if series.vanishing_index is not None else "stabilizes"
        lines.append(f"  {series.kind.value:<8} {series.dimensions}  ({end})")
    lines.append("")
    lines.append("Operator algebras:")
    for op in report.operator_algebras:
        index = op.index if op.index is not None else "not nilpotent"
        lines.append(f"  {op.kind:<11} dim {op.dim:<4} index {index}")
    lines.append("")
    lines.append(f"stable image: dimension {report.stable_image_dim} after {report.stable_image_steps} steps")
    return "\n".join(lines)


def format_report(report: ScenarioReport) -> str:
    params = ", ".join(f"{k}={v}" for k, v in report.parameters.items())
    lines = [BANNER, f"Scenario: {report.scenario}" + (f"  ({params})" if params else ""), BANNER]
    if report.error:
        lines.append(f"ERROR: {report.error}")
    for v in report.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        lines.append(f"  [{mark}] {v.claim}: {v.computed}")
        if not v.passed:
            lines.append(f"         expected {v.expected}  ({v.citation})")
    if report.witnesses:
        lines.append("Witnesses:")
        for key, value in report.witnesses.items():
            lines.append(f"  {key}: {value}")
    ok = sum(v.passed for v in report.verdicts)
    result = "PASS" if report.passed else "FAIL"
    lines.append(f"Result: {result} ({ok}/{len(report.verdicts)} verdicts, {report.runtime_ms:.1f} ms)")
    return "\n".join(lines)


def format_summary(summary: RunSummary) -> str:
    parts = [format_report(r) for r in summary.reports]
    parts.append(BANNER)
    parts.append(f"{summary.passed} passed, {summary.failed} failed")
    return "\n".join(parts)


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def cmd_analyze(path: str, output: OutputFormat) -> int:
    A = load_algebra_file(path).to_algebra()
    logger.info("Analyzing algebra", path=path, dim=A.dim)
    report = analyze_algebra(A)
    print(report.model_dump_json(indent=2) if output == OutputFormat.JSON else format_analysis(report))
    return EXIT_OK


def _emit(report: ScenarioReport, output: OutputFormat) -> int:
    print(report.to_json(indent=2) if output == OutputFormat.JSON else format_report(report))
    return EXIT_OK if report.passed else EXIT_VERDICT


def cmd_scenario(name: str, params: ScenarioParams, output: OutputFormat) -> int:
    return _emit(run_scenario(name, params), output)


def cmd_tower(config: CliConfig) -> int:
    if config.input_path:
        with open(config.input_path, encoding="utf-8") as fh:
            tower = TowerConfig.model_validate(json.load(fh))
        if config.params.degrees:
            tower = tower.model_copy(update={"degrees": config.params.degrees})
        return _emit(custom_tower_report(tower), config.output)
    degrees = config.params.degrees or list(settings.tower_degrees)
    return _emit(tower_report(config.scenario_name, degrees), config.output)


def cmd_list(output: OutputFormat) -> int:
    names = sorted(SCENARIOS)
    if output == OutputFormat.JSON:
        print(json.dumps({"scenarios": names, "towers": sorted(_TOWERS)}, indent=2))
    else:
        print("Scenarios:")
        for name in names:
            print(f"  {name}")
        print("Towers:")
        for name in sorted(_TOWERS):
            print(f"  {name}")
    return EXIT_OK


def cmd_run_all(params: ScenarioParams, output: OutputFormat) -> int:
    summary = run_all(params)
    print(summary.model_dump_json(by_alias=True, indent=2) if output == OutputFormat.JSON else format_summary(summary))
    return EXIT_OK if summary.all_passed else EXIT_VERDICT


# ----------------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=[o.value for o in OutputFormat], default=OutputFormat.PRETTY.value)
    common.add_argument("--log-level", default=None, help="overrides NILPLAB_LOG_LEVEL")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--degree", type=int, default=None)
    params.add_argument("--degrees", type=int, nargs="+", default=None)
    params.add_argument("--prime", type=int, default=None)
    params.add_argument("--n", type=int, default=None, help="size of the extremal example")

    parser = argparse.ArgumentParser(prog="nilplab", description="Nilpotence and solvability of finite-dimensional algebras")
    parser.add_argument("--version", action="version", version=f"nilplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="analyze an algebra JSON file")
    analyze.add_argument("path")

    scenario = sub.add_parser("scenario", parents=[common, params], help="run one scenario")
    scenario.add_argument("name")

    tower = sub.add_parser("tower", parents=[common, params], help="tower diagnostics")
    source = tower.add_mutually_exclusive_group()
    source.add_argument("name", nargs="?", default=None)
    source.add_argument("--config", default=None, help="presentation JSON file; use --degrees to override its degrees")
    tower.add_argument("tower_degrees", type=int, nargs="*", metavar="degree")

    sub.add_parser("list", parents=[common], help="list scenarios")
    sub.add_parser("run-all", parents=[common, params], help="run every scenario")
    return parser


def parse_config(args: argparse.Namespace) -> CliConfig:
    degrees = getattr(args, "degrees", None)
    extra = getattr(args, "tower_degrees", None)
    if extra:
        degrees = list(extra) + list(degrees or [])
    params = ScenarioParams(
        degree=getattr(args, "degree", None),
        degrees=degrees,
        prime=getattr(args, "prime", None),
        n=getattr(args, "n", None),
    )
    return CliConfig(
        command=Command(args.command),
        input_path=getattr(args, "path", None) or getattr(args, "config", None),
        scenario_name=getattr(args, "name", None),
        params=params,
        output=OutputFormat(args.output),
    )


def _print_validation_error(e: ValidationError) -> None:
    for err in e.errors():
        where = ".".join(str(p) for p in err["loc"]) or "input"
        print(f"error: {where}: {err['msg']}", file=sys.stderr)


def run(config: CliConfig) -> int:
    if config.command == Command.ANALYZE:
        return cmd_analyze(config.input_path, config.output)
    if config.command == Command.SCENARIO:
        return cmd_scenario(config.scenario_name, config.params, config.output)
    if config.command == Command.TOWER:
        return cmd_tower(config)
    if config.command == Command.LIST:
        return cmd_list(config.output)
    return cmd_run_all(config.params, config.output)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    configure_logging(args.log_level or settings.log_level)

    try:
        config = parse_config(args)
        return run(config)
    except ValidationError as e:
        _print_validation_error(e)
        return EXIT_USAGE
    except json.JSONDecodeError as e:
        print(f"error: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as e:
        logger.error("Invariant violated", error=str(e))
        print(f"internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NilplabError, ValueError, ArithmeticError) as e:
        # inputs were validated above
        logger.error("Computation failed", error=str(e), error_type=type(e).__name__)
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
