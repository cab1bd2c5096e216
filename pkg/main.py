"""
Hilbert Embedding Lab - Delta-state manifolds and quantum geometry

Main application entry point.
"""

import argparse
import asyncio
import json
import logging
import os
import subprocess
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from core.exceptions import (
    ConfigError,
    ExperimentError,
    HarnessError,
    NumericError,
    config_error_from_validation,
)
from core.schemas import ExperimentConfig, ExperimentKind, Report, Table
from core.settings import HarnessSettings
from plugins.base import ExperimentBase
from plugins.registry import RUN_ORDER, ExperimentRegistry, get_registry
from storage.artifacts import ArtifactWriter
from storage.database import RunDatabase


logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

Plan = list[tuple[str, ExperimentBase, BaseModel]]


def harness_version() -> str:
    """git describe of the source tree, or 'unversioned' outside a checkout."""
    try:
        described = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return "unversioned"
    return described.stdout.strip() or "unversioned"


def load_config(path: str) -> ExperimentConfig:
    """
    Read and validate a JSON experiment config.

    Raises:
        ConfigError: If the file is unreadable, not JSON or fails the schema
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror or e}", "/") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}", "/") from e
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object", "/")
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        raise config_error_from_validation(e) from e


def plan_experiments(config: ExperimentConfig, registry: ExperimentRegistry) -> Plan:
    """
    Resolve the experiments of a config and validate their parameters.

    For `all`, parameters are keyed by experiment id. Everything is
    validated before anything runs.

    Raises:
        ConfigError: With a JSON pointer to the first offending key
    """
    if config.experiment == ExperimentKind.ALL:
        available = [d.experiment_id for d in registry.list_experiments()]
        for key in config.parameters:
            if key not in available:
                raise ConfigError(f"unknown experiment '{key}'", f"/parameters/{key}")
        requested = [(experiment_id, config.parameters.get(experiment_id, {}), f"/parameters/{experiment_id}")
                     for experiment_id in available]
    else:
        requested = [(config.experiment.value, config.parameters, "/parameters")]

    plan: Plan = []
    for experiment_id, parameters, prefix in requested:
        experiment = registry.get_experiment(experiment_id)
        if experiment is None:
            raise ConfigError(f"experiment '{experiment_id}' is not registered", "/experiment")
        if not isinstance(parameters, dict):
            raise ConfigError("parameters must be an object", prefix)
        plan.append((experiment_id, experiment, experiment.parse_params(parameters, prefix)))
    return plan


def run_plan(
    config: ExperimentConfig,
    plan: Plan,
    seed: int,
    parallel_trials: Optional[int] = None,
    echo: Callable[[str], None] = print
) -> tuple[Report, dict[str, list[Table]]]:
    """
    Execute a validated plan.

    Raises:
        ExperimentError: Wrapping the module error with the experiment id
    """
    report = Report(
        experiment=config.experiment.value,
        version=harness_version(),
        config=config.model_copy(update={"seed": seed}).model_dump(mode="json"),
        seed=seed,
    )
    tables: dict[str, list[Table]] = {}
    for index, (experiment_id, experiment, params) in enumerate(plan, 1):
        echo(f"\n[{index}/{len(plan)}] Running {experiment_id}...")
        try:
            result = experiment.run(params, seed, parallel_trials)
        except HarnessError as e:
            raise ExperimentError(experiment_id, e) from e
        except (np.linalg.LinAlgError, FloatingPointError) as e:
            raise ExperimentError(experiment_id, NumericError(str(e))) from e
        for check in result.checks:
            mark = "✓" if check.passed else "✗"
            echo(f"  {mark} {check.name}: {check.value:.6g}")
        report.results.append(result)
        tables[experiment_id] = result.tables
    report.finished_at = datetime.now(timezone.utc)
    return report, tables


def _save_history(db_path: Path, report: Report) -> None:
    async def save() -> None:
        db = RunDatabase(str(db_path))
        await db.initialize()
        await db.save_run(report)

    try:
        asyncio.run(save())
    except Exception as e:
        logger.warning("Run history not updated (%s): %s", db_path, e)


def _discover(echo: Callable[[str], None]) -> ExperimentRegistry:
    registry = get_registry()
    if not registry.list_experiments():
        registry.discover_experiments()
    experiments = registry.list_experiments()
    echo(f"Loaded {len(experiments)} experiment(s)")
    return registry


def command_run(args: argparse.Namespace, settings: HarnessSettings, echo: Callable[[str], None]) -> int:
    echo("=" * 60)
    echo("Hilbert Embedding Lab")
    echo("=" * 60)

    echo("\n[1/4] Loading experiments...")
    registry = _discover(echo)

    echo("\n[2/4] Validating config...")
    config = load_config(args.config)
    plan = plan_experiments(config, registry)
    seed = args.seed if args.seed is not None else config.seed
    output_dir = settings.resolve_output_dir(args.out, config.output_dir)
    echo(f"Experiment: {config.experiment.value}  seed: {seed}  output: {output_dir}")

    echo("\n[3/4] Running...")
    report, tables = run_plan(config, plan, seed, args.parallel_trials, echo)

    echo("\n[4/4] Writing artifacts...")
    writer = ArtifactWriter(output_dir)
    writer.write_tables(report, tables)
    report_path = writer.write_report(report)
    _save_history(settings.resolve_db_path(output_dir), report)
    echo(f"Report: {report_path}")

    failed = [check.name for check in report.checks if not check.passed]
    echo("\n" + "=" * 60)
    if failed:
        echo(f"✗ {len(failed)} of {len(report.checks)} check(s) failed: {', '.join(failed)}")
    else:
        echo(f"✓ All {len(report.checks)} checks passed")
    echo("=" * 60)
    return EXIT_FAILED if failed else EXIT_PASS


def command_validate(args: argparse.Namespace, settings: HarnessSettings, echo: Callable[[str], None]) -> int:
    registry = _discover(echo)
    config = load_config(args.config)
    plan = plan_experiments(config, registry)
    echo(f"✓ {args.config} is valid ({', '.join(experiment_id for experiment_id, _, _ in plan)})")
    return EXIT_PASS


def command_list(args: argparse.Namespace, settings: HarnessSettings, echo: Callable[[str], None]) -> int:
    registry = _discover(lambda message: None)
    for definition in registry.list_experiments():
        print(f"  • {definition.display_name} ({definition.experiment_id}) v{definition.experiment_version}"
              f" [{definition.category.value}]")
        print(f"      {definition.description}")
    missing = [experiment_id for experiment_id in RUN_ORDER if registry.get_definition(experiment_id) is None]
    if missing:
        logger.warning("Experiments not registered: %s", ", ".join(missing))
    return EXIT_PASS


def command_history(args: argparse.Namespace, settings: HarnessSettings, echo: Callable[[str], None]) -> int:
    db_path = settings.resolve_db_path(settings.resolve_output_dir(args.out))
    if not db_path.exists():
        print(f"No run history at {db_path}")
        return EXIT_PASS

    async def fetch():
        db = RunDatabase(str(db_path))
        await db.initialize()
        if args.check:
            return await db.get_check_history(args.check, args.limit)
        return await db.list_runs(args.experiment, args.limit)

    rows = asyncio.run(fetch())
    if args.check:
        for check in rows:
            mark = "✓" if check.passed else "✗"
            print(f"  {mark} {check.name}: {check.value:.6g}")
        return EXIT_PASS
    for run in rows:
        mark = "✓" if run.passed else "✗"
        print(f"  {mark} {run.started_at:%Y-%m-%d %H:%M:%S} {run.experiment:<12} seed={run.seed:<6}"
              f" {run.n_checks - run.n_failed}/{run.n_checks} {run.version} {run.run_id}")
    return EXIT_PASS


def _add_global_options(parser: argparse.ArgumentParser, defaults: bool) -> None:
    # without defaults, an option absent after the subcommand keeps its top-level value
    def default(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--seed", type=int, default=default(None), help="Override the config seed")
    parser.add_argument(
        "--out", default=default(None), help="Output directory (overrides HE_OUT_DIR and the config)"
    )
    parser.add_argument("--quiet", action="store_true", default=default(False), help="Only warnings and errors")


def build_parser() -> argparse.ArgumentParser:
    """
    Argument parser; --seed, --out and --quiet go before or after the subcommand.
    """
    common = argparse.ArgumentParser(add_help=False)
    _add_global_options(common, defaults=False)

    parser = argparse.ArgumentParser(
        prog="hilbert-lab",
        description="Numerical experiments on delta-state manifolds and quantum state geometry.",
    )
    _add_global_options(parser, defaults=True)
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Run an experiment config")
    run.add_argument("config", help="Path to a JSON experiment config")
    run.add_argument(
        "--parallel-trials",
        type=int,
        nargs="?",
        const=os.cpu_count() or 1,
        default=None,
        help="Worker processes for independent trials (diffuse only)",
    )
    run.set_defaults(handler=command_run)

    validate = commands.add_parser("validate", parents=[common], help="Validate a config without running it")
    validate.add_argument("config")
    validate.set_defaults(handler=command_validate)

    listing = commands.add_parser("list", parents=[common], help="List registered experiments")
    listing.set_defaults(handler=command_list)

    history = commands.add_parser("history", parents=[common], help="Show stored runs")
    history.add_argument("--experiment", default=None)
    history.add_argument("--check", default=None, help="Show the history of one check instead")
    history.add_argument("--limit", type=int, default=20)
    history.set_defaults(handler=command_history)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        0 when all checks pass, 1 on failed checks, 2 on config errors,
        3 on numeric errors
    """
    args = build_parser().parse_args(argv)
    try:
        settings = HarnessSettings.from_env()
    except ValidationError as e:
        print(f"✗ {config_error_from_validation(e, '/env')}", file=sys.stderr)
        return EXIT_CONFIG

    level = logging.WARNING if args.quiet else getattr(logging, settings.log_level)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    echo: Callable[[str], None] = (lambda message: None) if args.quiet else print

    try:
        return args.handler(args, settings, echo)
    except ConfigError as e:
        print(f"✗ Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except HarnessError as e:
        print(f"✗ Error: {e}", file=sys.stderr)
        return e.exit_code or EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
