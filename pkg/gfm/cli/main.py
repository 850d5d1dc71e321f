"""Command-line entry point: run, verify and sweep."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from ..config.settings import config
from ..models.experiment import expand_sweep, grid_points, load_experiment, load_sweep
from ..services.verify_suites import failed_checks, run_suite
from ..tasks.experiment_tasks import build_view, execute_jobs, resolve_parameters, seed_jobs
from ..tasks.worker_pool import resolve_workers
from ..utils.constants import EXIT_CONFIG, EXIT_OK, RUN_CSV_COLUMNS, VERIFY_SUITES
from ..utils.error_handlers import handle_cli_errors
from ..utils.exceptions import GridTooLargeError, VerificationFailure
from ..utils.logging import configure_logging
from .reports import write_check_reports, write_run_outputs

logger = structlog.get_logger(__name__)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the config-error code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gfm",
        description="Gradient-free methods for nonsmooth nonconvex objectives: experiments and verification",
    )
    parser.add_argument("--workers", type=int, default=None,
                        help="worker pool size (default: GFM_WORKERS or the number of cores)")
    parser.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    parser.add_argument("--log-level", default=config.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--json-logs", action="store_true", help="render logs as JSON lines")

    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run an experiment file")
    run.add_argument("config", type=Path)
    run.add_argument("--seed", type=int, default=None, help="override experiment.master_seed")

    verify = commands.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite", choices=list(VERIFY_SUITES) + ["all"])
    verify.add_argument("--seed", type=int, default=0)

    sweep = commands.add_parser("sweep", help="run an experiment over a parameter grid")
    sweep.add_argument("config", type=Path)
    return parser


def _finish_rows(out_dir: Path, name: str, rows, columns, sidecar, abort) -> int:
    write_run_outputs(out_dir, name, rows, columns, sidecar, complete=abort is None)
    if abort is not None:
        raise abort
    return EXIT_OK


@handle_cli_errors
def cmd_run(config_path: Path, out_dir: Path, workers: int, seed: Optional[int] = None) -> int:
    experiment, raw = load_experiment(config_path)
    if seed is not None:
        experiment = experiment.model_copy(
            update={"experiment": experiment.experiment.model_copy(update={"master_seed": seed})}
        )
    resolved = resolve_parameters(experiment, build_view(experiment))
    rows, abort = execute_jobs(seed_jobs(experiment), workers)

    sidecar = {
        "command": "run",
        "config_file": str(config_path),
        "config": raw,
        "validated": experiment.model_dump(mode="json"),
        "resolved": resolved.to_dict(),
    }
    return _finish_rows(out_dir, experiment.experiment.name, rows, RUN_CSV_COLUMNS, sidecar, abort)


@handle_cli_errors
def cmd_verify(suite: str, seed: int, out_dir: Path, workers: int) -> int:
    reports = run_suite(suite, seed, workers)
    write_check_reports(out_dir, suite, seed, reports)
    failed = failed_checks(reports)
    if failed:
        raise VerificationFailure(f"{len(failed)} of {len(reports)} checks failed in suite {suite!r}",
                                  failed_checks=failed)
    logger.info("Verification passed", suite=suite, checks=len(reports))
    return EXIT_OK


@handle_cli_errors
def cmd_sweep(config_path: Path, out_dir: Path, workers: int) -> int:
    sweep, raw, text = load_sweep(config_path)
    grid = sweep.sweep.grid
    n_points = len(grid_points(grid))
    if n_points > sweep.sweep.max_points:
        raise GridTooLargeError(
            f"grid has {n_points} points, more than the cap of {sweep.sweep.max_points}",
            n_points=n_points, cap=sweep.sweep.max_points,
        )

    jobs = []
    for point, experiment in expand_sweep(raw, grid, text):
        jobs.extend(seed_jobs(experiment, point))
    logger.info("Sweep expanded", grid_points=n_points, jobs=len(jobs))
    rows, abort = execute_jobs(jobs, workers)

    columns = RUN_CSV_COLUMNS + [axis for axis in grid if axis not in RUN_CSV_COLUMNS]
    sidecar = {
        "command": "sweep",
        "config_file": str(config_path),
        "config": raw,
        "grid_points": n_points,
    }
    return _finish_rows(out_dir, sweep.experiment.name, rows, columns, sidecar, abort)


def main(argv: Optional[List[str]] = None) -> int:
    args = create_parser().parse_args(argv)
    configure_logging(args.log_level, json_output=args.json_logs)
    workers = resolve_workers(args.workers)

    if args.command == "run":
        return cmd_run(args.config, args.out, workers, args.seed)
    if args.command == "verify":
        return cmd_verify(args.suite, args.seed, args.out, workers)
    return cmd_sweep(args.config, args.out, workers)


if __name__ == "__main__":
    sys.exit(main())
