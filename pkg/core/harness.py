"""Command-line front door for the lab.

Every subcommand reads a JSON experiment config, applies command-line
overrides, runs one module and writes results.csv plus summary.json.

Exit codes: 0 on success, 2 for configuration problems, 3 for runtime errors.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from .coding.codebook import dump_codebook
from .config.builders import SCHEME_BUILDERS, bt_parts, build_channel, build_distortion, build_joint, build_source
from .config.models import ExperimentConfig
from .config.settings import LabSettings, load_lab_settings, validate_settings
from .errors import ConfigError, DistributionError
from .schemes.runner import build_scheme, run_experiment
from .softcover.identities import verify_q_identities
from .softcover.lab import softcover_sweep, softcover_sweep_wz
from .solvers.berger_tung import berger_tung_bounds, berger_tung_corner, in_berger_tung_region, time_share
from .solvers.blahut_arimoto import rate_distortion_curve
from .solvers.wyner_ziv import wyner_ziv_rate
from .storage.fixtures import FixtureStorage
from .storage.results import ResultStorage, write_curve_figure


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# subcommand -> config schemes it accepts
COMMAND_SCHEMES: Dict[str, Tuple[str, ...]] = {
    "rd": ("rd",),
    "wz-rate": ("wz-rate",),
    "bt-corner": ("bt-corner",),
    "sim-p2p": ("p2p",),
    "sim-wz": ("wz",),
    "sim-bt": ("bt",),
    "softcover": ("softcover",),
    "verify-identities": ("identities",),
    "dump-codebook": ("p2p", "wz", "bt"),
}

# fields that change neither results nor their bytes
RUN_ONLY_FIELDS = {"threads", "output_dir"}

# builds every object from the config, then returns the deferred run
Runner = Callable[[], Dict[str, Any]]


@dataclasses.dataclass
class RunContext:
    """Everything a subcommand needs once the config has been resolved."""

    command: str
    config: ExperimentConfig
    settings: LabSettings
    storage: ResultStorage
    threads: int
    plot: bool
    fixtures_path: str
    block: int


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softcover-lab", description="Likelihood-encoder source coding lab")
    parser.add_argument("command", choices=sorted(COMMAND_SCHEMES), help="Experiment to run")
    parser.add_argument("--config", "-c", help="Path to the JSON experiment config")
    parser.add_argument("--seed", type=int, help="Override master_seed")
    parser.add_argument("--trials", type=int, help="Override the trial count")
    parser.add_argument("--n", type=int, help="Override the blocklength (a single-entry ns for sweeps)")
    parser.add_argument("--out", "-o", help="Output directory for results.csv and summary.json")
    parser.add_argument("--threads", type=int, help="Concurrent workers; results do not depend on it")
    parser.add_argument("--plot", action="store_true", help="Also write an HTML chart for curves and sweeps")
    parser.add_argument("--settings", default="softcover.toml", help="Path to the lab settings TOML")
    parser.add_argument("--fixtures", default="fixtures.yaml", help="Identity fixtures for verify-identities")
    parser.add_argument("--block", type=int, default=0, help="Codebook block for dump-codebook")
    return parser


def _one_line(message: str) -> str:
    return " ".join(str(message).split())


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "invalid config: " + "; ".join(parts)


def load_experiment_config(path: Optional[str], command: str) -> ExperimentConfig:
    """Read and validate a JSON config.

    Raises:
        ConfigError: If the file is missing or not JSON
        ValidationError: If the JSON does not describe a valid experiment
    """
    if path is None:
        if command == "verify-identities":
            return ExperimentConfig(scheme="identities")
        raise ConfigError(f"{command} needs --config PATH")
    config_file = Path(path)
    if not config_file.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}")
    return ExperimentConfig.model_validate(data)


def apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Config with command-line overrides applied and re-validated."""
    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.n is not None and cfg.scheme == "softcover":
        overrides["ns"] = [args.n]
    elif args.n is not None:
        overrides["n"] = args.n
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.threads is not None:
        overrides["threads"] = args.threads
    if not overrides:
        return cfg
    return ExperimentConfig.model_validate({**cfg.model_dump(), **overrides})


def config_echo(cfg: ExperimentConfig) -> Dict[str, Any]:
    """The config fields that determine the results."""
    return cfg.model_dump(mode="json", exclude=RUN_ONLY_FIELDS)


def _plot(ctx: RunContext, points) -> None:
    if ctx.plot:
        write_curve_figure(points, ctx.storage.path("curve.html"))


def prepare_rd(ctx: RunContext) -> Runner:
    cfg = ctx.config
    source = build_source(cfg)
    d = build_distortion(cfg.distortion, source.size)

    def execute():
        points = rate_distortion_curve(source, d, cfg.targets)
        ctx.storage.save_curve(points, cfg.name)
        _plot(ctx, points)
        return {"scheme": "rd", "points": [point.as_row() for point in points], "warnings": []}

    return execute


def prepare_wz_rate(ctx: RunContext) -> Runner:
    cfg = ctx.config
    joint = build_joint(cfg, ("X", "B"))
    d = build_distortion(cfg.distortion, joint.shape[0])

    def execute():
        points = [wyner_ziv_rate(joint, d, target, cfg.restarts, cfg.master_seed) for target in cfg.targets]
        ctx.storage.save_curve(points, cfg.name)
        _plot(ctx, points)
        rows = []
        for point in points:
            row = point.as_row()
            row["phi"] = point.reconstruction_maps[0].to_list() if point.reconstruction_maps else None
            row["upper_bound"] = bool(point.metadata.get("upper_bound", True))
            rows.append(row)
        return {"scheme": "wz-rate", "points": rows, "warnings": []}

    return execute


def prepare_bt_corner(ctx: RunContext) -> Runner:
    cfg = ctx.config
    joint, ch1, ch2, phi1, phi2, d1, d2 = bt_parts(cfg)

    def execute():
        corners = {
            corner: berger_tung_corner(joint, ch1, ch2, phi1, phi2, d1, d2, corner) for corner in (1, 2)
        }
        points = [corners[cfg.corner]]
        if cfg.time_share is not None:
            points = [corners[1], corners[2], time_share(corners[1], corners[2], cfg.time_share)]
        bounds = berger_tung_bounds(joint, ch1, ch2)
        ctx.storage.save_curve(points, cfg.name)
        return {
            "scheme": "bt-corner",
            "points": [point.as_row() for point in points],
            "bounds": dataclasses.asdict(bounds),
            "sum_rate": corners[cfg.corner].sum_rate,
            "in_region_with_margin": in_berger_tung_region(
                corners[cfg.corner].rates[0] + cfg.rate_margin,
                corners[cfg.corner].rates[1] + cfg.rate_margin,
                bounds,
            ),
            "phi1": phi1.to_list(),
            "phi2": phi2.to_list(),
            "warnings": [],
        }

    return execute


def prepare_simulation(ctx: RunContext) -> Runner:
    cfg = ctx.config
    scheme = build_scheme(cfg.scheme, SCHEME_BUILDERS[cfg.scheme](cfg, ctx.settings))

    def execute():
        summary = run_experiment(scheme, parallelism=ctx.threads)
        ctx.storage.save_trials(summary.results)
        document = summary.model_dump(exclude={"results"})
        document["mean_distortion"] = summary.mean_distortion
        return document

    return execute


def prepare_softcover(ctx: RunContext) -> Runner:
    cfg = ctx.config
    joint = build_joint(cfg, ("X", "B") if cfg.variant == "xb" else ("X", "Y"))
    test_channel = build_channel(cfg.test_channel) if cfg.variant == "xb" else None

    def execute():
        if test_channel is not None:
            reports = softcover_sweep_wz(
                joint, test_channel, cfg.rates, cfg.ns, cfg.codebooks_per_cell, cfg.master_seed, ctx.threads
            )
        else:
            reports = softcover_sweep(joint, cfg.rates, cfg.ns, cfg.codebooks_per_cell, cfg.master_seed, ctx.threads)
        ctx.storage.save_curve(reports)
        _plot(ctx, reports)
        return {"scheme": "softcover", "cells": [report.model_dump() for report in reports], "warnings": []}

    return execute


def prepare_identities(ctx: RunContext) -> Runner:
    specs = FixtureStorage(ctx.fixtures_path).select(ctx.config.fixtures)
    fixtures = [spec.to_fixture() for spec in specs]

    def execute():
        reports = [verify_q_identities(fixture) for fixture in fixtures]
        ctx.storage.save_identities(reports)
        failed = [report.fixture for report in reports if not report.passed]
        return {
            "scheme": "identities",
            "fixtures": [{**report.model_dump(), "passed": report.passed} for report in reports],
            "all_passed": not failed,
            "warnings": [f"Identity check failed on {name}" for name in failed],
        }

    return execute


def prepare_dump(ctx: RunContext) -> Runner:
    cfg = ctx.config
    scheme = build_scheme(cfg.scheme, SCHEME_BUILDERS[cfg.scheme](cfg, ctx.settings))
    if not 0 <= ctx.block < scheme.blocks:
        raise ConfigError(f"Block {ctx.block} is outside the experiment's {scheme.blocks} codebook blocks")

    def execute():
        codebooks = scheme.build_codebooks(ctx.block)
        width = max(cb.n for cb in codebooks)
        columns = ["role", "m", "mprime"] + [f"v{t}" for t in range(1, width + 1)]
        rows: List[Dict[str, Any]] = []
        for role, cb in enumerate(codebooks, start=1):
            for entry in dump_codebook(cb):
                rows.append(dict(zip(columns, [role] + entry)))
        ctx.storage.save_rows(columns, rows)
        return {
            "scheme": cfg.scheme,
            "block": ctx.block,
            "codebooks": [
                {"role": role, "seed": cb.seed, "num_m": cb.num_m, "num_mprime": cb.num_mprime, "n": cb.n}
                for role, cb in enumerate(codebooks, start=1)
            ],
            "rates": scheme.rates(),
            "warnings": list(scheme.warnings),
        }

    return execute


PREPARERS: Dict[str, Callable[[RunContext], Runner]] = {
    "rd": prepare_rd,
    "wz-rate": prepare_wz_rate,
    "bt-corner": prepare_bt_corner,
    "sim-p2p": prepare_simulation,
    "sim-wz": prepare_simulation,
    "sim-bt": prepare_simulation,
    "softcover": prepare_softcover,
    "verify-identities": prepare_identities,
    "dump-codebook": prepare_dump,
}


def _fail(code: int, message: str) -> int:
    print(f"error: {_one_line(message)}", file=sys.stderr)
    return code


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    # configuration phase: any failure here is the caller's input
    try:
        settings = load_lab_settings(args.settings)
        problems = validate_settings(settings)
        if problems:
            raise ConfigError("; ".join(problems))
        logging.basicConfig(level=settings.log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)
        cfg = apply_overrides(load_experiment_config(args.config, args.command), args)
        if cfg.scheme not in COMMAND_SCHEMES[args.command]:
            raise ConfigError(
                f"{args.command} cannot run a {cfg.scheme!r} config; expected {COMMAND_SCHEMES[args.command]}"
            )
        ctx = RunContext(
            command=args.command,
            config=cfg,
            settings=settings,
            storage=ResultStorage(cfg.output_dir or settings.results_dir),
            threads=cfg.threads or settings.worker_count,
            plot=args.plot,
            fixtures_path=args.fixtures,
            block=args.block,
        )
        execute = PREPARERS[args.command](ctx)
    except ValidationError as e:
        return _fail(EXIT_CONFIG, _validation_message(e))
    except (ConfigError, DistributionError) as e:
        return _fail(EXIT_CONFIG, str(e))

    try:
        summary = execute()
        ctx.storage.save_summary(summary, config_echo(cfg))
    except Exception as e:
        logger.debug("Run failed", exc_info=True)
        return _fail(EXIT_RUNTIME, f"{type(e).__name__}: {e}")

    if args.command == "verify-identities" and not summary["all_passed"]:
        return _fail(EXIT_RUNTIME, "; ".join(summary["warnings"]))
    logger.info(f"{args.command} finished; outputs in {ctx.storage.output_dir}")
    return EXIT_OK
