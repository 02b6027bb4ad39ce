#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 30, 2025 09:41:27$"

import argparse
import json
import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from dependency_injector.wiring import Provide, inject
from pydantic import ValidationError

from recinla.engine.application.dto.experiment import ExperimentConfig
from recinla.engine.application.use_case.experiment import ExperimentRunner
from recinla.engine.domain.model.errors import ModelValidationError, NumericalError
from recinla.engine.infrastructure.config import AppConfig
from recinla.engine.infrastructure.container import Container
from recinla.engine.infrastructure.logging_config import run_log
from recinla.engine.infrastructure.sentry_config import capture_exception, set_context
from recinla.engine.infrastructure.service.storage.csv_store import CsvResultStore
from recinla.engine.infrastructure.utils.config_loader import load_experiment_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_SINGLE_METHOD = {
    "fit": "full",
    "fit-recursive": "recursive",
    "fit-consensus": "consensus",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recinla",
        description="Laplace, recursive and consensus inference for latent Gaussian models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory")
        return p

    common(sub.add_parser("simulate", help="simulate a dataset and write it as CSV"))
    for name, method in _SINGLE_METHOD.items():
        p = common(sub.add_parser(name, help=f"{method} fit of a simulated or stored dataset"))
        p.add_argument("--data", help="dataset directory written by simulate")
        p.add_argument("--partitions", help="partition rule: time:<size>, rows:<count> or random:<count>")
    compare = common(sub.add_parser("compare", help="run every configured method and write report.json"))
    compare.add_argument("--data", help="dataset directory written by simulate")
    compare.add_argument("--partitions", help="partition rule: time:<size>, rows:<count> or random:<count>")
    compare.add_argument("--replicates", type=int, help="run the seeded replicate study instead")
    oracle = sub.add_parser("oracle", help="check the engine against the closed-form gaussian posterior")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--constrained", action="store_true", help="add a sum-to-zero constraint")
    return parser


def _config(args: argparse.Namespace, settings: AppConfig) -> ExperimentConfig:
    config = load_experiment_config(
        path=args.config,
        seed=args.seed,
        out=args.out,
        partitions=getattr(args, "partitions", None),
    )
    if config.output_dir is None:
        config = config.model_copy(update={"output_dir": str(Path(settings.harness.output_dir) / config.name)})
    if args.config is None and args.seed is None:
        config = config.model_copy(update={"seed": settings.harness.seed})
    return config


@inject
def run_simulate(
    args: argparse.Namespace,
    runner: ExperimentRunner = Provide[Container.experiment_runner],
    settings: AppConfig = Provide[Container.config],
) -> int:
    config = _config(args, settings)
    dataset = runner.simulate(config)
    out = Path(config.output_dir) / "dataset"
    runner.store.write_dataset(dataset, out)
    print(json.dumps({"dataset": dataset.kind, "rows": len(dataset.observations), "out": str(out)}))
    return EXIT_OK


@inject
def run_fit(
    args: argparse.Namespace,
    runner: ExperimentRunner = Provide[Container.experiment_runner],
    settings: AppConfig = Provide[Container.config],
) -> int:
    """
    fit, fit-recursive, fit-consensus and compare.

    The single-method commands narrow the configured methods; compare
    runs all of them and prints the report.
    """
    config = _config(args, settings)
    if args.command in _SINGLE_METHOD:
        config = config.model_copy(update={"methods": [_SINGLE_METHOD[args.command]]})
    set_context("experiment", {"name": config.name, "seed": config.seed, "methods": list(config.methods)})
    with run_log(config.output_dir) as log_path:
        logger.info(f"Running '{args.command}' for '{config.name}' (seed {config.seed}), log at {log_path}")
        return _execute(args, config, runner)


def _execute(args: argparse.Namespace, config: ExperimentConfig, runner: ExperimentRunner) -> int:
    if getattr(args, "replicates", None):
        study = runner.replicate_study(config, args.replicates)
        out = Path(config.output_dir)
        (out / "replicates.json").write_text(study.model_dump_json(indent=2), encoding="utf-8")
        print(json.dumps({"replicates": args.replicates, "fusion_wins": study.fusion_wins(), "out": str(out)}))
        return EXIT_OK

    dataset = CsvResultStore.read_dataset(args.data) if args.data else None
    report = runner.run_experiment(config, dataset)
    print(report.model_dump_json(indent=2))
    if report.errors:
        failed = [m for m in report.errors if m in config.methods]
        if len(failed) == len(config.methods):
            return EXIT_NUMERICAL
    return EXIT_OK


@inject
def run_oracle(
    args: argparse.Namespace,
    runner: ExperimentRunner = Provide[Container.experiment_runner],
) -> int:
    result = runner.oracle_check(args.seed, constrained=args.constrained)
    print(json.dumps(result, indent=2))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Dispatch a command and map failures to exit codes.

    Returns:
        0 on success, 2 on invalid input, 3 on numerical failure
    """
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return run_simulate(args)
        if args.command == "oracle":
            return run_oracle(args)
        return run_fit(args)
    except (NumericalError, np.linalg.LinAlgError) as e:
        # LinAlgError is a ValueError
        logger.exception(f"Numerical failure in '{args.command}': {e}")
        capture_exception(e, command=args.command)
        return EXIT_NUMERICAL
    except (ModelValidationError, ValidationError, ValueError) as e:
        logger.error(f"Invalid input for '{args.command}': {e}")
        capture_exception(e, command=args.command)
        return EXIT_VALIDATION
