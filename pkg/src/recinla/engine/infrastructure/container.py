#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 22, 2025 11:12:45$"

from dependency_injector import containers, providers

from recinla.engine.application.use_case.consensus import ConsensusEngine
from recinla.engine.application.use_case.experiment import ExperimentRunner
from recinla.engine.application.use_case.laplace import LaplaceEngine
from recinla.engine.application.use_case.recursive import RecursiveEngine
from recinla.engine.infrastructure.config import AppConfig
from recinla.engine.infrastructure.service.linalg.cholesky import SparseCholeskySolver
from recinla.engine.infrastructure.service.storage.csv_store import CsvResultStore


class Container(containers.DeclarativeContainer):
    """
    Dependency Injection Container.

    - Configuration: environment-backed settings
    - Infrastructure: sparse Cholesky solver, result store
    - Use Cases: Laplace, recursive and consensus engines, experiment runner
    """

    config = providers.Singleton(AppConfig.from_env)

    # Infrastructure Layer
    solver = providers.Singleton(
        SparseCholeskySolver,
        dense_threshold=config.provided.linalg.dense_threshold,
        jitter_factor=config.provided.jitter.initial_factor,
        jitter_growth=config.provided.jitter.growth,
        max_tries=config.provided.jitter.max_tries,
        pivot_tolerance=config.provided.jitter.pivot_tolerance,
    )

    result_store = providers.Singleton(CsvResultStore)

    # Application Layer - Use Cases
    laplace_engine = providers.Factory(
        LaplaceEngine,
        solver=solver,
        settings=config.provided.engine,
        max_kronecker_dim=config.provided.linalg.max_kronecker_dim,
    )

    recursive_engine = providers.Factory(
        RecursiveEngine,
        laplace=laplace_engine,
        diagnostics=config.provided.diagnostics,
    )

    consensus_engine = providers.Factory(
        ConsensusEngine,
        laplace=laplace_engine,
    )

    experiment_runner = providers.Factory(
        ExperimentRunner,
        solver=solver,
        engine_settings=config.provided.engine,
        diagnostics=config.provided.diagnostics,
        store=result_store,
        max_kronecker_dim=config.provided.linalg.max_kronecker_dim,
    )

    wiring_config = containers.WiringConfiguration(
        modules=[
            "recinla.engine.interface_adapter.cli.commands",
        ]
    )
