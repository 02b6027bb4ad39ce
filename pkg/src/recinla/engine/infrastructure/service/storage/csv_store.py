#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 29, 2025 15:02:18$"

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from recinla.engine.application.dto.dataset import Dataset
from recinla.engine.application.dto.report import ComparisonReport
from recinla.engine.application.interface.store import BaseResultStore
from recinla.engine.domain.model.approx import PosteriorSummary
from recinla.engine.domain.model.errors import ModelValidationError
from recinla.engine.domain.model.fusion import AggregationOperator, Region
from recinla.engine.domain.model.recursive import RecursiveState
from recinla.engine.domain.model.sparse import SparseSymmetric

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable), encoding="utf-8")


class CsvResultStore(BaseResultStore):
    """
    Plot-ready CSV and JSON files under one directory per method.

    float_format fixes the printed precision so a seeded run writes the
    same bytes every time.
    """

    def __init__(self, float_format: str = "%.12g"):
        self.float_format = float_format

    def _to_csv(self, frame: pd.DataFrame, path: Path) -> None:
        frame.to_csv(path, index=False, float_format=self.float_format)

    def write_summary(self, summary: PosteriorSummary, out_dir: Path, extra: dict = None) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        latent = summary.latent_marginals
        n_nodes, n_grid = latent.grid.shape
        columns = {"node": np.arange(n_nodes), "mean": latent.mean, "sd": latent.sd}
        for i in range(n_grid):
            columns[f"grid_{i}"] = latent.grid[:, i]
        for i in range(n_grid):
            columns[f"density_{i}"] = latent.density[:, i]
        self._to_csv(pd.DataFrame(columns), out_dir / "latent_marginals.csv")

        frames = [
            pd.DataFrame({
                "name": m.name,
                "internal": m.internal_grid,
                "internal_density": m.internal_density,
                "natural": m.natural_grid,
                "natural_density": m.natural_density,
                "degenerate": m.degenerate,
            })
            for m in summary.hyper_marginals
        ]
        hyper = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(
            columns=["name", "internal", "internal_density", "natural", "natural_density", "degenerate"]
        )
        self._to_csv(hyper, out_dir / "hyper_marginals.csv")

        payload = {
            "method": summary.method,
            "log_marginal_likelihood": summary.log_marginal_likelihood,
            "hyperparameters": {
                m.name: {
                    "natural_mode": m.natural_mode,
                    "natural_mean": m.natural_mean,
                    "internal_mean": m.internal_mean,
                    "internal_sd": m.internal_sd,
                }
                for m in summary.hyper_marginals
            },
            "metadata": summary.metadata,
            **(extra or {}),
        }
        _write_json(payload, out_dir / "summary.json")
        logger.info(f"Wrote {summary.method} summary to {out_dir}")

    def write_trace(self, state: RecursiveState, out_dir: Path) -> None:
        """One row per (step, support point) with the step's drift metrics."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        rows = []
        for step, records in enumerate(state.records, start=1):
            drift = state.diagnostics[step - 1] if step - 1 < len(state.diagnostics) else None
            for point, record in enumerate(records):
                rows.append({
                    "step": step,
                    "point": point,
                    "conditional_log_likelihood": record.conditional_log_likelihood,
                    "iterations": record.iterations,
                    "converged": record.converged,
                    "failed": record.failed,
                    "mode_shift": drift.per_step_mode_shift if drift else np.nan,
                    "boundary_mass": drift.boundary_mass_fraction if drift else np.nan,
                    "drift_flagged": drift.flagged if drift else False,
                })
        self._to_csv(pd.DataFrame(rows), out_dir / "recursive_trace.csv")

    def write_report(self, report: ComparisonReport, out_dir: Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.json").write_text(report.model_dump_json(indent=2), encoding="utf-8")
        logger.info(f"Wrote comparison report to {out_dir / 'report.json'}")

    def write_dataset(self, dataset: Dataset, out_dir: Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self._to_csv(dataset.observations, out_dir / "observations.csv")
        self._to_csv(dataset.truth, out_dir / "truth.csv")
        _write_json({"kind": dataset.kind, "meta": dataset.meta}, out_dir / "dataset.json")

    @staticmethod
    def read_dataset(in_dir: PathLike) -> Dataset:
        in_dir = Path(in_dir)
        header = json.loads((in_dir / "dataset.json").read_text(encoding="utf-8"))
        observations = pd.read_csv(in_dir / "observations.csv")
        truth = pd.read_csv(in_dir / "truth.csv")
        return Dataset(kind=header["kind"], observations=observations, truth=truth, meta=header["meta"])

    # ------------------------------------------------------------------
    # Triplet matrices and regions
    # ------------------------------------------------------------------

    def write_matrix(self, matrix: SparseSymmetric, path: PathLike) -> None:
        """Lower-triangle triplets under a `dim=<n>` header line."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame({"row": matrix.rows, "col": matrix.cols, "value": matrix.values})
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(f"dim={matrix.dim}\n")
            frame.to_csv(fh, index=False, float_format="%.17g")

    @staticmethod
    def read_matrix(path: PathLike) -> SparseSymmetric:
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("dim="):
                raise ModelValidationError(f"{path} lacks the dim=<n> header")
            frame = pd.read_csv(fh)
        return SparseSymmetric(
            dim=int(header[len("dim="):]),
            rows=frame["row"].to_numpy(dtype=np.int64),
            cols=frame["col"].to_numpy(dtype=np.int64),
            values=frame["value"].to_numpy(dtype=np.float64),
        )

    def write_operator(self, operator: AggregationOperator, path: PathLike) -> None:
        """Rectangular operators use `dim=<rows>x<cols>`."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        coo = operator.matrix.tocoo()
        frame = pd.DataFrame({"row": coo.row, "col": coo.col, "value": coo.data})
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(f"dim={coo.shape[0]}x{coo.shape[1]}\n")
            frame.to_csv(fh, index=False, float_format="%.17g")

    @staticmethod
    def read_regions(membership_csv: PathLike, measures_csv: PathLike = None) -> list[Region]:
        """
        Regions from `region_id, site_index` membership rows and an optional
        `region_id, measure` table; without measures each region's measure
        is its member count.
        """
        membership = pd.read_csv(membership_csv)
        missing = {"region_id", "site_index"} - set(membership.columns)
        if missing:
            raise ModelValidationError(f"membership table lacks columns {sorted(missing)}")
        measures = {}
        if measures_csv is not None:
            table = pd.read_csv(measures_csv)
            measures = dict(zip(table["region_id"], table["measure"].astype(float)))
        regions = []
        for region_id, rows in membership.groupby("region_id", sort=True):
            members = tuple(int(s) for s in rows["site_index"])
            regions.append(Region(id=region_id, member_points=members, measure=measures.get(region_id, float(len(members)))))
        return regions
