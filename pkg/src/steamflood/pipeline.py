"""End-to-end orchestration over a content-addressed artifact store.

Every stage reads its inputs from and writes its outputs to one artifact
directory keyed by the config hash, so results from different
configurations can never mix. Written artifacts are treated as immutable.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import evaluation, gbt, optimizer, reports, synthfield
from .config import RunConfig
from .errors import SteamfloodError
from .features import (
    FeatureSpec,
    ForecastConfig,
    build_matrix,
    derive_gas_day_rate,
    one_hot,
    pivot_infill,
    split_by_kind,
)
from .ingest import PadTable, consolidate, impute, parse_source


@dataclass
class ArtifactStore:
    root: Path

    @classmethod
    def for_config(cls, cfg: RunConfig) -> "ArtifactStore":
        store = cls(root=Path(cfg.workdir) / "artifacts" / cfg.config_hash())
        store.root.mkdir(parents=True, exist_ok=True)
        return store

    def path(self, name: str) -> Path:
        return self.root / name

    def has(self, name: str) -> bool:
        return self.path(name).exists()

    def require(self, name: str) -> Path:
        p = self.path(name)
        if not p.exists():
            raise SteamfloodError(f"missing artifact {name!r}; run the producing stage first")
        return p

    def model_hash(self) -> str:
        return hashlib.sha256(self.require("model.json").read_bytes()).hexdigest()[:12]


def run_generate(cfg: RunConfig) -> list:
    """Emit the five synthetic sources plus the ground truth next to them."""
    if cfg.synthfield is None:
        raise SteamfloodError("config has no synthfield section")
    datadir = Path(cfg.workdir) / "data"
    paths, _ = synthfield.write_sources(cfg.synthfield, datadir)
    return paths


def run_ingest(cfg: RunConfig, store: ArtifactStore) -> PadTable:
    records = []
    corrections: list = []
    for desc, path in cfg.sources:
        with open(path, "r", encoding="utf-8") as fh:
            records.append(parse_source(fh, desc, corrections))
    table = impute(consolidate(records, cfg.pad_id), cfg.imputation)
    table.to_csv(store.path("pad_table.csv"))
    table.imputation_log_frame().to_csv(store.path("imputation_log.csv"), index=False)
    if corrections:
        pd.DataFrame(corrections, columns=["line", "well_name", "field", "reason"]).to_csv(
            store.path("parse_corrections.csv"), index=False
        )
    return table


def load_pad(store: ArtifactStore, pad_id: str = "pad") -> PadTable:
    return PadTable.from_csv(store.require("pad_table.csv"), pad_id=pad_id)


def _prepared(table: PadTable):
    infill, production = split_by_kind(table)
    steam = pivot_infill(infill)
    production = one_hot(derive_gas_day_rate(production))
    return steam, production


def run_train(cfg: RunConfig, store: ArtifactStore, n_workers: int = 1) -> gbt.GbtModel:
    """Grid search with expanding-window CV on the training dates, then a
    final fit of the winner on the whole training split."""
    table = load_pad(store, cfg.pad_id)
    steam, production = _prepared(table)

    max_k = max(cfg.k_grid)
    probe = build_matrix(steam, production, ForecastConfig(t=cfg.forecast.t, k=max_k))
    train_probe, _ = evaluation.holdout_split(probe, cfg.train_frac)
    train_dates = np.unique(train_probe.dates)
    plan = evaluation.time_series_folds(train_dates, cfg.n_folds)

    # restrict CV to the training date range
    train_cut = train_dates[-1]
    train_table = table.copy()
    train_table.frame = table.frame[table.frame["date"] <= pd.Timestamp(train_cut)].reset_index(drop=True)

    result = evaluation.grid_search(
        train_table, cfg.grid, cfg.k_grid, cfg.forecast.t, plan,
        base_params=cfg.gbt_base, n_workers=n_workers,
    )
    result.table.to_csv(store.path("cv_table.csv"), index=False)

    matrix = build_matrix(steam, production, result.best_forecast)
    train_matrix, _ = evaluation.holdout_split(matrix, cfg.train_frac)
    model = gbt.train(train_matrix, result.best_params, n_workers=n_workers)
    store.path("model.json").write_text(model.to_json())
    store.path("feature_spec.json").write_text(matrix.spec.to_json())
    return model


def load_model(store: ArtifactStore) -> gbt.GbtModel:
    return gbt.GbtModel.from_json(store.require("model.json").read_text())


def load_spec(store: ArtifactStore) -> FeatureSpec:
    return FeatureSpec.from_json(store.require("feature_spec.json").read_text())


def run_evaluate(cfg: RunConfig, store: ArtifactStore) -> dict:
    """Model-vs-baseline metrics on train and test, plus the monthly report.

    Both metrics are computed on the identical row set: rows whose t-day
    prior actual production exists, so the copy-forward baseline is
    defined.
    """
    table = load_pad(store, cfg.pad_id)
    model = load_model(store)
    spec = load_spec(store)
    steam, production = _prepared(table)
    matrix = build_matrix(steam, production, ForecastConfig(spec.t, spec.k, spec.include_oil_lags))
    train_m, test_m = evaluation.holdout_split(matrix, cfg.train_frac)

    metrics = {}
    for name, part in (("train", train_m), ("test", test_m)):
        preds = gbt.predict(model, part.X)
        base_preds, _ = gbt.baseline_predict(table, spec.t, part.dates, part.well_names)
        ok = ~np.isnan(base_preds)
        metrics[name] = {
            "rmse": {
                "model": evaluation.rmse(part.y[ok], preds[ok]),
                "baseline": evaluation.rmse(part.y[ok], base_preds[ok]),
            },
            "r2": {
                "model": evaluation.r2(part.y[ok], preds[ok]),
                "baseline": evaluation.r2(part.y[ok], base_preds[ok]),
            },
        }
    store.path("metrics.json").write_text(json.dumps(metrics, indent=2))

    test_preds = gbt.predict(model, test_m.X)
    rows = evaluation.monthly_report(test_preds, test_m.y, test_m.dates)
    frame = evaluation.monthly_frame(rows)
    frame.to_csv(store.path("monthly.csv"), index=False)
    reports.render_monthly(frame, store.path("monthly.png"))
    return metrics


def run_importance(cfg: RunConfig, store: ArtifactStore, top: int = 8):
    model = load_model(store)
    report = gbt.importance(model, top=top)
    report.to_frame().to_csv(store.path("importance.csv"), index=False)
    reports.render_importance(report.entries, store.path("importance.png"))
    return report


def build_optimize_request(cfg: RunConfig, store: ArtifactStore, step=None) -> optimizer.OptimizeRequest:
    table = load_pad(store, cfg.pad_id)
    spec = load_spec(store)
    last = table.frame["date"].max()
    horizon = pd.date_range(
        last + pd.Timedelta(days=1), periods=cfg.opt_horizon_days, freq="D"
    )
    return optimizer.OptimizeRequest(
        horizon_dates=horizon,
        context=table,
        spec=spec,
        total_steam=cfg.opt_total_steam,
        step=cfg.opt_step if step is None else step,
    )


def run_optimize(cfg: RunConfig, store: ArtifactStore, step=None) -> optimizer.OptimizeResult:
    model = load_model(store)
    req = build_optimize_request(cfg, store, step)
    result = optimizer.optimize(model, req)
    store.path("optimize.json").write_text(result.to_json())
    return result


def run_heatmap(cfg: RunConfig, store: ArtifactStore, wells: tuple, step=None) -> optimizer.HeatmapGrid:
    model = load_model(store)
    req = build_optimize_request(cfg, store, step)
    grid = optimizer.heatmap(model, req, wells)
    store.path("heatmap.json").write_text(grid.to_json())
    grid.to_frame().to_csv(store.path("heatmap.csv"), index=False)
    reports.render_heatmap(grid, store.path("heatmap.png"))
    return grid
