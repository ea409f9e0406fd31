"""Run configuration: one JSON file drives the whole pipeline."""
from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .evaluation import DEFAULT_GRID, DEFAULT_K_GRID
from .features import ForecastConfig
from .ingest import SourceDescriptor
from .synthfield import FieldConfig

_TOP_KEYS = {
    "pad_id", "workdir", "sources", "forecast", "imputation", "grid", "k_grid",
    "gbt", "cv", "holdout", "optimizer", "server", "synthfield",
}
_SOURCE_KEYS = {"source_id", "file", "column_map", "date_format"}
_FORECAST_KEYS = {"t", "k", "include_oil_lags"}
_GBT_KEYS = {"gamma", "min_child_weight", "seed", "n_trees", "max_depth", "learning_rate", "lambda_", "subsample"}
_GRID_KEYS = {"n_trees", "max_depth", "learning_rate", "lambda_", "gamma", "min_child_weight", "subsample", "seed"}
_CV_KEYS = {"n_folds"}
_HOLDOUT_KEYS = {"train_frac"}
_OPTIMIZER_KEYS = {"step", "total_steam", "horizon_days"}
_SERVER_KEYS = {"port", "host"}
_SYNTH_KEYS = {
    "n_production", "n_infill", "date_start", "date_end", "steam_memory",
    "saturation_scale", "noise_sigma", "missing_rate", "seed", "total_steam",
    "optimum_fractions", "shut_in_prob", "allocation_block_days",
}


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


@dataclass
class RunConfig:
    pad_id: str
    workdir: Path
    sources: list  # [(SourceDescriptor, file path)]
    forecast: ForecastConfig
    imputation: Optional[dict]
    grid: dict
    k_grid: list
    gbt_base: dict
    n_folds: int
    train_frac: float
    opt_step: float
    opt_total_steam: float
    opt_horizon_days: int
    server_port: int
    server_host: str
    synthfield: Optional[FieldConfig]
    raw: dict = field(repr=False, default_factory=dict)

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    _check_keys(raw, _TOP_KEYS, "config")
    root = path.parent

    workdir = root / raw.get("workdir", "run")

    sources = []
    for i, src in enumerate(raw.get("sources", [])):
        _check_keys(src, _SOURCE_KEYS, f"sources[{i}]")
        desc = SourceDescriptor(
            source_id=src["source_id"],
            column_map=src["column_map"],
            date_format=src.get("date_format", "%Y-%m-%d"),
        )
        sources.append((desc, root / src["file"]))

    fc_raw = raw.get("forecast", {})
    _check_keys(fc_raw, _FORECAST_KEYS, "forecast")
    forecast = ForecastConfig(
        t=fc_raw.get("t", 30),
        k=fc_raw.get("k", 14),
        include_oil_lags=fc_raw.get("include_oil_lags", False),
    )

    grid = dict(raw.get("grid", DEFAULT_GRID))
    _check_keys(grid, _GRID_KEYS, "grid")
    k_grid = list(raw.get("k_grid", DEFAULT_K_GRID))

    gbt_base = dict(raw.get("gbt", {}))
    _check_keys(gbt_base, _GBT_KEYS, "gbt")

    cv = raw.get("cv", {})
    _check_keys(cv, _CV_KEYS, "cv")
    holdout = raw.get("holdout", {})
    _check_keys(holdout, _HOLDOUT_KEYS, "holdout")
    opt = raw.get("optimizer", {})
    _check_keys(opt, _OPTIMIZER_KEYS, "optimizer")
    server = raw.get("server", {})
    _check_keys(server, _SERVER_KEYS, "server")

    synth_raw = raw.get("synthfield")
    synth = None
    if synth_raw is not None:
        _check_keys(synth_raw, _SYNTH_KEYS, "synthfield")
        kwargs = dict(synth_raw)
        for key in ("date_start", "date_end"):
            if key in kwargs:
                kwargs[key] = dt.date.fromisoformat(kwargs[key])
        if "optimum_fractions" in kwargs:
            kwargs["optimum_fractions"] = tuple(kwargs["optimum_fractions"])
        synth = FieldConfig(**kwargs)

    return RunConfig(
        pad_id=raw.get("pad_id", "pad"),
        workdir=workdir,
        sources=sources,
        forecast=forecast,
        imputation=raw.get("imputation"),
        grid=grid,
        k_grid=k_grid,
        gbt_base=gbt_base,
        n_folds=cv.get("n_folds", 5),
        train_frac=holdout.get("train_frac", 0.8),
        opt_step=opt.get("step", 0.01),
        opt_total_steam=opt.get("total_steam", 1000.0),
        opt_horizon_days=opt.get("horizon_days", 60),
        server_port=server.get("port", 8000),
        server_host=server.get("host", "127.0.0.1"),
        synthfield=synth,
        raw=raw,
    )


def default_config(
    workdir: str = "run",
    t: int = 30,
    k_grid: Optional[list] = None,
    grid: Optional[dict] = None,
    synthfield: Optional[dict] = None,
    optimizer: Optional[dict] = None,
) -> dict:
    """A complete config dict for a synthetic-field run, ready to serialize."""
    from .synthfield import source_descriptors

    return {
        "pad_id": "synth-pad",
        "workdir": workdir,
        "sources": [
            {
                "source_id": d.source_id,
                "file": f"{workdir}/data/source{d.source_id}.csv",
                "column_map": d.column_map,
                "date_format": d.date_format,
            }
            for d in source_descriptors()
        ],
        "forecast": {"t": t, "k": 14},
        "grid": grid or {"max_depth": [3, 5], "learning_rate": [0.1], "n_trees": [100], "lambda_": [1.0], "subsample": [1.0]},
        "k_grid": k_grid or [14],
        "gbt": {"seed": 0},
        "cv": {"n_folds": 5},
        "holdout": {"train_frac": 0.8},
        "optimizer": optimizer or {"step": 0.01, "total_steam": 1000.0, "horizon_days": 60},
        "server": {"port": 8000},
        "synthfield": synthfield
        or {
            "n_production": 8,
            "n_infill": 3,
            "date_start": "2016-01-01",
            "date_end": "2018-12-31",
            "noise_sigma": 0.5,
            "missing_rate": 0.01,
            "seed": 0,
        },
    }
