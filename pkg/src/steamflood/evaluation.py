"""Temporal holdout, expanding-window cross-validation, grid search and reports."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from .errors import DegenerateVariance, LengthMismatch, TooFewDates
from .features import ForecastConfig, FeatureMatrix, build_matrix, derive_gas_day_rate, one_hot, pivot_infill, split_by_kind
from .gbt import GbtParams, predict, train
from .ingest import PadTable


def rmse(y, yhat) -> float:
    y, yhat = np.asarray(y, dtype=float), np.asarray(yhat, dtype=float)
    if len(y) != len(yhat) or len(y) == 0:
        raise LengthMismatch(f"lengths {len(y)} vs {len(yhat)}")
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def r2(y, yhat) -> float:
    y, yhat = np.asarray(y, dtype=float), np.asarray(yhat, dtype=float)
    if len(y) != len(yhat) or len(y) == 0:
        raise LengthMismatch(f"lengths {len(y)} vs {len(yhat)}")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateVariance("r2 undefined for constant targets")
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


@dataclass(frozen=True)
class Metrics:
    rmse: float
    r2: float


def holdout_split(matrix: FeatureMatrix, train_frac: float = 0.8) -> tuple:
    """Split by target date: the earliest ceil(train_frac * #dates) dates train."""
    if not 0.0 < train_frac < 1.0:
        raise TooFewDates(f"train_frac must be in (0, 1), got {train_frac}")
    dates = np.unique(matrix.dates)
    if len(dates) < 2:
        raise TooFewDates(f"need >= 2 distinct dates, got {len(dates)}")
    n_train = math.ceil(train_frac * len(dates))
    if n_train >= len(dates):
        raise TooFewDates("holdout split leaves an empty test set")
    cut = dates[n_train - 1]
    train_mask = matrix.dates <= cut
    return matrix.subset(train_mask), matrix.subset(~train_mask)


@dataclass(frozen=True)
class CvPlan:
    """Expanding-window fold plan.

    ``cuts`` holds n_folds+1 date cut points: fold i (1-based) trains on
    dates <= cuts[i-1] and validates on cuts[i-1] < date <= cuts[i].
    """

    n_folds: int
    cuts: tuple

    def folds(self, dates: np.ndarray):
        """Yield (train_mask, val_mask) per fold for row-level target dates."""
        for i in range(self.n_folds):
            yield dates <= self.cuts[i], (dates > self.cuts[i]) & (dates <= self.cuts[i + 1])


def time_series_folds(dates, n_folds: int = 5) -> CvPlan:
    """Split distinct dates into n_folds+1 near-equal contiguous blocks."""
    dates = np.unique(np.asarray(dates))
    if len(dates) < n_folds + 1:
        raise TooFewDates(f"{len(dates)} dates cannot form {n_folds} expanding folds")
    blocks = np.array_split(dates, n_folds + 1)
    cuts = tuple(block[-1] for block in blocks)
    return CvPlan(n_folds=n_folds, cuts=cuts)


@dataclass
class GridSearchResult:
    table: pd.DataFrame  # one row per (params, k): fold RMSEs + mean
    best_params: GbtParams
    best_forecast: ForecastConfig


#: default hyperparameter grid; every entry overridable in the run config
DEFAULT_GRID = {
    "max_depth": [3, 5, 7],
    "learning_rate": [0.05, 0.1],
    "n_trees": [100, 300],
    "lambda_": [1.0],
    "subsample": [0.8, 1.0],
}
DEFAULT_K_GRID = [7, 14, 30]

_GRID_KEYS = ("n_trees", "max_depth", "learning_rate", "lambda_", "gamma", "min_child_weight", "subsample", "seed")


def grid_search(
    table: PadTable,
    param_grid: dict,
    k_grid: list,
    t: int,
    plan: CvPlan,
    base_params: Optional[dict] = None,
    n_workers: int = 1,
) -> GridSearchResult:
    """Cross-validate every (hyperparameters, k) combination.

    The feature matrix is rebuilt per k. The winner minimizes mean
    validation RMSE; ties break to smaller n_trees, then smaller
    max_depth, then smaller k.
    """
    if not param_grid or not k_grid:
        raise ValueError("param_grid and k_grid must be non-empty")
    base = dict(base_params or {})
    keys = [k for k in _GRID_KEYS if k in param_grid]
    combos = [dict(zip(keys, values)) for values in itertools.product(*(param_grid[k] for k in keys))]

    infill, production = split_by_kind(table)
    steam = pivot_infill(infill)
    production = one_hot(derive_gas_day_rate(production))

    matrices = {k: build_matrix(steam, production, ForecastConfig(t=t, k=k)) for k in k_grid}

    rows = []
    best = None
    for combo in combos:
        params = GbtParams(**{**base, **combo})
        for k in k_grid:
            matrix = matrices[k]
            fold_rmses = []
            for fold_no, (tr_mask, va_mask) in enumerate(plan.folds(matrix.dates), start=1):
                if not tr_mask.any() or not va_mask.any():
                    continue
                model = train(matrix.subset(tr_mask), params, n_workers=n_workers)
                val = matrix.subset(va_mask)
                fold_rmses.append(rmse(val.y, predict(model, val.X)))
            mean_rmse = float(np.mean(fold_rmses))
            row = {**params.to_dict(), "k": k, "mean_rmse": mean_rmse}
            for i, v in enumerate(fold_rmses, start=1):
                row[f"fold_{i}_rmse"] = v
            rows.append(row)
            key = (mean_rmse, params.n_trees, params.max_depth, k)
            if best is None or key < best[0]:
                best = (key, params, ForecastConfig(t=t, k=k))

    return GridSearchResult(
        table=pd.DataFrame(rows), best_params=best[1], best_forecast=best[2]
    )


@dataclass
class MonthlyRow:
    month: str  # YYYY-MM
    actual: float
    predicted: float
    rel_error: Optional[float]
    within_band: bool
    zero_actual: bool = False


def monthly_report(
    predictions, actuals, dates, band: float = 0.10
) -> list:
    """Pad-level monthly sums over all wells with a relative-error band flag.

    A month with zero actual production has no defined relative error; it
    is flagged (zero_actual) rather than dropped.
    """
    frame = pd.DataFrame(
        {
            "month": pd.DatetimeIndex(dates).to_period("M"),
            "actual": np.asarray(actuals, dtype=float),
            "predicted": np.asarray(predictions, dtype=float),
        }
    )
    grouped = frame.groupby("month", sort=True)[["actual", "predicted"]].sum()
    rows = []
    for month, rec in grouped.iterrows():
        actual, predicted = float(rec["actual"]), float(rec["predicted"])
        if actual == 0.0:
            rows.append(
                MonthlyRow(str(month), actual, predicted, None, False, zero_actual=True)
            )
        else:
            rel = predicted / actual - 1.0
            rows.append(MonthlyRow(str(month), actual, predicted, rel, abs(rel) <= band))
    return rows


def monthly_frame(rows: list) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "month": r.month,
                "actual": r.actual,
                "predicted": r.predicted,
                "rel_error": r.rel_error,
                "within_band": r.within_band,
                "zero_actual": r.zero_actual,
            }
            for r in rows
        ]
    )
