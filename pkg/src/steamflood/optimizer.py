"""Brute-force steam-allocation search over the simplex grid.

A candidate plan fixes each infill well's share of a constant total daily
steam volume over a future horizon. Feature rows for every (horizon day,
production well) pair are built with plan-determined steam for days past
the end of observed history and frozen (last-observed) sensor, pump and
status context; the plan maximizing the model's predicted total wins.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from .errors import ContextTooShort, SameWellTwice, StepNotDivisor
from .features import FeatureSpec, derive_gas_day_rate, pivot_infill, split_by_kind
from .gbt import GbtModel, predict as gbt_predict
from .ingest import PadTable

MAX_TOTAL_OIL = "max_total_oil"


@dataclass
class AllocationPlan:
    fractions: dict  # infill well -> fraction in [0, 1]
    total_steam: float

    def __post_init__(self):
        values = np.asarray(list(self.fractions.values()), dtype=float)
        if (values < 0).any():
            raise ValueError("fractions must be >= 0")
        if abs(values.sum() - 1.0) > 1e-9:
            raise ValueError(f"fractions must sum to 1, got {values.sum()}")

    def vector(self, infill_wells) -> np.ndarray:
        return np.array([self.fractions[w] for w in infill_wells], dtype=float)


@dataclass
class OptimizeRequest:
    horizon_dates: pd.DatetimeIndex  # contiguous future days
    context: PadTable  # frozen imputed history through the decision day
    spec: FeatureSpec
    total_steam: float
    step: float = 0.01
    objective: str = MAX_TOTAL_OIL

    def __post_init__(self):
        if self.objective != MAX_TOTAL_OIL:
            raise ValueError(f"unsupported objective {self.objective!r}")
        self.horizon_dates = pd.DatetimeIndex(self.horizon_dates)
        _steps_of(self.step)
        if len(self.horizon_dates) < self.spec.t:
            raise ValueError("horizon must cover at least t days")


@dataclass
class OptimizeResult:
    best: AllocationPlan
    predicted_total: float
    reference_predicted: float
    improvement: float
    reference: AllocationPlan
    n_evaluated: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "best": {"fractions": self.best.fractions, "total_steam": self.best.total_steam},
                "predicted_total": self.predicted_total,
                "reference": {
                    "fractions": self.reference.fractions,
                    "total_steam": self.reference.total_steam,
                },
                "reference_predicted": self.reference_predicted,
                "improvement": self.improvement,
                "n_evaluated": self.n_evaluated,
            },
            indent=2,
        )


@dataclass
class HeatmapGrid:
    well_i: str
    well_j: str
    step: float
    cells: list  # [(fraction_i, fraction_j, predicted_total)]
    current_cell: tuple  # (fraction_i, fraction_j)
    optimal_cell: tuple
    residual_policy: dict  # residual well -> share of the leftover fraction

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.cells, columns=["fraction_i", "fraction_j", "predicted_total"])

    def to_json(self) -> str:
        return json.dumps(
            {
                "well_i": self.well_i,
                "well_j": self.well_j,
                "step": self.step,
                "cells": [list(c) for c in self.cells],
                "current_cell": list(self.current_cell),
                "optimal_cell": list(self.optimal_cell),
                "residual_policy": self.residual_policy,
            },
            indent=2,
        )


def _steps_of(step: float) -> int:
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise StepNotDivisor(f"1/{step} is not an integer")
    return n


def enumerate_allocations(n_wells: int, step: float) -> np.ndarray:
    """All compositions of 1 into n_wells parts on the step grid,
    lexicographically ascending."""
    if n_wells < 1:
        raise ValueError("n_wells must be >= 1")
    n_steps = _steps_of(step)

    def compositions(remaining: int, parts: int):
        if parts == 1:
            yield (remaining,)
            return
        for head in range(remaining + 1):
            for tail in compositions(remaining - head, parts - 1):
                yield (head,) + tail

    grid = np.array(list(compositions(n_steps, n_wells)), dtype=float)
    return grid / n_steps


def _predict_with(model, X: np.ndarray) -> np.ndarray:
    if isinstance(model, GbtModel):
        return gbt_predict(model, X)
    return model.predict(X)


class PlanEvaluator:
    """Precomputes the plan-independent feature blocks for one request, then
    evaluates arbitrary allocation plans cheaply."""

    def __init__(self, model, req: OptimizeRequest):
        spec = req.spec
        self.model = model
        self.req = req
        self.spec = spec
        if list(getattr(model, "feature_names", spec.names)) != spec.names:
            raise ValueError("model feature layout does not match request spec")

        infill, production = split_by_kind(req.context)
        steam = pivot_infill(infill)
        production = derive_gas_day_rate(production)
        if tuple(steam.well_names) != spec.infill_wells:
            raise ValueError("context infill wells do not match spec")

        context_dates = steam.dates
        self.context_end = context_dates[-1]
        horizon = req.horizon_dates
        window = spec.t + spec.k
        if (horizon[0] - pd.Timedelta(days=window)) < context_dates[0]:
            raise ContextTooShort(
                f"context must cover {window} days before the first horizon date"
            )
        if horizon[0] <= self.context_end:
            raise ContextTooShort("horizon must start after the end of context")

        ext = pd.date_range(context_dates[0], horizon[-1], freq="D")
        pos = pd.Series(np.arange(len(ext)), index=ext)
        t, k, J, W = spec.t, spec.k, len(spec.infill_wells), len(spec.wells)
        H = len(horizon)
        n_rows = H * W
        p = len(spec.names)

        # extended steam: observed through context_end, zero past it (the
        # plan part is added per evaluation)
        steam_ext = steam.frame.reindex(ext).to_numpy(dtype=float)
        future = ext > self.context_end
        steam_ext[future] = 0.0

        horizon_pos = pos[horizon].to_numpy()
        lag_pos = horizon_pos[:, None] - np.arange(1, t + 1)[None, :]  # H x t
        lag_is_plan = ext[lag_pos.ravel()].values.reshape(lag_pos.shape) > np.datetime64(self.context_end)

        # H x (t*J) steam blocks, m-major then well order, replicated per production well
        ctx_steam = steam_ext[lag_pos].reshape(H, t * J)
        plan_mask = np.repeat(lag_is_plan, J, axis=1).astype(float)

        self._row_dates = np.repeat(horizon.values, W)
        self._row_wells = np.tile(np.array(spec.wells, dtype=object), H)
        # rows ordered by (date, well): date-major blocks of W wells
        self._ctx_steam = np.repeat(ctx_steam, W, axis=0)
        self._plan_mask = np.repeat(plan_mask, W, axis=0)
        self._well_of_col = np.tile(np.arange(J), t)  # infill index per steam column

        base = np.zeros((n_rows, p))
        steam_cols = t * J
        sensor_pos = horizon_pos[:, None] - np.arange(t + 1, t + k + 1)[None, :]  # H x k
        frozen_pos = pos.iloc[-1]

        col = steam_cols
        per_well = {}
        for w in spec.wells:
            wf = (
                production.frame[production.frame["well_name"] == w]
                .set_index("date")
                .reindex(ext)
            )
            # freeze the last observed context value across the horizon
            sensors = {
                y: wf[f"sensor_{y}"].ffill().to_numpy(dtype=float) for y in spec.sensors
            }
            gas = wf["gas_day_rate"].ffill().to_numpy(dtype=float)
            status = wf["well_status"].ffill()
            oil = wf["oil_volume"].ffill().to_numpy(dtype=float)
            per_well[w] = (sensors, gas, status, oil)

        for h in range(H):
            for wi, w in enumerate(spec.wells):
                row = h * W + wi
                sensors, gas, status, oil = per_well[w]
                col = steam_cols
                for n in range(k):
                    for y in spec.sensors:
                        base[row, col] = sensors[y][sensor_pos[h, n]]
                        col += 1
                if spec.include_oil_lags:
                    for n in range(k):
                        base[row, col] = oil[sensor_pos[h, n]]
                        col += 1
                lag_t1 = horizon_pos[h] - (t + 1)
                base[row, col] = gas[lag_t1]
                col += 1
                base[row, col + wi] = 1.0
                col += W
                s = status.iloc[lag_t1]
                if s in spec.statuses:
                    base[row, col + spec.statuses.index(s)] = 1.0
        self._base = base
        self._steam_cols = steam_cols

    def predict_rows(self, plan: "AllocationPlan"):
        """Per-(horizon day, well) predictions for one plan:
        (dates, well names, predictions)."""
        frac = plan.vector(self.spec.infill_wells)
        X = self._base.copy()
        steam_per_col = frac[self._well_of_col] * plan.total_steam
        X[:, : self._steam_cols] = self._ctx_steam + self._plan_mask * steam_per_col
        return self._row_dates, self._row_wells, _predict_with(self.model, X)

    def evaluate_vector(self, fractions: np.ndarray, total_steam: Optional[float] = None) -> float:
        return float(self.evaluate_many(fractions[None, :], total_steam=total_steam)[0])

    def evaluate_many(
        self, frac_matrix: np.ndarray, batch: int = 64, total_steam: Optional[float] = None
    ) -> np.ndarray:
        """Predicted total production for each allocation row of frac_matrix."""
        frac_matrix = np.atleast_2d(np.asarray(frac_matrix, dtype=float))
        total = self.req.total_steam if total_steam is None else total_steam
        totals = np.empty(len(frac_matrix))
        n_rows = self._base.shape[0]
        for start in range(0, len(frac_matrix), batch):
            chunk = frac_matrix[start : start + batch]
            B = len(chunk)
            X = np.repeat(self._base[None, :, :], B, axis=0)
            steam_per_col = chunk[:, self._well_of_col] * total  # B x (t*J)
            X[:, :, : self._steam_cols] = (
                self._ctx_steam[None, :, :] + self._plan_mask[None, :, :] * steam_per_col[:, None, :]
            )
            preds = _predict_with(self.model, X.reshape(B * n_rows, -1))
            totals[start : start + B] = preds.reshape(B, n_rows).sum(axis=1)
        return totals

    def reference_plan(self) -> AllocationPlan:
        """The context's latest observed allocation at the request's total."""
        infill, _ = split_by_kind(self.req.context)
        steam = pivot_infill(infill)
        last = steam.frame.iloc[-1].to_numpy(dtype=float)
        total = last.sum()
        if total <= 0:
            fractions = np.full(len(last), 1.0 / len(last))
        else:
            fractions = last / total
        return AllocationPlan(
            fractions=dict(zip(steam.well_names, fractions.tolist())),
            total_steam=self.req.total_steam,
        )


def evaluate_plan(model, req: OptimizeRequest, plan: AllocationPlan) -> float:
    """Predicted total production (m³) over the horizon for one plan."""
    evaluator = PlanEvaluator(model, req)
    return evaluator.evaluate_vector(plan.vector(req.spec.infill_wells))


def optimize(model, req: OptimizeRequest, evaluator: Optional[PlanEvaluator] = None) -> OptimizeResult:
    """Exhaustive search over the allocation grid.

    The enumeration is lexicographic and the maximum strict, so equal-value
    ties resolve to the lexicographically smallest fraction vector. The
    reference (current) plan is evaluated with the same routine; if it is
    off-grid and beats every grid point, it is returned as best so that the
    result never recommends a predicted regression.
    """
    if evaluator is None:
        evaluator = PlanEvaluator(model, req)
    grid = enumerate_allocations(len(req.spec.infill_wells), req.step)
    values = evaluator.evaluate_many(grid)
    best_idx = int(np.argmax(values))  # first max = lexicographic tie-break
    best_value = float(values[best_idx])
    best = AllocationPlan(
        fractions=dict(zip(req.spec.infill_wells, grid[best_idx].tolist())),
        total_steam=req.total_steam,
    )

    reference = evaluator.reference_plan()
    reference_value = evaluator.evaluate_vector(reference.vector(req.spec.infill_wells))
    if reference_value > best_value:
        best, best_value = reference, reference_value
    return OptimizeResult(
        best=best,
        predicted_total=best_value,
        reference_predicted=reference_value,
        improvement=best_value / reference_value - 1.0,
        reference=reference,
        n_evaluated=len(grid),
    )


def heatmap(model, req: OptimizeRequest, wells: tuple, evaluator: Optional[PlanEvaluator] = None) -> HeatmapGrid:
    """Predicted production over a 2-D slice of the allocation simplex.

    The leftover fraction 1 - f_i - f_j goes to the residual wells in
    proportion to the current plan's residual allocation (the single
    residual well for a three-well pad).
    """
    well_i, well_j = wells
    if well_i == well_j:
        raise SameWellTwice(f"heatmap axes must differ, got {well_i!r} twice")
    infill = list(req.spec.infill_wells)
    for w in (well_i, well_j):
        if w not in infill:
            raise ValueError(f"unknown infill well {well_j if w == well_j else well_i!r}")
    if evaluator is None:
        evaluator = PlanEvaluator(model, req)

    i_idx, j_idx = infill.index(well_i), infill.index(well_j)
    residual_idx = [ix for ix in range(len(infill)) if ix not in (i_idx, j_idx)]
    reference = evaluator.reference_plan()
    ref_vec = reference.vector(infill)
    if residual_idx:
        residual_ref = ref_vec[residual_idx]
        weights = (
            residual_ref / residual_ref.sum()
            if residual_ref.sum() > 0
            else np.full(len(residual_idx), 1.0 / len(residual_idx))
        )
    else:
        weights = np.array([])

    n_steps = _steps_of(req.step)
    pairs = []
    for a in range(n_steps + 1):
        b_max = n_steps - a if residual_idx else None
        if residual_idx:
            for b in range(n_steps - a + 1):
                pairs.append((a, b))
        else:
            pairs.append((a, n_steps - a))
    frac_matrix = np.zeros((len(pairs), len(infill)))
    for row, (a, b) in enumerate(pairs):
        frac_matrix[row, i_idx] = a / n_steps
        frac_matrix[row, j_idx] = b / n_steps
        leftover = 1.0 - (a + b) / n_steps
        for w_pos, ix in enumerate(residual_idx):
            frac_matrix[row, ix] = leftover * weights[w_pos]

    values = evaluator.evaluate_many(frac_matrix)
    cells = [
        (a / n_steps, b / n_steps, float(v)) for (a, b), v in zip(pairs, values)
    ]
    best = int(np.argmax(values))
    current_cell = (
        round(ref_vec[i_idx] * n_steps) / n_steps,
        round(ref_vec[j_idx] * n_steps) / n_steps,
    )
    return HeatmapGrid(
        well_i=well_i,
        well_j=well_j,
        step=req.step,
        cells=cells,
        current_cell=current_cell,
        optimal_cell=(cells[best][0], cells[best][1]),
        residual_policy={infill[ix]: float(w) for ix, w in zip(residual_idx, weights)},
    )
