"""Leakage-safe lagged design matrix construction.

A forecast for production day D is made t days earlier. Steam features
cover the planned injections between the decision day and D (lags 1..t per
infill well); well history enters strictly before the decision day (lags
t+1..t+k per sensor, plus pump effectiveness, well identity and status at
lag t+1).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from .errors import HistoryTooShort, NoInfillWells, NoProductionWells
from .ingest import INFILL, PRODUCTION, PadTable


@dataclass(frozen=True)
class ForecastConfig:
    t: int = 30  # horizon: prediction made t days before the production day
    k: int = 14  # history window
    include_oil_lags: bool = False

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass
class SteamWide:
    """Daily steam volumes, one column per infill well (lexicographic order)."""

    dates: pd.DatetimeIndex
    frame: pd.DataFrame  # index = dates, columns = infill well names

    @property
    def well_names(self) -> list:
        return list(self.frame.columns)


@dataclass(frozen=True)
class FeatureSpec:
    """Deterministic column layout of the design matrix."""

    t: int
    k: int
    include_oil_lags: bool
    infill_wells: tuple
    sensors: tuple
    wells: tuple
    statuses: tuple

    @property
    def names(self) -> list:
        cols = [
            f"prior_{m}-day_infill_well_{x}-steam"
            for m in range(1, self.t + 1)
            for x in self.infill_wells
        ]
        cols += [
            f"prior_{n}-day_sensor_{y}-value"
            for n in range(self.t + 1, self.t + self.k + 1)
            for y in self.sensors
        ]
        if self.include_oil_lags:
            cols += [
                f"prior_{n}-day_oil-value"
                for n in range(self.t + 1, self.t + self.k + 1)
            ]
        cols.append("gas_day_rate")
        cols += [f"well_{w}" for w in self.wells]
        cols += [f"status_{s}" for s in self.statuses]
        return cols

    def steam_column_index(self) -> list:
        """(column position, lag m, infill well) for every steam feature."""
        out = []
        pos = 0
        for m in range(1, self.t + 1):
            for x in self.infill_wells:
                out.append((pos, m, x))
                pos += 1
        return out

    def to_json(self) -> str:
        payload = {
            "t": self.t,
            "k": self.k,
            "include_oil_lags": self.include_oil_lags,
            "infill_wells": list(self.infill_wells),
            "sensors": list(self.sensors),
            "wells": list(self.wells),
            "statuses": list(self.statuses),
            "names": self.names,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FeatureSpec":
        d = json.loads(text)
        return cls(
            t=d["t"],
            k=d["k"],
            include_oil_lags=d["include_oil_lags"],
            infill_wells=tuple(d["infill_wells"]),
            sensors=tuple(d["sensors"]),
            wells=tuple(d["wells"]),
            statuses=tuple(d["statuses"]),
        )


@dataclass
class FeatureMatrix:
    dates: np.ndarray  # target date per row (datetime64[ns])
    well_names: np.ndarray  # production well per row
    X: np.ndarray  # float64, columns per spec.names
    y: np.ndarray
    spec: FeatureSpec

    def __len__(self) -> int:
        return len(self.y)

    def subset(self, mask: np.ndarray) -> "FeatureMatrix":
        return FeatureMatrix(
            dates=self.dates[mask],
            well_names=self.well_names[mask],
            X=self.X[mask],
            y=self.y[mask],
            spec=self.spec,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.X, columns=self.spec.names)
        frame.insert(0, "well_name", self.well_names)
        frame.insert(0, "date", self.dates)
        frame["oil_volume"] = self.y
        return frame


def split_by_kind(table: PadTable) -> tuple:
    """Partition the pad table into (infill, production) subsets."""
    infill_wells = [(w, k) for w, k in table.wells if k == INFILL]
    production_wells = [(w, k) for w, k in table.wells if k == PRODUCTION]
    if not infill_wells:
        raise NoInfillWells(f"pad {table.pad_id!r} has no infill wells")
    if not production_wells:
        raise NoProductionWells(f"pad {table.pad_id!r} has no production wells")

    def subset(wells):
        names = {w for w, _ in wells}
        sub = table.copy()
        sub.frame = table.frame[table.frame["well_name"].isin(names)].reset_index(drop=True)
        sub.wells = wells
        return sub

    return subset(infill_wells), subset(production_wells)


def pivot_infill(infill: PadTable) -> SteamWide:
    """Long-form infill rows -> wide date x well steam table."""
    wide = infill.frame.pivot(index="date", columns="well_name", values="steam_volume")
    wide = wide.sort_index()[sorted(wide.columns)]
    return SteamWide(dates=pd.DatetimeIndex(wide.index), frame=wide)


def derive_gas_day_rate(production: PadTable) -> PadTable:
    """Effective pump working time per day, scaled to [0, 1].

    pump_hours/24 when a pump-hours column exists; otherwise derived from
    status: Pump -> 1.0, Shut-In -> 0.0, anything else -> 0.5.
    """
    out = production.copy()
    frame = out.frame
    if "pump_hours" in frame.columns and frame["pump_hours"].notna().any():
        rate = (frame["pump_hours"] / 24.0).clip(0.0, 1.0)
        rate = rate.where(frame["pump_hours"].notna(), _status_rate(frame["well_status"]))
    else:
        rate = _status_rate(frame["well_status"])
    frame["gas_day_rate"] = rate
    return out


def _status_rate(status: pd.Series) -> pd.Series:
    rate = pd.Series(0.5, index=status.index)
    rate[status == "Pump"] = 1.0
    rate[status == "Shut-In"] = 0.0
    return rate


def one_hot(production: PadTable) -> PadTable:
    """Indicator columns for well name and status; one 1 per group per row."""
    out = production.copy()
    frame = out.frame
    for w in sorted(w for w, _ in out.wells):
        frame[f"well_{w}"] = (frame["well_name"] == w).astype(float)
    for s in observed_statuses(production):
        frame[f"status_{s}"] = (frame["well_status"] == s).astype(float)
    return out


def observed_statuses(production: PadTable) -> list:
    return sorted(s for s in production.frame["well_status"].dropna().unique())


def build_matrix(steam: SteamWide, production: PadTable, cfg: ForecastConfig) -> FeatureMatrix:
    """Assemble the lagged design matrix.

    Row (D, w): steam of every infill well at lags 1..t, sensors of well w
    at lags t+1..t+k, gas_day_rate / status one-hot of w at lag t+1, and
    the identity one-hot of w. Rows lacking t+k days of history or an
    observed target are dropped.
    """
    grid = steam.dates
    window = cfg.t + cfg.k
    if len(grid) < window + 1:
        raise HistoryTooShort(
            f"date range of {len(grid)} days cannot support t+k={window} lags"
        )

    spec = FeatureSpec(
        t=cfg.t,
        k=cfg.k,
        include_oil_lags=cfg.include_oil_lags,
        infill_wells=tuple(steam.well_names),
        sensors=tuple(production.sensor_names),
        wells=tuple(sorted(w for w, _ in production.wells)),
        statuses=tuple(observed_statuses(production)),
    )

    # steam lag block, shared by every production well
    steam_lag_cols = []
    for m in range(1, cfg.t + 1):
        steam_lag_cols.append(steam.frame.shift(m).to_numpy(dtype=float))
    steam_block = np.concatenate(steam_lag_cols, axis=1)  # len(grid) x (t*|infill|)

    prod = derive_gas_day_rate(production)
    usable = grid[window:]  # D - (t+k) >= date_min
    usable_pos = np.arange(window, len(grid))

    blocks = []
    for w in spec.wells:
        wf = (
            prod.frame[prod.frame["well_name"] == w]
            .set_index("date")
            .reindex(grid)
            .sort_index()
        )
        sensor_cols = [
            wf[f"sensor_{y}"].shift(n).to_numpy(dtype=float)
            for n in range(cfg.t + 1, cfg.t + cfg.k + 1)
            for y in spec.sensors
        ]
        oil_series = wf["oil_volume"]
        oil_cols = (
            [
                oil_series.shift(n).to_numpy(dtype=float)
                for n in range(cfg.t + 1, cfg.t + cfg.k + 1)
            ]
            if cfg.include_oil_lags
            else []
        )
        gas = wf["gas_day_rate"].shift(cfg.t + 1).to_numpy(dtype=float)
        status_lagged = wf["well_status"].shift(cfg.t + 1)
        well_onehot = np.zeros((len(grid), len(spec.wells)))
        well_onehot[:, spec.wells.index(w)] = 1.0
        status_onehot = np.column_stack(
            [(status_lagged == s).to_numpy(dtype=float) for s in spec.statuses]
        ) if spec.statuses else np.zeros((len(grid), 0))

        X_w = np.column_stack(
            [steam_block]
            + sensor_cols
            + oil_cols
            + [gas]
            + [well_onehot, status_onehot]
        )[usable_pos]
        y_w = oil_series.to_numpy(dtype=float)[usable_pos]
        keep = ~np.isnan(y_w)
        blocks.append(
            (
                np.asarray(usable[keep]),
                np.full(int(keep.sum()), w, dtype=object),
                X_w[keep],
                y_w[keep],
            )
        )

    dates = np.concatenate([b[0] for b in blocks])
    wells = np.concatenate([b[1] for b in blocks])
    X = np.concatenate([b[2] for b in blocks], axis=0)
    y = np.concatenate([b[3] for b in blocks])

    # sort rows by (date, well) for a deterministic layout
    order = np.lexsort((wells, dates))
    return FeatureMatrix(
        dates=dates[order], well_names=wells[order], X=X[order], y=y[order], spec=spec
    )
