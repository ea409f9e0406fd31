"""Deterministic synthetic pad generator with a closed-form production oracle.

Real field data is proprietary, so tests and demos run on a generated pad
whose true production response is known analytically: a saturating,
concave function of each infill well's trailing-mean steam, scaled by pump
effectiveness, plus a lagged sensor term. The concavity places the optimal
steam allocation in the interior of the simplex.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .features import FeatureSpec
from .ingest import SourceDescriptor


@dataclass
class FieldConfig:
    n_production: int = 8
    n_infill: int = 3
    date_start: dt.date = dt.date(2016, 1, 1)
    date_end: dt.date = dt.date(2018, 12, 31)
    steam_memory: int = 14
    response_coeffs: Optional[np.ndarray] = None  # W x J; derived from seed when None
    saturation_scale: float = 500.0
    noise_sigma: float = 0.0
    missing_rate: float = 0.0
    seed: int = 0
    total_steam: float = 1000.0
    optimum_fractions: tuple = (0.27, 0.04, 0.69)
    shut_in_prob: float = 0.01
    allocation_block_days: int = 30

    def __post_init__(self):
        if self.n_production < 1 or self.n_infill < 1:
            raise ValueError("well counts must be >= 1")
        if not 0.0 <= self.missing_rate <= 0.5:
            raise ValueError("missing_rate must be in [0, 0.5]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.date_end < self.date_start:
            raise ValueError("date_end before date_start")


@dataclass
class GroundTruth:
    """Analytic daily response: oil(D, w) =
    base_w + sum_j a[w, j] * r(sbar_j(D)) * gas(D, w) + beta_w * sensor(D - memory - 1, w),
    with r(s) = s / (s + c) and sbar_j the mean steam over the memory days
    strictly before D.
    """

    production_wells: list
    infill_wells: list
    base: np.ndarray  # (W,)
    coeffs: np.ndarray  # (W, J)
    beta: np.ndarray  # (W,)
    saturation_scale: float
    steam_memory: int
    total_steam: float
    sensor_name: str = "temperature"
    sensor_steady: Optional[np.ndarray] = None  # (W,) long-run sensor level

    def response(self, steam: np.ndarray) -> np.ndarray:
        """Saturating per-well-j response r(s) = s / (s + c)."""
        steam = np.asarray(steam, dtype=float)
        return steam / (steam + self.saturation_scale)

    def oil_rates(self, sbar: np.ndarray, gas: np.ndarray, sensor_vals: np.ndarray) -> np.ndarray:
        """Per-production-well daily oil, clamped at zero."""
        rates = self.base + (self.coeffs @ self.response(sbar)) * gas + self.beta * sensor_vals
        return np.maximum(rates, 0.0)

    def steady_state_total(self, fractions, total_steam: Optional[float] = None) -> float:
        """Pad-total daily oil under a constant allocation at steady state
        (full-day pumping, sensors at their long-run levels)."""
        total = self.total_steam if total_steam is None else total_steam
        sbar = np.asarray(fractions, dtype=float) * total
        gas = np.ones(len(self.production_wells))
        return float(self.oil_rates(sbar, gas, self.sensor_steady).sum())

    def to_json(self) -> str:
        return json.dumps(
            {
                "production_wells": self.production_wells,
                "infill_wells": self.infill_wells,
                "base": self.base.tolist(),
                "coeffs": self.coeffs.tolist(),
                "beta": self.beta.tolist(),
                "saturation_scale": self.saturation_scale,
                "steam_memory": self.steam_memory,
                "total_steam": self.total_steam,
                "sensor_name": self.sensor_name,
                "sensor_steady": self.sensor_steady.tolist(),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        d = json.loads(text)
        return cls(
            production_wells=d["production_wells"],
            infill_wells=d["infill_wells"],
            base=np.asarray(d["base"], dtype=float),
            coeffs=np.asarray(d["coeffs"], dtype=float),
            beta=np.asarray(d["beta"], dtype=float),
            saturation_scale=d["saturation_scale"],
            steam_memory=d["steam_memory"],
            total_steam=d["total_steam"],
            sensor_name=d["sensor_name"],
            sensor_steady=np.asarray(d["sensor_steady"], dtype=float),
        )


def interior_optimum_coeffs(
    n_production: int,
    target_fractions,
    total_steam: float,
    saturation_scale: float,
    rng: np.random.Generator,
    scale: float = 1e-4,
) -> np.ndarray:
    """Response coefficients whose steady-state allocation optimum is exactly
    ``target_fractions``.

    With r(s) = s/(s+c), the KKT condition A_j * r'(f_j * T) = const holds
    when the per-well-j column sums satisfy A_j proportional to
    (f_j * T + c)^2, so the interior optimum lands on the chosen point.
    """
    f = np.asarray(target_fractions, dtype=float)
    column_totals = scale * (f * total_steam + saturation_scale) ** 2
    weights = rng.uniform(0.5, 1.5, size=(n_production, len(f)))
    weights /= weights.sum(axis=0, keepdims=True)
    return weights * column_totals


def source_descriptors() -> list:
    """Column maps for the five emitted sources, for the run config."""
    return [
        SourceDescriptor(1, {"Date": "date", "Well Name": "well_name", "Well Status": "well_status", "Oil Volume": "oil_volume"}, "%m/%d/%Y"),
        SourceDescriptor(2, {"Date": "date", "Well Name": "well_name", "Well Status": "well_status"}, "%Y-%m-%d"),
        SourceDescriptor(3, {"Date": "date", "Well Name": "well_name", "Temperature": "sensor_temperature"}, "%Y-%m-%d"),
        SourceDescriptor(4, {"Date": "date", "Well Name": "well_name", "Pressure": "sensor_pressure"}, "%Y-%m-%d"),
        SourceDescriptor(5, {"Date": "date", "Well Name": "well_name", "Steam Volume": "steam_volume"}, "%m/%d/%Y"),
    ]


def generate(cfg: FieldConfig) -> tuple:
    """Generate the five overlapping daily sources and the ground truth.

    Returns (sources, truth) where sources is a list of five DataFrames in
    the column layout of :func:`source_descriptors`.
    """
    rng = np.random.default_rng(cfg.seed)
    W, J = cfg.n_production, cfg.n_infill
    prod_names = [f"Prod Well {i + 1}" for i in range(W)]
    infill_names = [f"Infill Well {j + 1}" for j in range(J)]
    dates = pd.date_range(cfg.date_start, cfg.date_end, freq="D")
    n = len(dates)

    base = rng.uniform(8.0, 12.0, size=W)
    beta = rng.uniform(0.01, 0.03, size=W)
    if cfg.response_coeffs is not None:
        coeffs = np.asarray(cfg.response_coeffs, dtype=float)
        if coeffs.shape != (W, J):
            raise ValueError(f"response_coeffs must be {W}x{J}, got {coeffs.shape}")
    else:
        target = cfg.optimum_fractions
        if len(target) != J:
            target = rng.dirichlet(np.ones(J))
        coeffs = interior_optimum_coeffs(
            W, target, cfg.total_steam, cfg.saturation_scale, rng
        )

    # piecewise-constant steam allocation, re-drawn every allocation block
    steam = np.empty((n, J))
    for start in range(0, n, cfg.allocation_block_days):
        frac = rng.dirichlet(np.ones(J))
        steam[start : start + cfg.allocation_block_days] = frac * cfg.total_steam

    # slow seasonal sensors with AR(1) wander
    day_idx = np.arange(n)
    temp = np.empty((n, W))
    pressure = np.empty((n, W))
    for w in range(W):
        phase = rng.uniform(0, 2 * np.pi)
        ar = np.empty(n)
        ar[0] = rng.normal(0, 1)
        eps = rng.normal(0, 0.3, size=n)
        for d in range(1, n):
            ar[d] = 0.95 * ar[d - 1] + eps[d]
        temp[:, w] = 100.0 + 10.0 * np.sin(2 * np.pi * (day_idx / 365.0) + phase) + ar
        pressure[:, w] = 2000.0 + 100.0 * np.sin(2 * np.pi * (day_idx / 365.0) + phase / 2) + 10 * ar

    # statuses: mostly pumping, rare multi-day shut-ins
    status = np.full((n, W), "Pump", dtype=object)
    for w in range(W):
        d = 0
        while d < n:
            if rng.random() < cfg.shut_in_prob:
                run = int(rng.integers(3, 15))
                status[d : d + run, w] = "Shut-In"
                d += run
            else:
                d += 1
    gas = (status == "Pump").astype(float)

    # trailing steam mean over the memory days strictly before each day
    # (same-day injection cannot influence same-day production), with zero
    # history before the first day
    padded = np.vstack([np.zeros((cfg.steam_memory, J)), steam])
    csum = np.cumsum(padded, axis=0)
    sbar = (csum[cfg.steam_memory :] - csum[: -cfg.steam_memory]) / cfg.steam_memory
    sbar = np.vstack([np.zeros((1, J)), sbar[:-1]])

    truth = GroundTruth(
        production_wells=prod_names,
        infill_wells=infill_names,
        base=base,
        coeffs=coeffs,
        beta=beta,
        saturation_scale=cfg.saturation_scale,
        steam_memory=cfg.steam_memory,
        total_steam=cfg.total_steam,
        sensor_steady=temp.mean(axis=0),
    )

    lag_idx = np.maximum(day_idx - cfg.steam_memory - 1, 0)
    oil = np.empty((n, W))
    for d in range(n):
        oil[d] = truth.oil_rates(sbar[d], gas[d], temp[lag_idx[d]])
    if cfg.noise_sigma > 0:
        oil = np.maximum(oil + rng.normal(0, cfg.noise_sigma, size=oil.shape), 0.0)

    def drop(values: np.ndarray) -> np.ndarray:
        """Blank cells at missing_rate, keeping at least one value per well."""
        out = values.astype(object)
        if cfg.missing_rate > 0:
            mask = rng.random(values.shape) < cfg.missing_rate
            for col in range(values.shape[1]):
                if mask[:, col].all():
                    mask[0, col] = False
            out[mask] = ""
        return out

    us_dates = dates.strftime("%m/%d/%Y")
    iso_dates = dates.strftime("%Y-%m-%d")

    def long_form(date_strs, names, values) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "Date": np.repeat(date_strs, len(names)),
                "Well Name": np.tile(names, len(date_strs)),
                "value": values.ravel(),
            }
        )

    oil_cells, status_cells = drop(oil), drop(status)
    temp_cells, pressure_cells, steam_cells = drop(temp), drop(pressure), drop(steam)

    src1 = long_form(us_dates, prod_names, oil_cells).rename(columns={"value": "Oil Volume"})
    src1.insert(2, "Well Status", status_cells.ravel())
    src2 = long_form(iso_dates, prod_names, status_cells).rename(columns={"value": "Well Status"})
    src3 = long_form(iso_dates, prod_names, temp_cells).rename(columns={"value": "Temperature"})
    src4 = long_form(iso_dates, prod_names, pressure_cells).rename(columns={"value": "Pressure"})
    src5 = long_form(us_dates, infill_names, steam_cells).rename(columns={"value": "Steam Volume"})

    return [src1, src2, src3, src4, src5], truth


def write_sources(cfg: FieldConfig, outdir) -> tuple:
    """Emit source1.csv..source5.csv and truth.json; returns (paths, truth)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    sources, truth = generate(cfg)
    paths = []
    for i, frame in enumerate(sources, start=1):
        path = outdir / f"source{i}.csv"
        frame.to_csv(path, index=False)
        paths.append(path)
    (outdir / "truth.json").write_text(truth.to_json())
    return paths, truth


def true_optimum(truth: GroundTruth, total_steam: float, step: float) -> tuple:
    """Exhaustive steady-state argmax over the step-grid allocation simplex."""
    from .optimizer import enumerate_allocations

    best_value, best_plan = -np.inf, None
    for fractions in enumerate_allocations(len(truth.infill_wells), step):
        value = truth.steady_state_total(fractions, total_steam)
        if value > best_value:
            best_value, best_plan = value, fractions
    return best_plan


class GroundTruthPredictor:
    """Drop-in model that evaluates the analytic oracle on feature rows.

    Reads each row's steam lags 1..memory (requires t >= memory), the
    frozen gas_day_rate and lagged temperature, and the well one-hot.
    Usable anywhere a trained model is, for oracle-recovery tests.
    """

    def __init__(self, truth: GroundTruth, spec: FeatureSpec):
        if spec.t < truth.steam_memory:
            raise ValueError("feature horizon t shorter than the oracle's steam memory")
        self.truth = truth
        self.spec = spec
        self.feature_names = spec.names
        names = self.feature_names
        self._steam_cols = np.array(
            [
                [names.index(f"prior_{m}-day_infill_well_{x}-steam") for x in truth.infill_wells]
                for m in range(1, truth.steam_memory + 1)
            ]
        )  # memory x J
        self._gas_col = names.index("gas_day_rate")
        self._sensor_col = names.index(
            f"prior_{spec.t + 1}-day_sensor_{truth.sensor_name}-value"
        )
        self._well_cols = np.array([names.index(f"well_{w}") for w in truth.production_wells])

    def predict(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        sbar = rows[:, self._steam_cols].mean(axis=1)  # n x J
        gas = rows[:, self._gas_col]
        sensor = rows[:, self._sensor_col]
        well = rows[:, self._well_cols].argmax(axis=1)
        t = self.truth
        rates = (
            t.base[well]
            + (t.response(sbar) @ t.coeffs.T)[np.arange(len(rows)), well] * gas
            + t.beta[well] * sensor
        )
        return np.maximum(rates, 0.0)
