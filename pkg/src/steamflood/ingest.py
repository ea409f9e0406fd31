"""Raw source parsing, pad-level consolidation, error correction and imputation.

Five daily CSV sources with heterogeneous schemas are mapped onto one
canonical per-(date, well) table. Wells are classified as steam-injection
(infill) or producing wells from the fields they carry; the table is
densified to a contiguous daily grid and missing cells are filled by a
per-field policy. The production target (oil_volume) is never imputed.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np
import pandas as pd

from .errors import (
    AllMissingSeries,
    BadDate,
    EmptyInput,
    KindConflict,
    MissingColumn,
)

INFILL = "Infill"
PRODUCTION = "Production"

FORWARD_BACKWARD = "ForwardThenBackwardCopy"
ZERO_FILL = "ZeroFill"

#: canonical scalar fields; sensor fields are "sensor_<name>"
SCALAR_FIELDS = ("date", "well_name", "well_status", "pump_hours", "steam_volume", "oil_volume")

DEFAULT_POLICY = {
    "well_status": FORWARD_BACKWARD,
    "pump_hours": FORWARD_BACKWARD,
    "sensor_*": FORWARD_BACKWARD,
    "steam_volume": ZERO_FILL,
}


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: int
    column_map: dict  # source column name -> canonical field
    date_format: str = "%Y-%m-%d"

    def __post_init__(self):
        targets = set(self.column_map.values())
        if "date" not in targets or "well_name" not in targets:
            raise MissingColumn(
                f"source {self.source_id}: column_map must cover date and well_name"
            )


@dataclass
class RawRecord:
    date: dt.date
    well_name: str
    well_status: Optional[str] = None
    sensor: dict = field(default_factory=dict)  # sensor name -> value or None
    steam_volume: Optional[float] = None
    oil_volume: Optional[float] = None
    pump_hours: Optional[float] = None
    source_id: Optional[int] = None


@dataclass
class PadTable:
    """Dense daily grid of well records for one pad.

    ``frame`` has one row per (date, well_name), sorted by (date, well_name),
    with columns: date, well_name, kind, well_status, [pump_hours],
    sensor_<name>..., steam_volume, oil_volume.
    """

    pad_id: str
    frame: pd.DataFrame
    wells: list  # [(well_name, kind)]
    sensor_names: list
    imputation_log: list = field(default_factory=list)  # (date, well, field, method)
    error_log: list = field(default_factory=list)

    @property
    def dates(self) -> pd.DatetimeIndex:
        return pd.DatetimeIndex(sorted(self.frame["date"].unique()))

    def copy(self) -> "PadTable":
        return PadTable(
            pad_id=self.pad_id,
            frame=self.frame.copy(),
            wells=list(self.wells),
            sensor_names=list(self.sensor_names),
            imputation_log=list(self.imputation_log),
            error_log=list(self.error_log),
        )

    def to_csv(self, path) -> None:
        self.frame.to_csv(path, index=False)

    def imputation_log_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.imputation_log, columns=["date", "well_name", "field", "method"])

    @classmethod
    def from_csv(cls, path, pad_id: str = "pad") -> "PadTable":
        frame = pd.read_csv(path, parse_dates=["date"])
        if "well_status" in frame.columns:
            frame["well_status"] = frame["well_status"].astype(object)
            frame.loc[frame["well_status"].isna(), "well_status"] = None
        wells = (
            frame[["well_name", "kind"]]
            .drop_duplicates()
            .sort_values("well_name")
            .itertuples(index=False)
        )
        sensors = sorted(c[len("sensor_"):] for c in frame.columns if c.startswith("sensor_"))
        return cls(
            pad_id=pad_id,
            frame=frame.sort_values(["date", "well_name"]).reset_index(drop=True),
            wells=[(w, k) for w, k in wells],
            sensor_names=sensors,
        )


def _parse_number(cell: str):
    cell = cell.strip()
    if cell in ("", "NA", "N/A", "NaN", "nan", "null", "None"):
        return None
    try:
        return float(cell)
    except ValueError:
        return None


def parse_source(stream: IO, desc: SourceDescriptor, corrections: Optional[list] = None) -> list:
    """Parse one CSV source into RawRecords per ``desc.column_map``.

    Unparseable numeric cells become missing. Negative volumes are
    physically impossible and are forced to missing with a correction-log
    entry. Rows with unparseable dates are rejected and logged with their
    line number. ``corrections`` (optional list) collects
    (line_no, well_name, field, reason) tuples.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    if isinstance(stream, io.RawIOBase) or isinstance(stream, io.BufferedIOBase) or (
        hasattr(stream, "read") and isinstance(stream.read(0), bytes)
    ):
        stream = io.TextIOWrapper(stream, encoding="utf-8")
    if corrections is None:
        corrections = []

    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn(f"source {desc.source_id}: empty stream, no header")
    header = [h.strip() for h in header]
    col_idx = {}
    for src_col, canon in desc.column_map.items():
        if src_col not in header:
            raise MissingColumn(f"source {desc.source_id}: column {src_col!r} not in header")
        col_idx[canon] = header.index(src_col)

    records = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        raw_date = row[col_idx["date"]].strip()
        try:
            date = dt.datetime.strptime(raw_date, desc.date_format).date()
        except ValueError:
            corrections.append((line_no, None, "date", f"BadDate: {raw_date!r}"))
            continue
        well = row[col_idx["well_name"]].strip()
        rec = RawRecord(date=date, well_name=well, source_id=desc.source_id)
        for canon, idx in col_idx.items():
            if canon in ("date", "well_name"):
                continue
            cell = row[idx]
            if canon == "well_status":
                status = cell.strip()
                rec.well_status = status if status and status.upper() != "NA" else None
            elif canon.startswith("sensor_"):
                rec.sensor[canon[len("sensor_"):]] = _parse_number(cell)
            else:
                value = _parse_number(cell)
                if canon in ("steam_volume", "oil_volume") and value is not None and value < 0:
                    corrections.append((line_no, well, canon, f"negative volume {value} -> missing"))
                    value = None
                setattr(rec, canon, value)
        records.append(rec)
    return records


def _infer_kinds(records: Iterable[RawRecord]) -> dict:
    """Classify each well: steam data => infill, oil/status/sensor => production."""
    has_steam: dict = {}
    has_prod: dict = {}
    for rec in records:
        if rec.steam_volume is not None:
            has_steam[rec.well_name] = True
        if rec.oil_volume is not None or rec.well_status is not None or any(
            v is not None for v in rec.sensor.values()
        ):
            has_prod[rec.well_name] = True
    kinds = {}
    for rec in records:
        w = rec.well_name
        if w in kinds:
            continue
        steam, prod = w in has_steam, w in has_prod
        if steam and prod:
            raise KindConflict(f"well {w!r} carries both steam and production data")
        kinds[w] = INFILL if steam else PRODUCTION
    return kinds


def consolidate(sources: list, pad_id: str) -> PadTable:
    """Merge per-source records into one dense pad table.

    Duplicate (date, well) records are merged field-wise, last source wins
    per field. The grid is densified to every day in [date_min, date_max]
    for every well; gap rows are all-missing. Negative observed volumes are
    clipped to missing with an error-log entry.
    """
    all_records = [r for src in sources for r in src]
    if not all_records:
        raise EmptyInput("no records in any source")
    kinds = _infer_kinds(all_records)
    sensor_names = sorted({name for r in all_records for name in r.sensor})
    has_pump_hours = any(r.pump_hours is not None for r in all_records)

    error_log = []
    merged: dict = {}  # (date, well) -> field dict
    for rec in all_records:
        key = (rec.date, rec.well_name)
        cell = merged.setdefault(key, {})
        for fname in ("well_status", "pump_hours", "steam_volume", "oil_volume"):
            value = getattr(rec, fname)
            if value is None:
                continue
            if fname in ("steam_volume", "oil_volume") and value < 0:
                error_log.append((rec.date, rec.well_name, fname, f"negative volume {value} -> missing"))
                continue
            cell[fname] = value
        for sname, value in rec.sensor.items():
            if value is not None:
                cell[f"sensor_{sname}"] = value

    dates = pd.date_range(
        min(d for d, _ in merged), max(d for d, _ in merged), freq="D"
    )
    well_names = sorted(kinds)
    columns = ["well_status"] + (["pump_hours"] if has_pump_hours else []) + [
        f"sensor_{s}" for s in sensor_names
    ] + ["steam_volume", "oil_volume"]

    rows = []
    for date in dates:
        day = date.date()
        for w in well_names:
            cell = merged.get((day, w), {})
            row = {"date": date, "well_name": w, "kind": kinds[w]}
            for col in columns:
                row[col] = cell.get(col, None)
            rows.append(row)
    frame = pd.DataFrame(rows, columns=["date", "well_name", "kind"] + columns)
    for col in columns:
        if col != "well_status":
            frame[col] = pd.to_numeric(frame[col])
    return PadTable(
        pad_id=pad_id,
        frame=frame,
        wells=[(w, kinds[w]) for w in well_names],
        sensor_names=sensor_names,
        error_log=error_log,
    )


def _fields_for_kind(table: PadTable, kind: str) -> list:
    if kind == INFILL:
        return ["steam_volume"]
    cols = ["well_status"]
    if "pump_hours" in table.frame.columns:
        cols.append("pump_hours")
    cols += [f"sensor_{s}" for s in table.sensor_names]
    return cols


def _policy_for(policy: dict, column: str) -> str:
    if column in policy:
        return policy[column]
    if column.startswith("sensor_") and "sensor_*" in policy:
        return policy["sensor_*"]
    return FORWARD_BACKWARD


def impute(table: PadTable, policy: Optional[dict] = None) -> PadTable:
    """Fill missing cells per (well, field) series.

    ForwardThenBackwardCopy: forward copy, then backward copy for leading
    gaps. ZeroFill (default for infill steam: no recorded injection means
    no injection) writes 0. Every filled cell is recorded in the
    imputation log. oil_volume is never imputed: fabricating the target
    would fabricate ground truth; rows with missing oil are excluded at
    matrix build instead.
    """
    if policy is None:
        policy = dict(DEFAULT_POLICY)
    out = table.copy()
    frame = out.frame
    log = out.imputation_log

    for well, kind in out.wells:
        mask = frame["well_name"] == well
        idx = frame.index[mask]
        dates = frame.loc[idx, "date"]
        for col in _fields_for_kind(out, kind):
            series = frame.loc[idx, col]
            missing = series.isna()
            if not missing.any():
                continue
            method = _policy_for(policy, col)
            if method == ZERO_FILL:
                frame.loc[idx[missing], col] = 0.0
                for d in dates[missing.values]:
                    log.append((d, well, col, "zero_fill"))
            else:
                if missing.all():
                    raise AllMissingSeries(f"well {well!r}, field {col!r}: no observed values")
                forwarded = series.ffill()
                fwd_filled = missing & forwarded.notna()
                filled = forwarded.bfill()
                bwd_filled = missing & ~fwd_filled
                frame.loc[idx, col] = filled
                for d in dates[fwd_filled.values]:
                    log.append((d, well, col, "forward_copy"))
                for d in dates[bwd_filled.values]:
                    log.append((d, well, col, "backward_copy"))
    return out
