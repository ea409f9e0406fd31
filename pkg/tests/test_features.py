import datetime as dt

import numpy as np
import pandas as pd
import pytest

from steamflood import errors, features, ingest

START = dt.date(2019, 1, 1)


def synthetic_table(n_days=40, statuses=None):
    """Two infill wells and two production wells with arithmetic codes:
    steam(d, j) = 100*d + j, temperature(d, w) = 1000*d + w, oil(d, w) = 10*d + w,
    where d is the day offset. Every lag value is recoverable by eye.
    """
    records = []
    for d in range(n_days):
        date = START + dt.timedelta(days=d)
        for j in range(2):
            records.append(
                ingest.RawRecord(date=date, well_name=f"Infill Well {j + 1}", steam_volume=100.0 * d + j)
            )
        for w in range(2):
            status = statuses[d][w] if statuses else "Pump"
            records.append(
                ingest.RawRecord(
                    date=date,
                    well_name=f"Prod Well {w + 1}",
                    well_status=status,
                    sensor={"temperature": 1000.0 * d + w},
                    oil_volume=10.0 * d + w,
                )
            )
    return ingest.impute(ingest.consolidate([records], "toy"))


def build(table, t=5, k=3, **kw):
    from tests.conftest import prepared

    steam, production = prepared(table)
    return features.build_matrix(steam, production, features.ForecastConfig(t=t, k=k, **kw))


class TestForecastConfig:
    @pytest.mark.parametrize("bad", [{"t": 0}, {"k": 0}, {"t": -3}])
    def test_bounds(self, bad):
        with pytest.raises(ValueError):
            features.ForecastConfig(**bad)


class TestFeatureSpec:
    def full_spec(self):
        return features.FeatureSpec(
            t=30,
            k=14,
            include_oil_lags=False,
            infill_wells=tuple(f"Infill Well {j}" for j in range(1, 4)),
            sensors=("pressure", "temperature"),
            wells=tuple(f"Prod Well {w}" for w in range(1, 9)),
            statuses=("Pump", "Shut-In"),
        )

    def test_column_count(self):
        # 30*3 steam + 14*2 sensor + 1 gas + 8 well + 2 status
        assert len(self.full_spec().names) == 129

    def test_block_order(self):
        names = self.full_spec().names
        assert names[0] == "prior_1-day_infill_well_Infill Well 1-steam"
        assert names[1] == "prior_1-day_infill_well_Infill Well 2-steam"
        assert names[3] == "prior_2-day_infill_well_Infill Well 1-steam"
        assert names[90] == "prior_31-day_sensor_pressure-value"
        assert names[91] == "prior_31-day_sensor_temperature-value"
        assert names[118] == "gas_day_rate"
        assert names[119] == "well_Prod Well 1"
        assert names[-1] == "status_Shut-In"

    def test_steam_lags_stop_at_horizon(self):
        names = self.full_spec().names
        steam = [n for n in names if n.endswith("-steam")]
        lags = {int(n.split("-day")[0].split("_")[1]) for n in steam}
        assert lags == set(range(1, 31))
        sensor = [n for n in names if n.endswith("-value")]
        lags = {int(n.split("-day")[0].split("_")[1]) for n in sensor}
        assert lags == set(range(31, 45))

    def test_json_round_trip(self):
        spec = self.full_spec()
        assert features.FeatureSpec.from_json(spec.to_json()) == spec

    def test_steam_column_index_matches_names(self):
        spec = self.full_spec()
        names = spec.names
        for pos, m, x in spec.steam_column_index():
            assert names[pos] == f"prior_{m}-day_infill_well_{x}-steam"

    def test_oil_lag_columns(self):
        spec = features.FeatureSpec(
            t=5, k=3, include_oil_lags=True,
            infill_wells=("I",), sensors=("s",), wells=("P",), statuses=("Pump",),
        )
        assert [n for n in spec.names if "oil" in n] == [
            "prior_6-day_oil-value", "prior_7-day_oil-value", "prior_8-day_oil-value"
        ]


class TestSplitAndPivot:
    def test_split_by_kind(self, small_pad):
        infill, production = features.split_by_kind(small_pad)
        assert all(k == ingest.INFILL for _, k in infill.wells)
        assert all(k == ingest.PRODUCTION for _, k in production.wells)
        assert len(infill.wells) + len(production.wells) == len(small_pad.wells)

    def test_no_infill_raises(self, small_pad):
        prod_only = small_pad.copy()
        prod_only.wells = [(w, k) for w, k in small_pad.wells if k == ingest.PRODUCTION]
        with pytest.raises(errors.NoInfillWells):
            features.split_by_kind(prod_only)

    def test_pivot_columns_sorted_and_dense(self, small_pad):
        infill, _ = features.split_by_kind(small_pad)
        wide = features.pivot_infill(infill)
        assert wide.well_names == sorted(wide.well_names)
        assert wide.frame.notna().all().all()
        assert len(wide.dates) == len(small_pad.dates)


class TestGasDayRate:
    def test_status_mapping(self):
        statuses = [["Pump", "Shut-In"] for _ in range(40)]
        statuses[3] = ["Flowing", "Pump"]
        table = synthetic_table(statuses=statuses)
        _, production = features.split_by_kind(table)
        rated = features.derive_gas_day_rate(production)
        frame = rated.frame
        day3 = frame[frame["date"] == pd.Timestamp(START + dt.timedelta(days=3))]
        by_well = day3.set_index("well_name")["gas_day_rate"]
        assert by_well["Prod Well 1"] == 0.5  # unknown status
        assert by_well["Prod Well 2"] == 1.0
        day4 = frame[frame["date"] == pd.Timestamp(START + dt.timedelta(days=4))]
        assert day4.set_index("well_name")["gas_day_rate"]["Prod Well 2"] == 0.0

    def test_pump_hours_preferred(self):
        table = synthetic_table(n_days=5)
        _, production = features.split_by_kind(table)
        production.frame["pump_hours"] = 12.0
        rated = features.derive_gas_day_rate(production)
        assert (rated.frame["gas_day_rate"] == 0.5).all()


class TestBuildMatrix:
    def test_history_too_short(self):
        table = synthetic_table(n_days=8)
        with pytest.raises(errors.HistoryTooShort):
            build(table, t=5, k=3)

    def test_row_universe(self):
        table = synthetic_table(n_days=40)
        matrix = build(table, t=5, k=3)
        # first 8 days lack history; 32 usable days x 2 production wells
        assert len(matrix) == 32 * 2
        assert matrix.dates.min() == np.datetime64(
            pd.Timestamp(START + dt.timedelta(days=8))
        )

    def test_rows_sorted_by_date_then_well(self):
        table = synthetic_table(n_days=40)
        matrix = build(table, t=5, k=3)
        keys = list(zip(matrix.dates, matrix.well_names))
        assert keys == sorted(keys)

    def test_exact_lag_values(self):
        table = synthetic_table(n_days=40)
        matrix = build(table, t=5, k=3)
        names = matrix.spec.names
        # row for day offset 20, Prod Well 2
        target = pd.Timestamp(START + dt.timedelta(days=20))
        row = matrix.X[(matrix.dates == np.datetime64(target)) & (matrix.well_names == "Prod Well 2")][0]
        for m in range(1, 6):
            for j in range(2):
                col = names.index(f"prior_{m}-day_infill_well_Infill Well {j + 1}-steam")
                assert row[col] == 100.0 * (20 - m) + j
        for n in range(6, 9):
            col = names.index(f"prior_{n}-day_sensor_temperature-value")
            assert row[col] == 1000.0 * (20 - n) + 1
        assert row[names.index("gas_day_rate")] == 1.0
        assert row[names.index("well_Prod Well 2")] == 1.0
        assert row[names.index("well_Prod Well 1")] == 0.0

    def test_target_is_same_day_oil(self):
        table = synthetic_table(n_days=40)
        matrix = build(table, t=5, k=3)
        target = pd.Timestamp(START + dt.timedelta(days=20))
        mask = (matrix.dates == np.datetime64(target)) & (matrix.well_names == "Prod Well 1")
        assert matrix.y[mask][0] == 10.0 * 20

    def test_status_onehot_lagged_to_decision_day(self):
        statuses = [["Pump", "Pump"] for _ in range(40)]
        statuses[14] = ["Shut-In", "Pump"]  # decision day for target day 20 at t=5
        table = synthetic_table(statuses=statuses)
        matrix = build(table, t=5, k=3)
        names = matrix.spec.names
        target = pd.Timestamp(START + dt.timedelta(days=20))
        row = matrix.X[(matrix.dates == np.datetime64(target)) & (matrix.well_names == "Prod Well 1")][0]
        assert row[names.index("status_Shut-In")] == 1.0
        assert row[names.index("status_Pump")] == 0.0
        assert row[names.index("gas_day_rate")] == 0.0

    def test_no_well_data_inside_forecast_window(self):
        """Changing the target well's sensors/status/oil anywhere in
        [D - t, D] must leave the feature row unchanged (steam excepted)."""
        table = synthetic_table(n_days=40)
        matrix = build(table, t=5, k=3)
        tampered = table.copy()
        tampered.frame = table.frame.copy()
        window = [pd.Timestamp(START + dt.timedelta(days=d)) for d in range(15, 21)]
        sel = tampered.frame["date"].isin(window) & (tampered.frame["kind"] == ingest.PRODUCTION)
        tampered.frame.loc[sel, "sensor_temperature"] = 9e9
        tampered.frame.loc[sel, "well_status"] = "Pump"
        matrix2 = build(tampered, t=5, k=3)
        target = pd.Timestamp(START + dt.timedelta(days=20))
        mask = matrix.dates == np.datetime64(target)
        np.testing.assert_array_equal(matrix.X[mask], matrix2.X[mask])

    def test_missing_oil_rows_dropped(self):
        table = synthetic_table(n_days=40)
        holed = table.copy()
        holed.frame = table.frame.copy()
        target = pd.Timestamp(START + dt.timedelta(days=20))
        sel = (holed.frame["date"] == target) & (holed.frame["well_name"] == "Prod Well 1")
        holed.frame.loc[sel, "oil_volume"] = np.nan
        matrix = build(holed, t=5, k=3)
        mask = (matrix.dates == np.datetime64(target)) & (matrix.well_names == "Prod Well 1")
        assert mask.sum() == 0
        assert len(matrix) == 32 * 2 - 1

    def test_oil_lags_come_from_before_decision_day(self):
        table = synthetic_table(n_days=40)
        matrix = build(table, t=5, k=3, include_oil_lags=True)
        names = matrix.spec.names
        target = pd.Timestamp(START + dt.timedelta(days=20))
        row = matrix.X[(matrix.dates == np.datetime64(target)) & (matrix.well_names == "Prod Well 1")][0]
        for n in range(6, 9):
            assert row[names.index(f"prior_{n}-day_oil-value")] == 10.0 * (20 - n)

    def test_finite_everywhere_on_generated_pad(self, small_matrix):
        assert np.isfinite(small_matrix.X).all()
        assert np.isfinite(small_matrix.y).all()

    def test_subset_round_trip(self, small_matrix):
        mask = np.zeros(len(small_matrix), dtype=bool)
        mask[::3] = True
        sub = small_matrix.subset(mask)
        assert len(sub) == int(mask.sum())
        np.testing.assert_array_equal(sub.X[0], small_matrix.X[0])

    def test_to_frame_shape(self, small_matrix):
        frame = small_matrix.to_frame()
        assert list(frame.columns[:2]) == ["date", "well_name"]
        assert frame.shape == (len(small_matrix), len(small_matrix.spec.names) + 3)
