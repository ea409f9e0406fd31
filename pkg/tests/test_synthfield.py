import datetime as dt

import numpy as np
import pytest

from steamflood import features, synthfield
from tests.conftest import build_pad, prepared


def noiseless_cfg(**overrides):
    base = dict(
        n_production=3,
        n_infill=2,
        date_start=dt.date(2019, 1, 1),
        date_end=dt.date(2019, 6, 30),
        noise_sigma=0.0,
        missing_rate=0.0,
        shut_in_prob=0.0,
        seed=7,
        optimum_fractions=(0.3, 0.7),
    )
    base.update(overrides)
    return synthfield.FieldConfig(**base)


class TestFieldConfig:
    @pytest.mark.parametrize(
        "bad",
        [
            {"n_production": 0},
            {"n_infill": 0},
            {"missing_rate": 0.6},
            {"noise_sigma": -1.0},
            {"date_end": dt.date(2015, 1, 1)},
        ],
    )
    def test_bounds(self, bad):
        with pytest.raises(ValueError):
            synthfield.FieldConfig(**bad)


class TestGenerate:
    def test_deterministic_given_seed(self, small_field_cfg):
        a_sources, a_truth = synthfield.generate(small_field_cfg)
        b_sources, b_truth = synthfield.generate(small_field_cfg)
        for a, b in zip(a_sources, b_sources):
            assert a.to_csv(index=False) == b.to_csv(index=False)
        assert a_truth.to_json() == b_truth.to_json()

    def test_seed_changes_output(self, small_field_cfg):
        import dataclasses

        other = dataclasses.replace(small_field_cfg, seed=small_field_cfg.seed + 1)
        a, _ = synthfield.generate(small_field_cfg)
        b, _ = synthfield.generate(other)
        assert a[0].to_csv(index=False) != b[0].to_csv(index=False)

    def test_source_shapes(self, small_field_cfg):
        sources, _ = synthfield.generate(small_field_cfg)
        n_days = 181  # 2019-01-01 .. 2019-06-30
        for src in sources[:4]:
            assert len(src) == n_days * small_field_cfg.n_production
        assert len(sources[4]) == n_days * small_field_cfg.n_infill

    def test_pad_table_row_count(self, small_pad, small_field_cfg):
        n_wells = small_field_cfg.n_production + small_field_cfg.n_infill
        assert len(small_pad.frame) == 181 * n_wells

    def test_missing_cells_present_but_every_series_observed(self, small_field_cfg):
        sources, _ = synthfield.generate(small_field_cfg)
        oil = sources[0]["Oil Volume"]
        assert (oil == "").any()  # some cells blanked
        for well, sub in sources[0].groupby("Well Name"):
            assert (sub["Oil Volume"] != "").any()

    def test_daily_total_steam_is_constant(self):
        sources, _ = synthfield.generate(noiseless_cfg())
        steam = sources[4]
        totals = steam.groupby("Date")["Steam Volume"].apply(lambda s: s.astype(float).sum())
        np.testing.assert_allclose(totals.to_numpy(), 1000.0)

    def test_truth_json_round_trip(self, small_field_cfg):
        _, truth = synthfield.generate(small_field_cfg)
        clone = synthfield.GroundTruth.from_json(truth.to_json())
        assert clone.to_json() == truth.to_json()

    def test_write_sources(self, tmp_path, small_field_cfg):
        paths, truth = synthfield.write_sources(small_field_cfg, tmp_path)
        assert [p.name for p in paths] == [f"source{i}.csv" for i in range(1, 6)]
        assert all(p.exists() for p in paths)
        loaded = synthfield.GroundTruth.from_json((tmp_path / "truth.json").read_text())
        assert loaded.to_json() == truth.to_json()


class TestGroundTruth:
    def one_well_truth(self):
        return synthfield.GroundTruth(
            production_wells=["P"],
            infill_wells=["I"],
            base=np.array([2.0]),
            coeffs=np.array([[4.0]]),
            beta=np.array([0.5]),
            saturation_scale=500.0,
            steam_memory=14,
            total_steam=1000.0,
            sensor_steady=np.array([10.0]),
        )

    def test_response_saturates(self):
        truth = self.one_well_truth()
        assert truth.response(0.0) == 0.0
        assert truth.response(500.0) == 0.5
        assert truth.response(1e12) == pytest.approx(1.0)

    def test_steady_state_hand_value(self):
        truth = self.one_well_truth()
        # 2 + 4 * (1000 / 1500) + 0.5 * 10
        assert truth.steady_state_total([1.0]) == pytest.approx(2 + 8.0 / 3.0 + 5.0)

    def test_oil_rates_clamped(self):
        truth = self.one_well_truth()
        rates = truth.oil_rates(np.array([0.0]), np.array([1.0]), np.array([-100.0]))
        assert rates[0] == 0.0

    def test_concavity_in_allocation(self):
        _, truth = synthfield.generate(noiseless_cfg())
        f = lambda x: truth.steady_state_total([x, 1.0 - x])
        # midpoint beats the chord: strictly concave along the simplex edge
        assert f(0.5) > 0.5 * (f(0.2) + f(0.8))


class TestInteriorOptimum:
    def test_true_optimum_lands_on_target(self):
        _, truth = synthfield.generate(noiseless_cfg())
        best = synthfield.true_optimum(truth, truth.total_steam, step=0.01)
        np.testing.assert_allclose(best, [0.3, 0.7], atol=1e-12)

    def test_three_well_target(self):
        cfg = synthfield.FieldConfig(
            n_production=4, n_infill=3,
            date_start=dt.date(2019, 1, 1), date_end=dt.date(2019, 3, 1),
            optimum_fractions=(0.27, 0.04, 0.69), seed=3,
        )
        _, truth = synthfield.generate(cfg)
        best = synthfield.true_optimum(truth, truth.total_steam, step=0.01)
        np.testing.assert_allclose(best, [0.27, 0.04, 0.69], atol=1e-12)

    def test_kkt_condition(self):
        rng = np.random.default_rng(0)
        f = np.array([0.3, 0.7])
        coeffs = synthfield.interior_optimum_coeffs(3, f, 1000.0, 500.0, rng)
        # marginal value A_j * c / (f_j T + c)^2 equal across wells
        marginal = coeffs.sum(axis=0) * 500.0 / (f * 1000.0 + 500.0) ** 2
        np.testing.assert_allclose(marginal, marginal[0])


class TestGroundTruthPredictor:
    def test_requires_t_covering_memory(self, small_matrix):
        _, truth = synthfield.generate(noiseless_cfg())
        with pytest.raises(ValueError):
            synthfield.GroundTruthPredictor(truth, small_matrix.spec)  # t=10 < memory 14

    def test_exact_on_noiseless_field(self):
        cfg = noiseless_cfg()
        table, truth = build_pad(cfg)
        steam, production = prepared(table)
        matrix = features.build_matrix(
            steam, production, features.ForecastConfig(t=truth.steam_memory, k=2)
        )
        predictor = synthfield.GroundTruthPredictor(truth, matrix.spec)
        np.testing.assert_allclose(predictor.predict(matrix.X), matrix.y, atol=1e-9)

    def test_noise_breaks_exactness(self):
        cfg = noiseless_cfg(noise_sigma=1.0)
        table, truth = build_pad(cfg)
        steam, production = prepared(table)
        matrix = features.build_matrix(
            steam, production, features.ForecastConfig(t=truth.steam_memory, k=2)
        )
        predictor = synthfield.GroundTruthPredictor(truth, matrix.spec)
        resid = predictor.predict(matrix.X) - matrix.y
        assert np.std(resid) == pytest.approx(1.0, rel=0.15)
