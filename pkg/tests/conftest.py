import datetime as dt
import io
import json

import pytest

from steamflood import config, features, ingest, pipeline, synthfield


def build_pad(cfg: synthfield.FieldConfig):
    """Generated sources -> parsed -> consolidated -> imputed pad table."""
    sources, truth = synthfield.generate(cfg)
    descs = synthfield.source_descriptors()
    records = [
        ingest.parse_source(io.StringIO(frame.to_csv(index=False)), desc)
        for frame, desc in zip(sources, descs)
    ]
    table = ingest.impute(ingest.consolidate(records, "synth-pad"))
    return table, truth


def prepared(table):
    infill, production = features.split_by_kind(table)
    steam = features.pivot_infill(infill)
    production = features.one_hot(features.derive_gas_day_rate(production))
    return steam, production


@pytest.fixture(scope="session")
def small_field_cfg():
    return synthfield.FieldConfig(
        n_production=3,
        n_infill=2,
        date_start=dt.date(2019, 1, 1),
        date_end=dt.date(2019, 6, 30),
        noise_sigma=0.5,
        missing_rate=0.05,
        seed=1,
        optimum_fractions=(0.3, 0.7),
    )


@pytest.fixture(scope="session")
def small_pad(small_field_cfg):
    table, _ = build_pad(small_field_cfg)
    return table


def small_run_config(workdir: str = "work") -> dict:
    """A minutes-to-seconds shrink of the default run configuration."""
    cfg = config.default_config(
        workdir=workdir,
        t=10,
        k_grid=[5],
        grid={"max_depth": [3], "learning_rate": [0.2], "n_trees": [30]},
        synthfield={
            "n_production": 3,
            "n_infill": 2,
            "date_start": "2019-01-01",
            "date_end": "2019-06-30",
            "noise_sigma": 0.2,
            "missing_rate": 0.02,
            "seed": 1,
            "optimum_fractions": [0.3, 0.7],
        },
        optimizer={"step": 0.05, "total_steam": 1000.0, "horizon_days": 30},
    )
    cfg["cv"] = {"n_folds": 3}
    return cfg


@pytest.fixture(scope="session")
def run_env(tmp_path_factory):
    """Config file plus fully populated artifact store for a small run."""
    root = tmp_path_factory.mktemp("run_env")
    path = root / "config.json"
    path.write_text(json.dumps(small_run_config(), indent=2))
    cfg = config.load_config(path)
    pipeline.run_generate(cfg)
    store = pipeline.ArtifactStore.for_config(cfg)
    pipeline.run_ingest(cfg, store)
    pipeline.run_train(cfg, store)
    pipeline.run_evaluate(cfg, store)
    return path, cfg, store


@pytest.fixture(scope="session")
def small_matrix(small_pad):
    steam, production = prepared(small_pad)
    return features.build_matrix(steam, production, features.ForecastConfig(t=10, k=5))
