"""Command-line entry points for the full workflow:
generate -> ingest -> train -> evaluate / importance -> optimize / heatmap -> serve.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import pipeline
from .config import load_config
from .errors import ConfigError, SteamfloodError

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_PIPELINE = 4


def _fail(code: int, kind: str, message: str):
    click.echo(json.dumps({"error": kind, "message": message}), err=True)
    sys.exit(code)


def _load(config_path):
    try:
        return load_config(config_path)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, "config", str(exc))


def _store(cfg):
    return pipeline.ArtifactStore.for_config(cfg)


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except FileNotFoundError as exc:
        _fail(EXIT_IO, "io", str(exc))
    except SteamfloodError as exc:
        _fail(EXIT_PIPELINE, type(exc).__name__, str(exc))


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(exists=True), help="run config JSON"
)


@click.group()
def main():
    """Steam-flood forecasting and allocation optimization."""


@main.command()
@click.option("--workdir", default="run", show_default=True, help="directory for data and artifacts")
@click.option("--out", "out_path", default="config.json", show_default=True, type=click.Path(), help="where to write the config")
def init(workdir, out_path):
    """Write a default run configuration to a JSON file."""
    from .config import default_config

    out = Path(out_path)
    if out.exists():
        _fail(EXIT_IO, "io", f"refusing to overwrite existing {out}")
    out.write_text(json.dumps(default_config(workdir=workdir), indent=2) + "\n")
    click.echo(json.dumps({"config": str(out)}))


@main.command()
@config_option
def generate(config_path):
    """Generate the synthetic field sources defined in the config."""
    cfg = _load(config_path)
    paths = _run(pipeline.run_generate, cfg)
    click.echo(json.dumps({"written": [str(p) for p in paths]}))


@main.command()
@config_option
def ingest(config_path):
    """Parse, consolidate and impute the configured sources."""
    cfg = _load(config_path)
    store = _store(cfg)
    table = _run(pipeline.run_ingest, cfg, store)
    click.echo(
        json.dumps(
            {
                "pad_table": str(store.path("pad_table.csv")),
                "rows": len(table.frame),
                "wells": len(table.wells),
                "imputed_cells": len(table.imputation_log),
            }
        )
    )


@main.command()
@config_option
@click.option("--workers", default=1, show_default=True, help="split-search worker count")
def train(config_path, workers):
    """Grid search with time-series CV, then fit the winner on the train split."""
    cfg = _load(config_path)
    store = _store(cfg)
    model = _run(pipeline.run_train, cfg, store, n_workers=workers)
    click.echo(
        json.dumps(
            {
                "model": str(store.path("model.json")),
                "model_hash": store.model_hash(),
                "n_trees": len(model.trees),
                "params": model.params.to_dict(),
            }
        )
    )


@main.command()
@config_option
def evaluate(config_path):
    """Train/test metrics for the model and the copy-forward baseline,
    plus the monthly report and figure."""
    cfg = _load(config_path)
    store = _store(cfg)
    metrics = _run(pipeline.run_evaluate, cfg, store)
    click.echo(json.dumps(metrics, indent=2))


@main.command()
@config_option
@click.option("--top", default=8, show_default=True, help="number of features to report")
def importance(config_path, top):
    """Gain-share feature importance report and bar chart."""
    cfg = _load(config_path)
    store = _store(cfg)
    report = _run(pipeline.run_importance, cfg, store, top=top)
    for feature, share in report.entries:
        click.echo(f"{share:.6f}\t{feature}")


@main.command()
@config_option
@click.option("--step", default=None, type=float, help="fraction grid resolution override")
def optimize(config_path, step):
    """Brute-force search for the production-maximizing steam allocation."""
    cfg = _load(config_path)
    store = _store(cfg)
    result = _run(pipeline.run_optimize, cfg, store, step=step)
    click.echo(result.to_json())


@main.command()
@config_option
@click.option("--wells", default="0,1", show_default=True, help="axis infill wells, comma-separated indices")
@click.option("--step", default=None, type=float, help="fraction grid resolution override")
def heatmap(config_path, wells, step):
    """Predicted production over a 2-D allocation slice, as JSON/CSV/PNG."""
    cfg = _load(config_path)
    store = _store(cfg)
    try:
        i, j = (int(x) for x in wells.split(","))
    except ValueError:
        _fail(EXIT_CONFIG, "config", f"--wells must be 'i,j' indices, got {wells!r}")
    spec = _run(pipeline.load_spec, store)
    names = spec.infill_wells
    if not (0 <= i < len(names) and 0 <= j < len(names)):
        _fail(EXIT_CONFIG, "config", f"well index out of range 0..{len(names) - 1}")
    grid = _run(pipeline.run_heatmap, cfg, store, (names[i], names[j]), step=step)
    click.echo(
        json.dumps(
            {
                "heatmap": str(store.path("heatmap.csv")),
                "figure": str(store.path("heatmap.png")),
                "cells": len(grid.cells),
                "optimal_cell": list(grid.optimal_cell),
            }
        )
    )


@main.command()
@config_option
@click.option("--port", default=None, type=int, help="override the configured port")
def serve(config_path, port):
    """Serve the inference API (and the what-if UI when built)."""
    import uvicorn

    from .server import create_app

    cfg = _load(config_path)
    ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(cfg, ui_dir=ui_dir if ui_dir.exists() else None)
    uvicorn.run(app, host=cfg.server_host, port=port or cfg.server_port)


if __name__ == "__main__":
    main()
