"""Local HTTP facade over trained artifacts.

Inference-only: training and ingestion stay on the CLI, the server never
mutates a published artifact, and every response cites the hash of the
model artifact it used.
"""
from __future__ import annotations

import uuid
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import gbt, optimizer, pipeline
from .config import RunConfig
from .errors import SameWellTwice, SteamfloodError


class PlanBody(BaseModel):
    fractions: dict
    total_steam: Optional[float] = None


class ForecastBody(BaseModel):
    horizon_dates: list
    plan: PlanBody


class OptimizeBody(BaseModel):
    step: float = 0.01


class _Session:
    """Read-only artifacts loaded once; safe to share across requests."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.store = pipeline.ArtifactStore.for_config(cfg)
        self._model = None
        self._evaluator = None

    @property
    def model(self) -> gbt.GbtModel:
        if self._model is None:
            if not self.store.has("model.json"):
                raise HTTPException(status_code=409, detail="no trained model artifact")
            self._model = pipeline.load_model(self.store)
            self.model_hash = self.store.model_hash()
            self.spec = pipeline.load_spec(self.store)
        return self._model

    def evaluator(self) -> optimizer.PlanEvaluator:
        if self._evaluator is None:
            model = self.model
            req = pipeline.build_optimize_request(self.cfg, self.store)
            self._evaluator = optimizer.PlanEvaluator(model, req)
        return self._evaluator

    def plan_from_body(self, body: PlanBody) -> optimizer.AllocationPlan:
        model = self.model
        fractions = {str(k): float(v) for k, v in body.fractions.items()}
        if set(fractions) != set(self.spec.infill_wells):
            raise HTTPException(
                status_code=422,
                detail=f"fractions must cover exactly the infill wells {list(self.spec.infill_wells)}",
            )
        values = np.array(list(fractions.values()))
        if (values < 0).any() or abs(values.sum() - 1.0) > 1e-6:
            raise HTTPException(status_code=422, detail="fractions must be >= 0 and sum to 1")
        total = body.total_steam if body.total_steam is not None else self.cfg.opt_total_steam
        return optimizer.AllocationPlan(fractions=fractions, total_steam=total)


def create_app(cfg: RunConfig, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="steamflood")
    session = _Session(cfg)

    @app.exception_handler(SteamfloodError)
    async def _domain_error(request: Request, exc: SteamfloodError):
        return JSONResponse(status_code=500, content={"error": str(exc), "error_id": uuid.uuid4().hex[:8]})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/model/importance")
    def model_importance(top: int = Query(default=8, ge=1)):
        model = session.model
        report = gbt.importance(model, top=top)
        return {
            "artifact_hash": session.model_hash,
            "importance": [{"feature": f, "gain_share": s} for f, s in report.entries],
        }

    @app.post("/forecast")
    def forecast(body: ForecastBody):
        plan = session.plan_from_body(body.plan)
        try:
            horizon = pd.DatetimeIndex([pd.Timestamp(d) for d in body.horizon_dates])
        except (TypeError, ValueError):
            raise HTTPException(status_code=422, detail="invalid horizon_dates")
        if len(horizon) == 0:
            raise HTTPException(status_code=422, detail="horizon_dates must be non-empty")
        req = pipeline.build_optimize_request(session.cfg, session.store)
        req.horizon_dates = horizon
        evaluator = optimizer.PlanEvaluator(session.model, req)
        dates, wells, preds = evaluator.predict_rows(plan)
        return {
            "artifact_hash": session.model_hash,
            "predictions": [
                {"date": str(pd.Timestamp(d).date()), "well_name": w, "predicted": float(v)}
                for d, w, v in zip(dates, wells, preds)
            ],
        }

    @app.post("/whatif")
    def whatif(body: PlanBody):
        plan = session.plan_from_body(body)
        evaluator = session.evaluator()
        predicted = evaluator.evaluate_vector(
            plan.vector(session.spec.infill_wells), total_steam=plan.total_steam
        )
        reference = evaluator.reference_plan()
        reference_predicted = evaluator.evaluate_vector(
            reference.vector(session.spec.infill_wells)
        )
        return {
            "artifact_hash": session.model_hash,
            "predicted_total": predicted,
            "reference_predicted": reference_predicted,
            "improvement": predicted / reference_predicted - 1.0,
        }

    @app.post("/optimize")
    def run_optimize(body: OptimizeBody):
        model = session.model
        try:
            req = pipeline.build_optimize_request(session.cfg, session.store, step=body.step)
        except SteamfloodError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        result = optimizer.optimize(model, req)
        return {
            "artifact_hash": session.model_hash,
            "best": {"fractions": result.best.fractions, "total_steam": result.best.total_steam},
            "predicted_total": result.predicted_total,
            "reference_predicted": result.reference_predicted,
            "improvement": result.improvement,
            "n_evaluated": result.n_evaluated,
        }

    @app.get("/heatmap")
    def get_heatmap(i: int, j: int, step: float = 0.01):
        model = session.model
        wells = session.spec.infill_wells
        if not (0 <= i < len(wells)) or not (0 <= j < len(wells)):
            raise HTTPException(status_code=422, detail="well index out of range")
        try:
            req = pipeline.build_optimize_request(session.cfg, session.store, step=step)
            grid = optimizer.heatmap(model, req, (wells[i], wells[j]))
        except SameWellTwice as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except SteamfloodError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "artifact_hash": session.model_hash,
            "well_i": grid.well_i,
            "well_j": grid.well_j,
            "step": grid.step,
            "cells": [list(c) for c in grid.cells],
            "current_cell": list(grid.current_cell),
            "optimal_cell": list(grid.optimal_cell),
            "residual_policy": grid.residual_policy,
        }

    @app.get("/report/monthly")
    def report_monthly():
        session.model  # 409 when untrained
        monthly = session.store.path("monthly.csv")
        if not monthly.exists():
            raise HTTPException(status_code=409, detail="no evaluation report; run evaluate first")
        frame = pd.read_csv(monthly)
        return {
            "artifact_hash": session.model_hash,
            "months": frame.where(frame.notna(), None).to_dict(orient="records"),
        }

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
