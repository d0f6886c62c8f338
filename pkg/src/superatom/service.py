"""FastAPI service wrapping the scenario engine.

The CLI is a thin client of this app (in-process ASGI by default, remote URL
with ``--server``).  Requests carry a config document plus dotted-path
overrides; responses carry the summary payload and the exact output file
bodies, which the client writes to disk unchanged.
"""

from __future__ import annotations

from typing import Any, Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .config import apply_overrides, load_defaults, load_schema, merged_config
from .errors import ConfigError, ModelError, NumericFailure
from .fitting import (
    ScanCurve,
    fit_asymmetric_gaussian,
    fit_damped_rabi,
    peak_metrics,
)
from .output import scenario_files, sweep_summary, _fit_payload, _peak_payload
from .scenarios import (
    run_adiabaticity,
    run_area_scan,
    run_chirp_summary,
    run_detuning_scan,
    run_rabi_scan,
)

SCENARIOS = ("rabi", "area-scan", "chirp-summary", "detuning-scan", "adiabaticity")


class RunRequest(BaseModel):
    config: dict[str, Any] | None = None
    overrides: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    workers: int | None = Field(default=None, ge=1, le=64)


class RunResponse(BaseModel):
    scenario: str
    provenance: dict[str, Any]
    summary: dict[str, Any]
    files: dict[str, str]


class FitRequest(BaseModel):
    x: list[float]
    y: list[float]
    sigma: list[float] | None = None
    model: Literal["damped-rabi", "asym-gaussian"] = "damped-rabi"


class FitResponse(BaseModel):
    fit: dict[str, Any]
    peak: dict[str, Any] | None


class HealthResponse(BaseModel):
    status: str


class VersionResponse(BaseModel):
    version: str


app = FastAPI(
    title="superatom",
    description="Chirped Rydberg-excitation scan service",
    version=__version__,
)


def _http_config_error(exc: ConfigError) -> HTTPException:
    return HTTPException(
        status_code=422,
        detail={"kind": "config", "message": str(exc), "key": exc.key},
    )


def _http_numeric_error(exc: NumericFailure) -> HTTPException:
    return HTTPException(
        status_code=500,
        detail={"kind": "numeric", "message": str(exc)},
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok")


@app.get("/version", response_model=VersionResponse)
def version() -> VersionResponse:
    return VersionResponse(version=__version__)


@app.get("/config/schema")
def config_schema() -> dict:
    return load_schema()


@app.get("/config/defaults")
def config_defaults() -> dict:
    return load_defaults()


def _prepare_config(request: RunRequest) -> tuple[dict, int]:
    cfg = merged_config(request.config)
    if request.overrides:
        cfg = apply_overrides(cfg, request.overrides)
    if request.seed is not None:
        cfg["seed"] = request.seed
    workers = request.workers if request.workers is not None else cfg["workers"]
    return cfg, workers


def _execute(scenario: str, cfg: dict, workers: int) -> tuple[dict, dict, dict]:
    if scenario == "rabi":
        result = run_rabi_scan(cfg, workers=workers)
        return sweep_summary(result), scenario_files("rabi", result), result.provenance
    if scenario == "area-scan":
        sweeps = run_area_scan(cfg, workers=workers)
        summary = {"scenario": "area-scan", "curves": [sweep_summary(s) for s in sweeps]}
        return summary, scenario_files("area-scan", sweeps), sweeps[0].provenance
    if scenario == "chirp-summary":
        sweeps = run_area_scan(cfg, workers=workers)
        summary = run_chirp_summary(sweeps)
        files = scenario_files("chirp-summary",
                               {"summary": summary, "area_results": sweeps})
        return summary, files, summary["provenance"]
    if scenario == "detuning-scan":
        result = run_detuning_scan(cfg, workers=workers)
        summary = {
            "scenario": "detuning-scan",
            "comparison": result["comparison"],
            "curves": [sweep_summary(result["chirped"]),
                       sweep_summary(result["pi_pulse"])],
        }
        files = scenario_files("detuning-scan", result)
        return summary, files, result["chirped"].provenance
    if scenario == "adiabaticity":
        result = run_adiabaticity(cfg)
        return sweep_summary(result), scenario_files("adiabaticity", result), result.provenance
    raise ConfigError(f"unknown scenario: {scenario}")


@app.post("/run/{scenario}", response_model=RunResponse)
def run_scenario(scenario: str, request: RunRequest) -> RunResponse:
    if scenario not in SCENARIOS:
        raise HTTPException(
            status_code=404,
            detail={"kind": "config",
                    "message": f"unknown scenario {scenario!r}; expected one of {SCENARIOS}"},
        )
    try:
        cfg, workers = _prepare_config(request)
        summary, files, provenance = _execute(scenario, cfg, workers)
    except ConfigError as exc:
        raise _http_config_error(exc) from exc
    except ModelError as exc:
        raise HTTPException(
            status_code=422, detail={"kind": "config", "message": str(exc)}
        ) from exc
    except NumericFailure as exc:
        raise _http_numeric_error(exc) from exc
    return RunResponse(scenario=scenario, provenance=provenance,
                       summary=summary, files=files)


@app.post("/fit", response_model=FitResponse)
def fit_curve(request: FitRequest) -> FitResponse:
    try:
        curve = ScanCurve(
            np.asarray(request.x, dtype=float),
            np.asarray(request.y, dtype=float),
            None if request.sigma is None else np.asarray(request.sigma, dtype=float),
        )
        if request.model == "damped-rabi":
            fit = fit_damped_rabi(curve)
        else:
            fit = fit_asymmetric_gaussian(curve)
        peak = peak_metrics(fit, (float(curve.x[0]), float(curve.x[-1])))
    except ConfigError as exc:
        raise _http_config_error(exc) from exc
    except ModelError as exc:
        raise HTTPException(
            status_code=422, detail={"kind": "config", "message": str(exc)}
        ) from exc
    return FitResponse(fit=_fit_payload(fit), peak=_peak_payload(peak))
