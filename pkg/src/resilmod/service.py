"""HTTP service exposing the toolkit: validate, eval, simulate, compare.

The service wraps the core package; the CLI is a thin client of these
endpoints. Error mapping: request/config validation problems come back as
422 (FastAPI's model validation) or 400 (domain and section-mapping errors
raised while running); anything unexpected is a 500.
"""

from __future__ import annotations

from typing import Any, Literal

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .config import ConfigDocument, parse_config_dict
from .errors import ConfigError, DomainError
from .reports import ReportDocument
from .runner import run_compare, run_eval, run_simulate

__all__ = ["app", "create_app"]


class EvalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigDocument
    convention: Literal["literal", "survival"] | None = None


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigDocument
    trials: int = Field(default=10000, ge=1)
    seed: int = Field(default=42, ge=0, lt=2**64)
    convention: Literal["literal", "survival"] | None = None
    trace: bool = False


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigDocument
    trials: int = Field(default=10000, ge=1)
    seed: int = Field(default=42, ge=0, lt=2**64)
    trace: bool = False


class HealthResponse(BaseModel):
    status: str
    version: str


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[dict[str, str]]


def create_app() -> FastAPI:
    app = FastAPI(
        title="resilmod",
        description="Resilience pattern modeling and fault-injection simulation service",
        version=__version__,
    )

    @app.exception_handler(DomainError)
    async def _domain_error(_request: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"errors": [str(exc)]})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/validate", response_model=ValidateResponse)
    def validate(document: Any = Body(...)) -> ValidateResponse:
        try:
            parse_config_dict(document)
        except ConfigError as exc:
            return ValidateResponse(
                valid=False,
                errors=[{"path": path, "message": msg} for path, msg in exc.errors],
            )
        return ValidateResponse(valid=True, errors=[])

    @app.post("/eval", response_model=ReportDocument)
    def eval_endpoint(request: EvalRequest) -> ReportDocument:
        return run_eval(request.config, convention_override=request.convention)

    @app.post("/simulate", response_model=ReportDocument)
    def simulate_endpoint(request: SimulateRequest) -> ReportDocument:
        return run_simulate(
            request.config,
            trials=request.trials,
            master_seed=request.seed,
            convention_override=request.convention,
            collect_traces=request.trace,
        )

    @app.post("/compare", response_model=ReportDocument)
    def compare_endpoint(request: CompareRequest) -> ReportDocument:
        return run_compare(
            request.config,
            trials=request.trials,
            master_seed=request.seed,
            collect_traces=request.trace,
        )

    return app


app = create_app()
