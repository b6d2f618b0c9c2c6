"""FastAPI wiring: one POST endpoint per subcommand plus a health probe.

Domain validation errors surface as HTTP 422 with a plain-text detail,
matching what pydantic produces for shape errors.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import EstimationError, ValidationError
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="urnkit",
        version=__version__,
        description="Triggered urn simulation, exact laws, approximations "
                    "and parameter estimation over HTTP.",
    )

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(EstimationError)
    async def _estimation(request: Request, exc: EstimationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        return handlers.run_simulate(req)

    @app.post("/exact", response_model=schemas.ExactResponse)
    def exact(req: schemas.ExactRequest):
        return handlers.run_exact(req)

    @app.post("/approx", response_model=schemas.ApproxResponse)
    def approx(req: schemas.ApproxRequest):
        return handlers.run_approx(req)

    @app.post("/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(req: schemas.AnalyzeRequest):
        return handlers.run_analyze(req)

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        return handlers.run_fit(req)

    @app.post("/oracle", response_model=schemas.OracleResponse)
    def oracle(req: schemas.OracleRequest):
        return handlers.run_oracle(req)

    return app
