"""FastAPI application exposing the workflow handlers."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import LatticeWalkError
from . import handlers
from .schemas import (
    ConvergeRequest,
    ConvergeResponse,
    EventProbabilityRequest,
    EventProbabilityResponse,
    MeasureRequest,
    MeasureResponse,
    SimulateRequest,
    SimulateResponse,
    VerifyNewton1Request,
    VerifyNewton2Request,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="latticewalk",
        description=(
            "Exact event-algebra measures and lattice random-walk "
            "verification workflows."
        ),
        version="0.1.0",
    )

    @app.exception_handler(LatticeWalkError)
    async def domain_error(request: Request, exc: LatticeWalkError):
        return JSONResponse(
            status_code=422,
            content={"detail": str(exc), "error": type(exc).__name__},
        )

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"detail": str(exc), "error": "ValueError"},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/measure", response_model=MeasureResponse)
    def measure(req: MeasureRequest) -> MeasureResponse:
        return handlers.handle_measure(req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        return handlers.handle_simulate(req)

    @app.post("/verify/newton1", response_model=VerifyResponse)
    def verify_newton1(req: VerifyNewton1Request) -> VerifyResponse:
        return handlers.handle_verify_newton1(req)

    @app.post("/verify/newton2", response_model=VerifyResponse)
    def verify_newton2(req: VerifyNewton2Request) -> VerifyResponse:
        return handlers.handle_verify_newton2(req)

    @app.post("/converge", response_model=ConvergeResponse)
    def converge(req: ConvergeRequest) -> ConvergeResponse:
        return handlers.handle_converge(req)

    @app.post("/events/probability", response_model=EventProbabilityResponse)
    def event_probability(req: EventProbabilityRequest) -> EventProbabilityResponse:
        return handlers.handle_event_probability(req)

    return app


app = create_app()
