"""FastAPI application: /api/v1/ask, /api/v1/models, /healthz, /readyz.

The app is stateless between requests; the engine is built once at
startup (or injected for tests) and shared read-only. Body validation
failures answer 400 rather than FastAPI's default 422 so clients see
one consistent bad-request status.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from ..config import Settings
from ..engine import QAEngine, build_engine
from ..errors import NoResults, SearchFailed
from ..models import Question, RankedAnswer
from ..pipeline import QueryMode
from .schemas import AnswerPayload, AskRequest, AskResponse, AskResult, HealthResponse


def create_app(settings: Settings | None = None, engine: QAEngine | None = None) -> FastAPI:
    settings = settings or Settings()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.engine is None:
            app.state.engine = build_engine(settings)
        yield

    app = FastAPI(title="odqa", version="0.1.0", lifespan=lifespan)
    app.state.engine = engine

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _invalid_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def require_engine() -> QAEngine:
        if app.state.engine is None:
            raise HTTPException(status_code=503, detail="engine not initialized")
        return app.state.engine

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse(status="ok")

    @app.get("/readyz", response_model=HealthResponse)
    def readyz() -> HealthResponse:
        engine = require_engine()
        if not engine.ready():
            raise HTTPException(status_code=503, detail="components not reachable")
        return HealthResponse(status="ready")

    @app.get("/api/v1/models", response_model=list[str])
    def models() -> list[str]:
        return require_engine().models

    @app.post("/api/v1/ask", response_model=AskResponse)
    def ask(body: AskRequest) -> AskResponse:
        engine = require_engine()
        try:
            question = Question(text=body.question)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        try:
            queries, answers = engine.pipeline.run_question(
                question, QueryMode(body.query_mode)
            )
        except SearchFailed as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from exc
        except NoResults:
            return AskResponse(query_terms=[], results=[])
        top_k = body.top_k if body.top_k is not None else settings.top_k
        return AskResponse(
            query_terms=list(queries[0].terms),
            results=[
                _to_result(position, ra) for position, ra in enumerate(answers[:top_k])
            ],
        )

    return app


def _to_result(position: int, ra: RankedAnswer) -> AskResult:
    answer = None
    if not ra.answer.is_no_answer:
        answer = AnswerPayload(
            text=ra.answer.text, start=ra.answer.start_char, end=ra.answer.end_char
        )
    return AskResult(
        position=position,
        url=ra.hit.url,
        title=ra.hit.title,
        snippet=ra.hit.snippet,
        answer=answer,
        c=ra.answer.confidence,
        r=ra.hit.rank,
        q=ra.combined,
    )
