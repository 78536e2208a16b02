"""HTTP API over the engine (versioned base path /v1).

Artifacts are loaded at startup and never mutated by a request; sessions are
the only mutable state and turns within one session are serialized.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..errors import InvalidInputError, SessionNotFoundError
from .engine import Engine


class ChatRequest(BaseModel):
    text: str
    session_id: str | None = None


class AnswerRequest(BaseModel):
    question: str


def create_app(engine: Engine | None) -> FastAPI:
    app = FastAPI(title="litmine", version="0.1.0")
    app.state.engine = engine

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def require_engine() -> Engine | JSONResponse:
        if app.state.engine is None:
            return JSONResponse(status_code=503, content={"detail": "artifacts not loaded"})
        return app.state.engine

    @app.get("/v1/health")
    def health():
        if app.state.engine is None:
            return JSONResponse(status_code=503, content={"status": "unavailable"})
        return {"status": "ok", "artifacts": app.state.engine.artifact_checksums()}

    @app.get("/v1/search")
    def search(
        q: str,
        k: int | None = None,
        bm25_threshold: float | None = None,
        cosine_threshold: float | None = None,
        strategy: str | None = None,
        w_bm25: float | None = None,
        w_cos: float | None = None,
    ):
        engine = require_engine()
        if isinstance(engine, JSONResponse):
            return engine
        if not q.strip():
            return JSONResponse(status_code=400, content={"detail": "empty query"})
        try:
            result = engine.search(
                q,
                top_k=k,
                bm25_threshold=bm25_threshold,
                cosine_threshold=cosine_threshold,
                strategy=strategy,
                w_bm25=w_bm25,
                w_cos=w_cos,
            )
        except InvalidInputError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        body = {
            "results": [c.to_dict() for c in result.candidates],
            "warnings": result.warnings,
        }
        if engine.config.debug:
            body["diagnostics"] = result.diagnostics
        return body

    @app.post("/v1/answer")
    def answer(req: AnswerRequest):
        engine = require_engine()
        if isinstance(engine, JSONResponse):
            return engine
        if not req.question.strip():
            return JSONResponse(status_code=400, content={"detail": "empty question"})
        response = engine.answer(req.question)
        return response.to_dict(include_diagnostics=engine.config.debug)

    @app.post("/v1/chat")
    def chat(req: ChatRequest):
        engine = require_engine()
        if isinstance(engine, JSONResponse):
            return engine
        if not req.text.strip():
            return JSONResponse(status_code=400, content={"detail": "empty text"})
        store = engine.sessions
        if req.session_id is None:
            session = store.create()
        else:
            try:
                session = store.get(req.session_id)
            except SessionNotFoundError:
                return JSONResponse(
                    status_code=404, content={"detail": f"unknown session {req.session_id}"}
                )
        with store.lock_for(session.session_id):
            response = engine.chat(session, req.text)
        body = response.to_dict(include_diagnostics=engine.config.debug)
        body["session_id"] = session.session_id
        return body

    if engine is not None and engine.config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=engine.config.static_dir, html=True), name="ui")

    return app
