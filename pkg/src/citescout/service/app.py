"""HTTP surface for the session service.

Endpoints:
    POST /sessions                    create a session, run 0 starts async
    GET  /sessions/{id}               session handle
    GET  /sessions/{id}/turns?since=  turns with index >= since
    POST /sessions/{id}/decision      {decision, verdict, token}
    GET  /healthz

Error bodies are {"code", "message"}. An optional static bearer token
(CITESCOUT_SERVICE_TOKEN) guards every endpoint except /healthz.
"""
from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..errors import ServiceError
from .manager import SessionManager

TOKEN_ENV = "CITESCOUT_SERVICE_TOKEN"


class CreateSessionRequest(BaseModel):
    excerpt: str
    profile: str
    source_title: str | None = None
    source_paper_id: str | None = None
    item_id: str | None = None
    max_steps: int | None = None


class DecisionRequest(BaseModel):
    decision: str
    verdict: str | None = None
    token: str | None = None


def create_app(manager: SessionManager, auth_token: str | None = None) -> FastAPI:
    app = FastAPI(title="citescout session service")
    token = auth_token if auth_token is not None else os.environ.get(TOKEN_ENV)

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": str(exc)}
        )

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if token and request.url.path != "/healthz":
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {token}":
                return JSONResponse(
                    status_code=401,
                    content={"code": "unauthorized", "message": "bad bearer token"},
                )
        return await call_next(request)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        return manager.create_session(request.model_dump())

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return manager.get(session_id)

    @app.get("/sessions/{session_id}/turns")
    def get_turns(session_id: str, since: int = 0):
        return {"turns": manager.turns(session_id, since)}

    @app.post("/sessions/{session_id}/decision")
    def decide(session_id: str, request: DecisionRequest):
        return manager.decide(
            session_id,
            decision=request.decision,
            verdict=request.verdict,
            token=request.token,
        )

    return app
