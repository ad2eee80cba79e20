"""HTTP front end implementing the scoring wire protocol.

``POST /score`` takes ``{"pairs": [{"a": ..., "b": ...}]}`` and returns
``{"probs": [...]}`` of the same length and order. ``GET /health`` reports
readiness and the loaded artifact digest; it serves 503 until the model is
loaded. Schema violations return 400.
"""

from __future__ import annotations

import logging
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .model import PairScorer

logger = logging.getLogger(__name__)


class PairIn(BaseModel):
    a: str
    b: str


class ScoreRequest(BaseModel):
    pairs: list[PairIn]


class ScoreResponse(BaseModel):
    probs: list[float]


def create_app(artifact_dir: str | Path | None = None, scorer: PairScorer | None = None) -> FastAPI:
    """Build the service; the model loads eagerly when a directory is given."""
    app = FastAPI(title="title-pair scorer")
    if scorer is None and artifact_dir is not None:
        scorer = PairScorer.load(artifact_dir)
        logger.info("loaded artifact %s (digest %s)", artifact_dir, scorer.digest)
    app.state.scorer = scorer

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/health")
    async def health():
        if app.state.scorer is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ready", "artifact_digest": app.state.scorer.digest}

    @app.post("/score", response_model=ScoreResponse)
    async def score(request: ScoreRequest):
        if app.state.scorer is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        probs = app.state.scorer.score([(p.a, p.b) for p in request.pairs])
        return {"probs": probs}

    return app


def serve(artifact_dir: str | Path, host: str = "127.0.0.1", port: int = 8400) -> None:
    import uvicorn

    uvicorn.run(create_app(artifact_dir), host=host, port=port)
