"""HTTP surface: request schemas, status-code mapping, endpoint wiring."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .config import ServiceConfig
from .model import EmptyTextError, MountedModel, OversizeError

DEFAULT_MAX_TOKENS = 512


class EncodePairRequest(BaseModel):
    text_a: str
    text_b: str
    max_tokens: int = Field(default=DEFAULT_MAX_TOKENS, ge=1)


class EncodeSingleRequest(BaseModel):
    text: str
    max_tokens: int = Field(default=DEFAULT_MAX_TOKENS, ge=1)


def create_app(
    config: Optional[ServiceConfig] = None,
    model: Optional[MountedModel] = None,
) -> FastAPI:
    """App with `model` mounted, loading it from `config` when not given.

    With neither argument the app starts without a model and every endpoint
    answers 503, which is also the behavior when loading fails at startup.
    """
    app = FastAPI(title="encoder-service")
    if model is None and config is not None:
        model = MountedModel(config)
    app.state.model = model

    def mounted() -> MountedModel:
        if app.state.model is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return app.state.model

    def run(fn, *args):
        try:
            return fn(*args)
        except EmptyTextError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except OversizeError as exc:
            raise HTTPException(status_code=413, detail=str(exc)) from exc

    @app.get("/v1/health")
    def health():
        m = mounted()
        return {"status": "ok", "model_id": m.model_id, "dim": m.dim}

    @app.post("/v1/encode-pair")
    def encode_pair(req: EncodePairRequest):
        m = mounted()
        return run(m.encode_pair, req.text_a, req.text_b, req.max_tokens)

    @app.post("/v1/encode-single")
    def encode_single(req: EncodeSingleRequest):
        m = mounted()
        return run(m.encode_single, req.text, req.max_tokens)

    return app
