"""HTTP surface: POST /detect and GET /health per the detector protocol."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .backends import DetectorBackend, ModelNotLoaded
from .protocol import Span, span_violation


class DetectBody(BaseModel):
    id: str
    text: str


def create_app(backend: DetectorBackend | None) -> FastAPI:
    app = FastAPI(title="phigate-ner-sidecar", version="0.1.0")
    app.state.backend = backend

    @app.post("/detect")
    def detect(body: DetectBody):
        if app.state.backend is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        try:
            spans = app.state.backend.detect(body.text)
        except ModelNotLoaded as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        data = body.text.encode("utf-8")
        checked: list[Span] = []
        for span in spans:
            problem = span_violation(span, data)
            if problem is not None:
                # A backend emitting invalid spans is a server defect; never
                # forward spans the client would have to distrust.
                raise HTTPException(status_code=500, detail=f"backend produced an invalid span: {problem}")
            checked.append(span)
        return {"id": body.id, "spans": [span.as_dict() for span in checked]}

    @app.get("/health")
    def health():
        if app.state.backend is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return {"status": "ok", "backend": type(app.state.backend).__name__}

    return app
