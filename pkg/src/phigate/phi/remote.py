"""Contextual detector interface and its HTTP wire protocol client.

Wire protocol (also implemented by the model sidecar):

    POST /detect
    request  {"id": "<opaque>", "text": "<utf-8 text>"}
    response {"id": "<echoed>", "spans": [{"start": int, "end": int,
               "category": "<PhiCategory name>", "confidence": float}]}

Offsets are UTF-8 byte offsets into the request text. Responses that violate
the span invariants are protocol errors, never silently repaired: a detector
that cannot be trusted about offsets cannot be trusted about PHI.
"""

from __future__ import annotations

import uuid
from dataclasses import replace
from typing import Protocol

import httpx

from .categories import CATEGORIES, PhiSpan, Source, check_span


class DetectorError(Exception):
    """Base class for contextual detector failures."""


class DetectorUnavailable(DetectorError):
    """The detector cannot be reached; callers fail closed."""


class DetectorProtocolError(DetectorError):
    """The detector answered with something outside the wire contract."""


class DetectorInterface(Protocol):
    def detect(self, text: str) -> list: ...


class RemoteDetector:
    """Client for the POST /detect wire protocol."""

    def __init__(self, base_url: str, timeout: float = 5.0, client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def detect(self, text: str) -> list:
        request_id = uuid.uuid4().hex
        try:
            response = self._client.post(f"{self.base_url}/detect", json={"id": request_id, "text": text})
        except httpx.HTTPError as exc:
            raise DetectorUnavailable(f"detector at {self.base_url}: {exc}") from exc
        if response.status_code >= 500:
            raise DetectorUnavailable(f"detector at {self.base_url} answered {response.status_code}")
        if response.status_code != 200:
            raise DetectorProtocolError(f"detector answered {response.status_code}: {response.text[:200]}")
        try:
            body = response.json()
            if body["id"] != request_id:
                raise DetectorProtocolError("response id does not echo the request id")
            spans = []
            for item in body["spans"]:
                name = item["category"]
                if name not in CATEGORIES:
                    raise DetectorProtocolError(f"unknown PHI category {name!r}")
                spans.append(
                    PhiSpan(
                        start=int(item["start"]),
                        end=int(item["end"]),
                        category=CATEGORIES[name],
                        source=Source.CONTEXTUAL,
                        confidence=float(item["confidence"]),
                    )
                )
            return spans
        except DetectorProtocolError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DetectorProtocolError(f"malformed detector response: {exc}") from exc

    def ping(self) -> bool:
        try:
            return self._client.get(f"{self.base_url}/health").status_code == 200
        except httpx.HTTPError:
            return False


def detect_contextual(text: str, detector: DetectorInterface, min_confidence: float = 0.5) -> list:
    """Detector spans validated against `text` and tagged as contextual."""
    raw = detector.detect(text)
    data = text.encode("utf-8")
    spans = []
    for span in raw:
        problem = check_span(span, data)
        if problem is not None:
            raise DetectorProtocolError(problem)
        if span.confidence < min_confidence:
            continue
        if span.source is not Source.CONTEXTUAL:
            span = replace(span, source=Source.CONTEXTUAL)
        spans.append(span)
    spans.sort(key=lambda s: (s.start, s.end, s.category.name))
    return spans
