"""Secondary acceptance: protocol conformance plus the canonical example.

The final test drives the service through the gateway package's own
detector client, proving the two sides of the wire contract agree without
any shared code.
"""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from phigate_ner.backends import LexicalBackend
from phigate_ner.protocol import Span, span_violation
from phigate_ner.service import create_app

WORKED_EXAMPLE = "John Smith, 55, diagnosed with NSCLC in 2022"


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(LexicalBackend()))


def test_detects_patient_name_and_condition_in_worked_example(client):
    body = client.post("/detect", json={"id": "w1", "text": WORKED_EXAMPLE}).json()
    data = WORKED_EXAMPLE.encode()
    found = {(s["category"], data[s["start"] : s["end"]].decode()) for s in body["spans"]}
    assert ("PatientName", "John Smith") in found
    assert ("Condition", "NSCLC") in found


@given(st.text(max_size=150))
@settings(max_examples=100, deadline=None)
def test_protocol_vectors_offsets_categories_unicode(text):
    app_client = TestClient(create_app(LexicalBackend()))
    body = app_client.post("/detect", json={"id": "v", "text": text})
    assert body.status_code == 200
    payload = body.json()
    assert payload["id"] == "v"
    data = text.encode("utf-8")
    for item in payload["spans"]:
        span = Span(item["start"], item["end"], item["category"], item["confidence"])
        assert span_violation(span, data) is None


def test_gateway_client_interoperates():
    # The primary package's client consumes this service purely over HTTP;
    # the TestClient is just an in-process httpx client.
    phigate_remote = pytest.importorskip("phigate.phi.remote")

    http_client = TestClient(create_app(LexicalBackend()))
    detector = phigate_remote.RemoteDetector("http://testserver", client=http_client)
    spans = phigate_remote.detect_contextual(WORKED_EXAMPLE, detector)
    categories = {s.category.name for s in spans}
    assert {"PatientName", "Condition", "Age", "Year"} <= categories
