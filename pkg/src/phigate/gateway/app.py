"""HTTP surface over the gateway pipeline.

Endpoints: POST /v1/query, POST /v1/consent/revoke, GET /health,
GET /v1/audit/verify. Enforcement failures map to failure statuses with no
data in the body — the gateway fails closed.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ..ledger import StorageFailure
from ..phi.remote import DetectorError
from ..session import SessionError
from .assertions import InvalidAssertion
from .service import Denied, Gateway, PolicyUnavailable, TerminatedSession, UnknownSession
from .upstream import UpstreamFailure


class QueryBody(BaseModel):
    assertion: str
    resource: dict = Field(default_factory=dict)
    action: str = "read"
    query: str
    session_token: str | None = None


class RevokeBody(BaseModel):
    session_token: str


def create_app(gateway: Gateway) -> FastAPI:
    app = FastAPI(title="phigate", version="0.1.0")
    app.state.gateway = gateway

    @app.post("/v1/query")
    def query(body: QueryBody):
        try:
            result = gateway.handle_query(
                assertion=body.assertion,
                resource=body.resource,
                action=body.action,
                query=body.query,
                session_token=body.session_token,
            )
        except InvalidAssertion as exc:
            raise HTTPException(status_code=401, detail=str(exc))
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")
        except Denied as exc:
            raise HTTPException(
                status_code=403,
                detail={
                    "effect": "DENY",
                    "matched_policy": exc.decision.matched_policy,
                    "trace": [
                        {"policy": t.policy_id, "matched": t.matched, "detail": t.detail}
                        for t in exc.decision.trace
                    ],
                },
            )
        except TerminatedSession as exc:
            raise HTTPException(
                status_code=403,
                detail={"terminated": True, "reason": exc.reason, "obligations": list(exc.obligations)},
            )
        except (DetectorError, StorageFailure, UpstreamFailure, PolicyUnavailable) as exc:
            raise HTTPException(status_code=503, detail=f"fail-closed: {exc}")
        except (SessionError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "response": result.response,
            "session_token": result.session_token,
            "decision_seq": result.decision_seq,
            "risk_score": result.risk_score,
            "obligations": list(result.obligations),
        }

    @app.post("/v1/consent/revoke")
    def revoke(body: RevokeBody):
        try:
            return gateway.revoke_consent_endpoint(body.session_token)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.get("/health")
    def health():
        report = gateway.health()
        return {
            "status": report.status,
            "policy_snapshot": report.policy_snapshot,
            "policy_error": report.policy_error,
            "detector_ok": report.detector_ok,
            "upstream_ok": report.upstream_ok,
            "fail_mode": report.fail_mode,
        }

    @app.get("/v1/audit/verify")
    def audit_verify():
        results = gateway.ledger.verify()
        return {
            name: {
                "ok": v.ok,
                "tampered_at": v.tampered_at,
                "head_mismatch": v.head_mismatch,
                "message": v.message,
            }
            for name, v in results.items()
        }

    return app
