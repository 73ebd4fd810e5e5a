"""The request/response interception pipeline.

Fixed pipeline order for every query: build the access request with the
live environment, evaluate policy, sanitize the query pre-inference, account
the session's disclosure risk and enforce its threshold, call the upstream
model with sanitized text only, re-sanitize the output under the decision's
obligations, audit, respond. Every guard fails closed: a denial, terminated
session, unreachable detector, audit failure, or upstream failure means no
data egress. Exactly one interaction entry is appended per handled query and
one decision entry per policy evaluation, so ledger counts reconcile with
the gateway's own counters.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..engine import AccessRequest, Decision, evaluate
from ..ledger import AuditLedger, DecisionLogEntry, InteractionLogEntry, request_digest
from ..phi.gazetteer import GazetteerDetector
from ..phi.redact import RedactionMode, sanitize
from ..phi.remote import DetectorError, RemoteDetector
from ..phi.rules import DEFAULT_RULES, load_rules
from ..policy.documents import PolicyDocumentError, load_policy_file, serialize_policy_set
from ..policy.model import (
    TERMINATE_SESSION,
    AttributeBag,
    BagCategory,
    Effect,
    PolicySet,
    TimeOfDay,
)
from ..session import (
    DEFAULT_THRESHOLDS,
    RoleThresholdTable,
    SessionStatus,
    SessionStore,
    ThresholdAction,
    check_threshold,
    record_phi_access,
    revoke_consent,
)
from ..postinfer import PostInferenceRedactor
from .assertions import bag_from_plain, verify_assertion
from .config import GatewayConfig
from .upstream import EchoUpstream, HttpUpstream, UpstreamClient


class GatewayError(Exception):
    pass


class Denied(GatewayError):
    def __init__(self, decision: Decision):
        super().__init__(f"denied (matched: {decision.matched_policy})")
        self.decision = decision


class TerminatedSession(GatewayError):
    def __init__(self, reason: str, obligations=()):
        super().__init__(reason)
        self.reason = reason
        self.obligations = tuple(obligations)


class UnknownSession(GatewayError):
    pass


class PolicyUnavailable(GatewayError):
    pass


class PolicySnapshotProvider:
    """Reload the policy file on change; swaps snapshots atomically.

    In-flight requests keep the snapshot they grabbed; a failed reload
    keeps serving the last good snapshot and surfaces the error in health.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._mtime: float | None = None
        self._snapshot: PolicySet | None = None
        self._snapshot_id: str | None = None
        self.last_error: str | None = None
        self._reload()

    def _reload(self) -> None:
        try:
            mtime = self.path.stat().st_mtime
            policy_set = load_policy_file(self.path)
        except (OSError, PolicyDocumentError) as exc:
            self.last_error = str(exc)
            return
        text = serialize_policy_set(policy_set)
        self._snapshot = policy_set
        self._snapshot_id = hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
        self._mtime = mtime
        self.last_error = None

    def snapshot(self) -> tuple:
        try:
            mtime = self.path.stat().st_mtime
        except OSError:
            mtime = None
        if mtime != self._mtime:
            self._reload()
        if self._snapshot is None:
            raise PolicyUnavailable(self.last_error or f"cannot load {self.path}")
        return self._snapshot, self._snapshot_id


class StaticPolicyProvider:
    def __init__(self, policy_set: PolicySet, snapshot_id: str = "static"):
        self._snapshot = policy_set
        self._snapshot_id = snapshot_id
        self.last_error = None

    def snapshot(self) -> tuple:
        return self._snapshot, self._snapshot_id


@dataclass(frozen=True)
class QueryResult:
    response: str
    session_token: str
    decision_seq: int
    risk_score: int
    obligations: tuple


@dataclass
class GatewayStats:
    handled_queries: int = 0
    evaluations: int = 0
    denials: int = 0
    terminations: int = 0
    releases: int = 0
    detector_failures: int = 0
    revocations: int = 0


@dataclass(frozen=True)
class HealthReport:
    status: str  # healthy | degraded | unhealthy
    policy_snapshot: str | None
    policy_error: str | None
    detector_ok: bool
    upstream_ok: bool
    fail_mode: str = "closed"


class Gateway:
    def __init__(
        self,
        policy_provider,
        *,
        ledger: AuditLedger,
        upstream: UpstreamClient,
        detector=None,
        thresholds: RoleThresholdTable = DEFAULT_THRESHOLDS,
        rules=DEFAULT_RULES,
        secret: bytes = b"phigate-dev-secret",
        provider_name: str | None = None,
        provider_baa_valid: bool = False,
        min_confidence: float = 0.5,
        clock=None,
    ):
        self.policies = policy_provider
        self.ledger = ledger
        self.upstream = upstream
        self.detector = detector if detector is not None else GazetteerDetector()
        self.rules = rules
        self.secret = secret
        self.provider_name = provider_name
        self.provider_baa_valid = provider_baa_valid
        self.min_confidence = min_confidence
        self.clock = clock or (lambda: datetime.now(timezone.utc))
        self.sessions = SessionStore(thresholds)
        self.redactor = PostInferenceRedactor(ledger, detector=self.detector, rules=rules, min_confidence=min_confidence)
        self.stats = GatewayStats()

    @classmethod
    def from_config(cls, config: GatewayConfig, *, upstream: UpstreamClient | None = None, clock=None) -> "Gateway":
        thresholds = (
            RoleThresholdTable.load(config.thresholds_path) if config.thresholds_path else DEFAULT_THRESHOLDS
        )
        rules = load_rules(config.rules_path) if config.rules_path else DEFAULT_RULES
        detector = RemoteDetector(config.detector_url) if config.detector_url else GazetteerDetector()
        if upstream is None:
            upstream = HttpUpstream(config.upstream_url) if config.upstream_url else EchoUpstream()
        return cls(
            PolicySnapshotProvider(config.policy_path),
            ledger=AuditLedger(config.audit_dir),
            upstream=upstream,
            detector=detector,
            thresholds=thresholds,
            rules=rules,
            secret=config.secret,
            provider_name=config.provider,
            provider_baa_valid=config.provider_baa_valid(),
            min_confidence=config.min_confidence,
            clock=clock,
        )

    # -- helpers ------------------------------------------------------------

    def _now_ms(self) -> int:
        return time.time_ns() // 1_000_000

    def _environment(self, consent_status: str) -> AttributeBag:
        entries: dict = {
            "time": TimeOfDay.from_datetime(self.clock()),
            "consent_status": consent_status,
        }
        if self.provider_name is not None:
            entries["api_provider"] = self.provider_name
            entries["baa_valid"] = self.provider_baa_valid
        return AttributeBag(BagCategory.ENVIRONMENT, entries)

    def _log_interaction(
        self,
        session_id: str,
        sanitized_query: str,
        decision_seq: int | None,
        redactions=(),
    ) -> None:
        self.ledger.record_interaction(
            InteractionLogEntry(
                timestamp_ms=self._now_ms(),
                session_id=session_id,
                sanitized_query=sanitized_query,
                decision_seq=decision_seq,
                redactions=tuple(redactions),
                raw_output_ref=None,
                sanitized_output_ref=None,
            )
        )

    def _record_decision(self, request: AccessRequest, session_id: str, decision: Decision) -> int:
        entry = DecisionLogEntry(
            timestamp_ms=self._now_ms(),
            session_id=session_id,
            request_digest=request_digest(request),
            effect=decision.effect.value,
            matched_policy=decision.matched_policy,
            obligations=tuple(o.kind for o in decision.obligations),
        )
        return self.ledger.record_decision(entry).seq

    # -- operations -----------------------------------------------------------

    def open_session(self, assertion: str):
        subject_attrs = verify_assertion(assertion, self.secret)
        subject = bag_from_plain(BagCategory.SUBJECT, subject_attrs)
        return self.sessions.open(subject)

    def handle_query(
        self,
        *,
        assertion: str,
        resource: dict,
        action: str,
        query: str,
        session_token: str | None = None,
    ) -> QueryResult:
        subject_attrs = verify_assertion(assertion, self.secret)
        subject = bag_from_plain(BagCategory.SUBJECT, subject_attrs)
        if session_token is None:
            session_token = self.sessions.open(subject).session_id
        elif self.sessions.get(session_token) is None:
            raise UnknownSession(session_token)

        with self.sessions.locked(session_token) as session:
            self.stats.handled_queries += 1
            resource_attrs = bag_from_plain(BagCategory.RESOURCE, resource)
            environment = self._environment(session.consent_status.value)
            request = AccessRequest(subject, resource_attrs, action, environment)

            if not session.open:
                self._log_interaction(session_token, "", None, ("blocked:session-terminated",))
                raise TerminatedSession("session already terminated")

            policy_set, _snapshot_id = self.policies.snapshot()
            decision = evaluate(request, policy_set)
            self.stats.evaluations += 1
            decision_seq = self._record_decision(request, session_token, decision)

            if decision.effect is Effect.DENY:
                self.stats.denials += 1
                self._log_interaction(session_token, "", decision_seq, ("blocked:denied",))
                raise Denied(decision)

            if any(o.kind == TERMINATE_SESSION for o in decision.obligations):
                session.status = SessionStatus.TERMINATED
                session.phi_cache.clear()
                self.stats.terminations += 1
                self._log_interaction(session_token, "", decision_seq, ("blocked:terminate-obligation",))
                raise TerminatedSession("termination obligation enforced", decision.obligations)

            try:
                pre = sanitize(
                    query,
                    RedactionMode.PLACEHOLDERS,
                    detector=self.detector,
                    rules=self.rules,
                    min_confidence=self.min_confidence,
                )
            except DetectorError:
                self.stats.detector_failures += 1
                self._log_interaction(session_token, "", decision_seq, ("blocked:detector-unavailable",))
                raise

            if pre.originals:
                cache_key = f"query-{self.stats.handled_queries}"
                session.phi_cache[cache_key] = " ".join(pre.originals.values())

            record_phi_access(session, pre.spans)
            threshold_decision = check_threshold(session)
            if threshold_decision.action is ThresholdAction.TERMINATE:
                self.stats.terminations += 1
                self._log_interaction(
                    session_token, pre.redacted_text, decision_seq, ("blocked:risk-threshold",)
                )
                raise TerminatedSession(
                    f"risk score {session.risk_score} exceeds threshold {session.threshold}",
                    threshold_decision.obligations,
                )

            try:
                output = self.upstream.complete(pre.redacted_text)
            except Exception:
                self._log_interaction(session_token, pre.redacted_text, decision_seq, ("blocked:upstream-failure",))
                raise

            record = self.redactor.apply_obligations(
                output,
                decision.obligations,
                session_id=session_token,
                decision_seq=decision_seq,
                sanitized_query=pre.redacted_text,
            )
            self.stats.releases += 1
            return QueryResult(
                response=record.user_payload,
                session_token=session_token,
                decision_seq=decision_seq,
                risk_score=session.risk_score,
                obligations=tuple(o.kind for o in decision.obligations),
            )

    def revoke_consent_endpoint(self, session_token: str) -> dict:
        if self.sessions.get(session_token) is None:
            raise UnknownSession(session_token)
        with self.sessions.locked(session_token) as session:
            revoke_consent(session)
            self.stats.revocations += 1
            self._log_interaction(
                session_token,
                "",
                None,
                ("consent-revoked", TERMINATE_SESSION, "DELETE_CACHED_PHI"),
            )
            return {
                "session_token": session_token,
                "status": session.status.value,
                "consent_status": session.consent_status.value,
                "cached_phi": len(session.phi_cache),
            }

    def health(self) -> HealthReport:
        policy_snapshot = None
        policy_error = None
        try:
            _ps, policy_snapshot = self.policies.snapshot()
        except PolicyUnavailable as exc:
            policy_error = str(exc)
        detector_ok = True
        ping = getattr(self.detector, "ping", None)
        if callable(ping):
            detector_ok = bool(ping())
        upstream_ping = getattr(self.upstream, "ping", None)
        upstream_ok = bool(upstream_ping()) if callable(upstream_ping) else True
        if policy_error is not None:
            status = "unhealthy"
        elif not detector_ok:
            status = "degraded"  # detector down: queries fail closed
        else:
            status = "healthy"
        return HealthReport(
            status=status,
            policy_snapshot=policy_snapshot,
            policy_error=policy_error,
            detector_ok=detector_ok,
            upstream_ok=upstream_ok,
        )
