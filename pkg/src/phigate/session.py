"""Per-session state: disclosure risk accounting, thresholds, consent.

The risk score is (sum of sensitivities of every PHI element exposed so far)
multiplied by (number of request-level PHI access events). A request that
exposes no PHI does not count as an access event. Risk never resets within a
session; crossing the role threshold terminates the session and clears any
cached PHI before anything else is released.

All mutating operations on one session must run under that session's lock —
`SessionStore.locked` provides it. Different sessions proceed in parallel.
"""

from __future__ import annotations

import enum
import threading
import uuid
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .engine import AccessRequest, Decision, evaluate
from .policy.model import (
    DELETE_CACHED_PHI,
    TERMINATE_SESSION,
    AttributeBag,
    BagCategory,
    Obligation,
    PolicySet,
    TimeOfDay,
)


class SessionError(Exception):
    pass


class MissingRole(SessionError):
    """The subject carries no role attribute."""


class SessionTerminated(SessionError):
    """Operation attempted on a terminated session."""


class ConsentStatus(enum.Enum):
    ACTIVE = "active"
    REVOKED = "revoked"


class SessionStatus(enum.Enum):
    OPEN = "open"
    TERMINATED = "terminated"


class ThresholdAction(enum.Enum):
    CONTINUE = "continue"
    TERMINATE = "terminate"


TERMINATION_OBLIGATIONS = (Obligation(TERMINATE_SESSION), Obligation(DELETE_CACHED_PHI))


@dataclass(frozen=True)
class RoleThresholdTable:
    roles: Mapping[str, int]
    default: int = 10

    def threshold_for(self, role: str) -> int:
        return self.roles.get(role, self.default)

    @classmethod
    def load(cls, path) -> "RoleThresholdTable":
        """Read `role = threshold` lines; the `default` key sets the fallback."""
        roles: dict = {}
        default = 10
        with open(path, encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep or not value.strip().lstrip("-").isdigit():
                    raise ValueError(f"{path}:{line_no}: expected 'role = integer'")
                key = key.strip()
                threshold = int(value.strip())
                if threshold <= 0:
                    raise ValueError(f"{path}:{line_no}: thresholds must be positive")
                if key == "default":
                    default = threshold
                else:
                    roles[key] = threshold
        return cls(roles, default)


DEFAULT_THRESHOLDS = RoleThresholdTable({"cardiologist": 20, "billing clerk": 10}, default=10)


@dataclass
class SessionState:
    session_id: str
    user_role: str
    threshold: int
    consent_status: ConsentStatus = ConsentStatus.ACTIVE
    phi_access_count: int = 0
    accessed_sensitivities: list = field(default_factory=list)
    risk_score: int = 0
    status: SessionStatus = SessionStatus.OPEN
    phi_cache: dict = field(default_factory=dict)

    @property
    def open(self) -> bool:
        return self.status is SessionStatus.OPEN


def open_session(subject: AttributeBag, thresholds: RoleThresholdTable = DEFAULT_THRESHOLDS) -> SessionState:
    role = subject.get("role")
    if not isinstance(role, str) or not role:
        raise MissingRole("subject carries no role attribute")
    return SessionState(
        session_id=uuid.uuid4().hex,
        user_role=role,
        threshold=thresholds.threshold_for(role),
    )


def record_phi_access(state: SessionState, spans) -> SessionState:
    """Count one access event and fold in the sensitivity of each span."""
    if not state.open:
        raise SessionTerminated(state.session_id)
    spans = list(spans)
    if not spans:
        return state
    state.phi_access_count += 1
    state.accessed_sensitivities.extend(span.category.sensitivity for span in spans)
    state.risk_score = sum(state.accessed_sensitivities) * state.phi_access_count
    return state


@dataclass(frozen=True)
class ThresholdDecision:
    action: ThresholdAction
    obligations: tuple = ()


def check_threshold(state: SessionState) -> ThresholdDecision:
    """Terminate strictly above the role threshold, clearing cached PHI."""
    if state.risk_score > state.threshold:
        state.status = SessionStatus.TERMINATED
        state.phi_cache.clear()
        return ThresholdDecision(ThresholdAction.TERMINATE, TERMINATION_OBLIGATIONS)
    return ThresholdDecision(ThresholdAction.CONTINUE)


def revoke_consent(state: SessionState) -> SessionState:
    """Idempotent: revoked consent terminates the session and empties the cache."""
    state.consent_status = ConsentStatus.REVOKED
    state.status = SessionStatus.TERMINATED
    state.phi_cache.clear()
    return state


def reevaluate_on_change(
    state: SessionState,
    request: AccessRequest,
    policy_set: PolicySet,
    now: TimeOfDay | None = None,
) -> Decision:
    """Re-run policy evaluation with the current session attributes.

    The request's environment is rebuilt with consent status and counters;
    `now` overrides the clock attribute when given, otherwise the request's
    own time (if any) is kept so unchanged inputs reproduce the decision.
    """
    entries = dict(request.environment.entries)
    entries["consent_status"] = state.consent_status.value
    entries["phi_access_count"] = state.phi_access_count
    entries["risk_score"] = state.risk_score
    if now is not None:
        entries["time"] = now
    refreshed = AccessRequest(
        subject=request.subject,
        resource=request.resource,
        action=request.action,
        environment=AttributeBag(BagCategory.ENVIRONMENT, entries),
    )
    return evaluate(refreshed, policy_set)


class SessionStore:
    """In-memory session registry with single-writer-per-session locking."""

    def __init__(self, thresholds: RoleThresholdTable = DEFAULT_THRESHOLDS):
        self.thresholds = thresholds
        self._sessions: dict = {}
        self._locks: dict = {}
        self._registry_lock = threading.Lock()

    def open(self, subject: AttributeBag) -> SessionState:
        state = open_session(subject, self.thresholds)
        with self._registry_lock:
            self._sessions[state.session_id] = state
            self._locks[state.session_id] = threading.Lock()
        return state

    def get(self, session_id: str) -> SessionState | None:
        with self._registry_lock:
            return self._sessions.get(session_id)

    @contextmanager
    def locked(self, session_id: str) -> Iterator[SessionState]:
        with self._registry_lock:
            lock = self._locks.get(session_id)
            state = self._sessions.get(session_id)
        if lock is None or state is None:
            raise SessionError(f"unknown session {session_id!r}")
        with lock:
            yield state
