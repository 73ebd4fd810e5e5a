"""phigate: policy-enforcing compliance gateway for LLM workflows over health data.

Core pieces: an attribute-based policy engine with obligations, a hybrid PHI
sanitizer (pattern rules plus a pluggable contextual detector), per-session
disclosure-risk accounting with role thresholds and consent revocation,
tamper-evident dual audit chains, and an interception gateway that wires
them together in a fail-closed pipeline.
"""

from .engine import AccessRequest, BaaGate, Decision, TraceEntry, evaluate, match_attributes
from .ledger import (
    AuditLedger,
    ChainedEntry,
    ChainVerification,
    DecisionLogEntry,
    HashChain,
    InteractionLogEntry,
    StorageFailure,
)
from .oracle import oracle_evaluate
from .postinfer import DualPathRecord, PostInferenceRedactor, choose_mode
from .session import (
    DEFAULT_THRESHOLDS,
    ConsentStatus,
    MissingRole,
    RoleThresholdTable,
    SessionState,
    SessionStatus,
    SessionStore,
    SessionTerminated,
    ThresholdAction,
    check_threshold,
    open_session,
    record_phi_access,
    reevaluate_on_change,
    revoke_consent,
)

__version__ = "0.1.0"

__all__ = [
    "AccessRequest",
    "AuditLedger",
    "BaaGate",
    "ChainVerification",
    "ChainedEntry",
    "ConsentStatus",
    "DEFAULT_THRESHOLDS",
    "Decision",
    "DecisionLogEntry",
    "DualPathRecord",
    "HashChain",
    "InteractionLogEntry",
    "MissingRole",
    "PostInferenceRedactor",
    "RoleThresholdTable",
    "SessionState",
    "SessionStatus",
    "SessionStore",
    "SessionTerminated",
    "StorageFailure",
    "ThresholdAction",
    "TraceEntry",
    "check_threshold",
    "choose_mode",
    "evaluate",
    "match_attributes",
    "open_session",
    "oracle_evaluate",
    "record_phi_access",
    "reevaluate_on_change",
    "revoke_consent",
    "__version__",
]
