"""Post-inference redaction: obligation-driven output sanitization.

Model outputs fan out on two paths: the sanitized payload goes to the user,
while both the raw and sanitized versions are archived by reference in the
audit ledger. The audit append completes before the user payload is
released; if archiving fails, nothing is released. Redaction obligations
combine strictest-first: REDACT_ALL over REDACT_DEMO over MASK_CODES, with
placeholder substitution as the default whenever sanitization is obligated
at all.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .ledger import AuditLedger, InteractionLogEntry
from .phi.redact import RedactionMode, sanitize
from .policy.model import (
    MASK_CODES,
    REDACT_ALL,
    REDACT_DEMO,
    SANITIZE_PHI,
)

_MODE_BY_OBLIGATION = (
    (REDACT_ALL, RedactionMode.REDACT_ALL),
    (REDACT_DEMO, RedactionMode.REDACT_DEMO),
    (MASK_CODES, RedactionMode.MASK_CODES),
)


def choose_mode(obligations) -> RedactionMode | None:
    """Redaction mode for an obligation set; None when nothing obligates it."""
    kinds = {o.kind for o in obligations}
    for kind, mode in _MODE_BY_OBLIGATION:
        if kind in kinds:
            return mode
    if SANITIZE_PHI in kinds:
        return RedactionMode.PLACEHOLDERS
    return None


@dataclass(frozen=True)
class DualPathRecord:
    user_payload: str
    raw_ref: str
    sanitized_ref: str
    obligations: tuple
    applied_spans: tuple
    interaction_seq: int


class PostInferenceRedactor:
    def __init__(self, ledger: AuditLedger, detector=None, rules=None, min_confidence: float = 0.5):
        self.ledger = ledger
        self.detector = detector
        self.rules = rules
        self.min_confidence = min_confidence

    def apply_obligations(
        self,
        output: str,
        obligations,
        *,
        session_id: str,
        decision_seq: int | None = None,
        sanitized_query: str = "",
    ) -> DualPathRecord:
        """Sanitize a model output per its obligations and archive both copies.

        Detector failures with a sanitize obligation present propagate before
        anything is stored or released (fail closed).
        """
        obligations = tuple(obligations)
        mode = choose_mode(obligations)
        if mode is None:
            user_payload = output
            applied = ()
            redactions: tuple = ()
        else:
            kwargs = {"detector": self.detector, "min_confidence": self.min_confidence}
            if self.rules is not None:
                kwargs["rules"] = self.rules
            result = sanitize(output, mode, **kwargs)
            user_payload = result.redacted_text
            applied = result.spans
            redactions = tuple(
                f"{span.category.name}@{span.start}-{span.end}->{replacement}"
                for span, replacement in zip(result.spans, result.replacements)
            )

        raw_ref = self.ledger.store_payload(output)
        sanitized_ref = self.ledger.store_payload(user_payload)
        chained = self.ledger.record_interaction(
            InteractionLogEntry(
                timestamp_ms=time.time_ns() // 1_000_000,
                session_id=session_id,
                sanitized_query=sanitized_query,
                decision_seq=decision_seq,
                redactions=redactions,
                raw_output_ref=raw_ref,
                sanitized_output_ref=sanitized_ref,
            )
        )
        return DualPathRecord(
            user_payload=user_payload,
            raw_ref=raw_ref,
            sanitized_ref=sanitized_ref,
            obligations=obligations,
            applied_spans=tuple(applied),
            interaction_seq=chained.seq,
        )
