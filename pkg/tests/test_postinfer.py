from __future__ import annotations

import pytest

from phigate.ledger import AuditLedger, StorageFailure
from phigate.phi import RedactionMode, detect_pattern
from phigate.phi.remote import DetectorUnavailable
from phigate.policy import Obligation
from phigate.postinfer import PostInferenceRedactor, choose_mode

STRUCTURED_NOTE = (
    "Patient Name: Barry Berkman\n"
    "Medical Record Number: MRN-12345678\n"
    "Diagnosis: Type 2 Diabetes\n"
    "Medication: Metformin 500mg twice daily\n"
    "Insurance ID: ABC123456789\n"
)


def obligations(*kinds):
    return tuple(Obligation(k) for k in kinds)


class TestChooseMode:
    def test_precedence_strictest_first(self):
        assert choose_mode(obligations("MASK_CODES", "REDACT_ALL")) is RedactionMode.REDACT_ALL
        assert choose_mode(obligations("MASK_CODES", "REDACT_DEMO")) is RedactionMode.REDACT_DEMO
        assert choose_mode(obligations("MASK_CODES")) is RedactionMode.MASK_CODES

    def test_sanitize_phi_defaults_to_placeholders(self):
        assert choose_mode(obligations("log_access", "sanitize_phi")) is RedactionMode.PLACEHOLDERS

    def test_no_sanitize_obligation(self):
        assert choose_mode(obligations("log_access")) is None
        assert choose_mode(()) is None


@pytest.fixture()
def redactor(tmp_path, gazetteer):
    ledger = AuditLedger(tmp_path)
    return PostInferenceRedactor(ledger, detector=gazetteer), ledger


class TestApplyObligations:
    def test_sanitize_phi_substitutes_placeholders(self, redactor):
        post, ledger = redactor
        record = post.apply_obligations(STRUCTURED_NOTE, obligations("sanitize_phi"), session_id="s1")
        assert "Barry Berkman" not in record.user_payload
        assert "MRN-12345678" not in record.user_payload
        assert "[PatientName]" in record.user_payload
        assert "[MRN]" in record.user_payload
        assert ledger.load_payload(record.raw_ref) == STRUCTURED_NOTE
        assert ledger.load_payload(record.sanitized_ref) == record.user_payload

    def test_redact_all_uniform_marker(self, redactor):
        post, _ledger = redactor
        record = post.apply_obligations(STRUCTURED_NOTE, obligations("REDACT_ALL"), session_id="s1")
        assert "[REDACTED]" in record.user_payload
        assert "[PatientName]" not in record.user_payload

    def test_no_obligations_passes_through_but_audits(self, redactor):
        post, ledger = redactor
        record = post.apply_obligations(STRUCTURED_NOTE, (), session_id="s1")
        assert record.user_payload == STRUCTURED_NOTE
        entries = ledger.query(session_id="s1")
        assert len(entries) == 1
        assert entries[0][2].raw_output_ref == record.raw_ref

    def test_residual_pattern_zero_after_sanitize(self, redactor):
        post, _ledger = redactor
        for kinds in (("sanitize_phi",), ("REDACT_ALL",)):
            record = post.apply_obligations(STRUCTURED_NOTE, obligations(*kinds), session_id="s1")
            assert detect_pattern(record.user_payload) == []

    def test_audit_failure_blocks_release(self, tmp_path, gazetteer):
        ledger = AuditLedger(tmp_path)

        def exploding(entry):
            raise StorageFailure("chain write failed")

        ledger.record_interaction = exploding
        post = PostInferenceRedactor(ledger, detector=gazetteer)
        with pytest.raises(StorageFailure):
            post.apply_obligations(STRUCTURED_NOTE, obligations("sanitize_phi"), session_id="s1")

    def test_detector_failure_fails_closed(self, tmp_path):
        class DownDetector:
            def detect(self, text):
                raise DetectorUnavailable("no route to detector")

        ledger = AuditLedger(tmp_path)
        post = PostInferenceRedactor(ledger, detector=DownDetector())
        with pytest.raises(DetectorUnavailable):
            post.apply_obligations(STRUCTURED_NOTE, obligations("sanitize_phi"), session_id="s1")
        # nothing was archived and nothing released
        assert ledger.query(session_id="s1") == []

    def test_interaction_entry_links_decision(self, redactor):
        post, ledger = redactor
        record = post.apply_obligations(
            STRUCTURED_NOTE,
            obligations("sanitize_phi"),
            session_id="s9",
            decision_seq=17,
            sanitized_query="[PatientName] latest labs",
        )
        entry = ledger.query(session_id="s9")[0][2]
        assert entry.decision_seq == 17
        assert entry.sanitized_query == "[PatientName] latest labs"
        assert len(entry.redactions) == len(record.applied_spans)
