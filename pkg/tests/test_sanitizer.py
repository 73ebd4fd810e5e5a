from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigate.phi import (
    CATEGORIES,
    DEFAULT_RULES,
    GazetteerDetector,
    NotAnIcd10Code,
    OverlappingSpans,
    PhiSpan,
    RedactionMode,
    Source,
    byte_offsets,
    category,
    check_span,
    classify_icd10,
    detect_contextual,
    detect_pattern,
    dump_rules,
    is_char_boundary,
    load_rules,
    merge_spans,
    reconstruct,
    redact,
    sanitize,
    shipped_rules,
)
from phigate.phi.remote import DetectorProtocolError

WORKED_EXAMPLE = "John Smith, 55, diagnosed with NSCLC in 2022"


def span(start, end, cat="SSN", source=Source.PATTERN, confidence=1.0):
    return PhiSpan(start, end, category(cat), source, confidence)


class TestDetectPattern:
    def test_ssn(self):
        spans = detect_pattern("SSN 123-45-6789")
        assert len(spans) == 1
        assert spans[0].category.name == "SSN"
        assert (spans[0].start, spans[0].end) == (4, 15)
        assert spans[0].confidence == 1.0

    def test_mrn_long_form(self):
        spans = detect_pattern("Medical Record Number: MRN-12345678")
        assert [s.category.name for s in spans] == ["MRN"]

    def test_mrn_short_form(self):
        assert [s.category.name for s in detect_pattern("Record A123456 on file")] == ["MRN"]

    def test_empty_input(self):
        assert detect_pattern("") == []

    def test_insurance_id(self):
        spans = detect_pattern("Insurance ID: ABC123456789")
        assert [s.category.name for s in spans] == ["InsuranceID"]

    def test_date_and_embedded_year_both_reported(self):
        spans = detect_pattern("Seen on 03/02/2025.")
        assert sorted(s.category.name for s in spans) == ["Date", "Year"]

    def test_unicode_offsets_are_bytes(self):
        text = "José café 123-45-6789"
        spans = detect_pattern(text)
        data = text.encode("utf-8")
        assert len(spans) == 1
        assert data[spans[0].start : spans[0].end].decode("utf-8") == "123-45-6789"


class TestGazetteer:
    def test_worked_example_spans(self, gazetteer):
        spans = detect_contextual(WORKED_EXAMPLE, gazetteer)
        found = {(s.category.name, WORKED_EXAMPLE.encode()[s.start : s.end].decode()) for s in spans}
        assert ("PatientName", "John Smith") in found
        assert ("Age", "55") in found
        assert ("Condition", "NSCLC") in found
        assert ("Year", "2022") in found

    def test_empty_input(self, gazetteer):
        assert detect_contextual("", gazetteer) == []

    def test_provider_name_not_double_tagged(self, gazetteer):
        spans = gazetteer.detect("Attending: Dr. Emily Carter")
        names = [s.category.name for s in spans]
        assert "ProviderName" in names and "PatientName" not in names

    def test_acronym_case_sensitivity(self, gazetteer):
        assert any(s.category.name == "Condition" for s in gazetteer.detect("history of COPD"))
        assert not any(s.category.name == "Condition" for s in gazetteer.detect("the copd variable"))

    def test_bad_detector_span_is_protocol_error(self):
        class BrokenDetector:
            def detect(self, text):
                return [span(0, len(text.encode()) + 10)]

        with pytest.raises(DetectorProtocolError):
            detect_contextual("short", BrokenDetector())

    def test_char_boundary_violation_is_protocol_error(self):
        class SplittingDetector:
            def detect(self, text):
                return [span(0, 1, "PatientName", Source.CONTEXTUAL, 0.9)]

        with pytest.raises(DetectorProtocolError):
            detect_contextual("émile", SplittingDetector())

    def test_confidence_threshold_filters(self, gazetteer):
        class FaintDetector:
            def detect(self, text):
                return [span(0, 4, "PatientName", Source.CONTEXTUAL, 0.3)]

        assert detect_contextual("Anna", FaintDetector(), min_confidence=0.5) == []
        assert len(detect_contextual("Anna", FaintDetector(), min_confidence=0.2)) == 1


def brute_force_merge(spans):
    """Byte-ownership oracle: each byte goes to the strongest covering span."""
    spans = sorted(
        set(spans),
        key=lambda s: (
            -s.confidence,
            -(s.end - s.start),
            0 if s.source is Source.PATTERN else 1,
            s.start,
            s.end,
            s.category.name,
        ),
    )
    if not spans:
        return []
    size = max(s.end for s in spans)
    owner = [None] * size
    for idx, s in enumerate(spans):
        for i in range(s.start, s.end):
            if owner[i] is None:
                owner[i] = idx
    out = []
    i = 0
    while i < size:
        if owner[i] is None:
            i += 1
            continue
        j = i
        while j < size and owner[j] == owner[i]:
            j += 1
        out.append(replace(spans[owner[i]], start=i, end=j))
        i = j
    return out


_SPANS = st.builds(
    lambda start, length, cat, pattern, conf: PhiSpan(
        start,
        start + length,
        category(cat),
        Source.PATTERN if pattern else Source.CONTEXTUAL,
        1.0 if pattern else conf,
    ),
    st.integers(0, 30),
    st.integers(1, 12),
    st.sampled_from(sorted(CATEGORIES)),
    st.booleans(),
    st.sampled_from([0.5, 0.6, 0.9, 0.95, 1.0]),
)


class TestMergeSpans:
    def test_disjoint_spans_pass_through(self):
        spans = [span(0, 4), span(10, 14, "MRN")]
        assert merge_spans(spans) == sorted(spans, key=lambda s: s.start)

    def test_pattern_beats_contextual_on_same_bytes(self):
        pattern = span(0, 11, "SSN")
        contextual = span(0, 11, "PatientName", Source.CONTEXTUAL, 0.9)
        assert merge_spans([contextual, pattern]) == [pattern]

    def test_overlap_truncates_loser(self):
        a = span(0, 10, "PatientName", Source.CONTEXTUAL, 0.95)
        b = span(5, 12, "PatientName", Source.CONTEXTUAL, 0.90)
        merged = merge_spans([a, b])
        assert merged == [a, replace(b, start=10, end=12)]

    def test_fully_covered_loser_dropped(self):
        a = span(0, 10, "Date")
        b = span(2, 6, "Year", Source.CONTEXTUAL, 0.99)
        assert merge_spans([a, b]) == [a]

    @given(st.lists(_SPANS, max_size=10))
    @settings(max_examples=300, deadline=None)
    def test_matches_brute_force_oracle(self, spans):
        assert merge_spans(spans) == brute_force_merge(spans)

    @given(st.lists(_SPANS, max_size=10))
    @settings(max_examples=150, deadline=None)
    def test_output_disjoint_and_covering(self, spans):
        merged = merge_spans(spans)
        for earlier, later in zip(merged, merged[1:]):
            assert earlier.end <= later.start
        covered = set()
        for s in merged:
            covered.update(range(s.start, s.end))
        wanted = set()
        for s in spans:
            wanted.update(range(s.start, s.end))
        assert covered == wanted  # truncation never un-covers bytes


class TestRedact:
    def test_worked_example_placeholders(self, gazetteer):
        result = sanitize(WORKED_EXAMPLE, detector=gazetteer)
        assert result.redacted_text == "[PatientName], [Age], diagnosed with [Condition] in [Year]"

    def test_worked_example_redact_all(self, gazetteer):
        result = sanitize(WORKED_EXAMPLE, RedactionMode.REDACT_ALL, detector=gazetteer)
        assert result.redacted_text == "[REDACTED], [REDACTED], diagnosed with [REDACTED] in [REDACTED]"

    def test_redact_demo_leaves_conditions(self, gazetteer):
        result = sanitize(WORKED_EXAMPLE, RedactionMode.REDACT_DEMO, detector=gazetteer)
        assert "[PatientName]" in result.redacted_text
        assert "NSCLC" in result.redacted_text

    def test_mask_codes(self):
        result = redact("Dx: E11.9", [], RedactionMode.MASK_CODES)
        assert result.redacted_text == "Dx: [ICD10:E00-E89]"

    def test_mask_codes_idempotent(self):
        once = redact("Dx: E11.9 and I50.3", [], RedactionMode.MASK_CODES).redacted_text
        twice = redact(once, [], RedactionMode.MASK_CODES).redacted_text
        assert once == twice

    def test_overlapping_spans_rejected(self):
        with pytest.raises(OverlappingSpans):
            redact("0123456789", [span(0, 5), span(3, 8, "MRN")])

    def test_originals_preserved_for_audit(self):
        result = redact("SSN 123-45-6789", detect_pattern("SSN 123-45-6789"))
        assert result.originals == {0: "123-45-6789"}

    def test_reconstruction_exact(self, gazetteer):
        result = sanitize(WORKED_EXAMPLE, detector=gazetteer)
        assert reconstruct(WORKED_EXAMPLE, result.spans, result.replacements) == result.redacted_text

    @given(st.text(alphabet="aé𝕏 b1-", max_size=40), st.data())
    @settings(max_examples=200, deadline=None)
    def test_reconstruction_fuzz(self, text, data):
        offsets = byte_offsets(text)
        spans = []
        if len(text) >= 2:
            picks = data.draw(
                st.lists(
                    st.tuples(st.integers(0, len(text) - 1), st.integers(1, 4)), max_size=3
                )
            )
            taken = -1
            for start_char, width in sorted(picks):
                end_char = min(start_char + width, len(text))
                if start_char <= taken or start_char >= end_char:
                    continue
                spans.append(span(offsets[start_char], offsets[end_char], "PatientName"))
                taken = end_char - 1
        for mode in (RedactionMode.PLACEHOLDERS, RedactionMode.REDACT_ALL):
            result = redact(text, spans, mode)
            assert reconstruct(text, result.spans, result.replacements) == result.redacted_text

    def test_placeholder_idempotence(self, gazetteer):
        first = sanitize(WORKED_EXAMPLE, detector=gazetteer)
        again = detect_pattern(first.redacted_text)
        assert again == []


class TestClassifyIcd10:
    @pytest.mark.parametrize(
        "code,tag",
        [
            ("E11.9", "[ICD10:E00-E89]"),
            ("A00", "[ICD10:A00-B99]"),
            ("I50.3", "[ICD10:I00-I99]"),
            ("Z99.89", "[ICD10:Z00-Z99]"),
            ("U07.1", "[ICD10:U00-U85]"),
            ("T88", "[ICD10:S00-T88]"),
        ],
    )
    def test_chapter_lookup(self, code, tag):
        assert classify_icd10(code) == tag

    @pytest.mark.parametrize("bad", ["ZZZ", "11A", "E1", "F00", ""])
    def test_rejects_non_codes(self, bad):
        with pytest.raises(NotAnIcd10Code):
            classify_icd10(bad)


class TestRuleTable:
    def test_shipped_file_matches_defaults(self):
        assert shipped_rules() == DEFAULT_RULES

    def test_load_round_trip(self, tmp_path):
        path = tmp_path / "rules.conf"
        path.write_text(dump_rules(DEFAULT_RULES), encoding="utf-8")
        assert load_rules(path) == DEFAULT_RULES

    def test_disabled_rules_skipped(self, tmp_path):
        path = tmp_path / "rules.conf"
        path.write_text("SSN\toff\t\\d{3}-\\d{2}-\\d{4}\n", encoding="utf-8")
        rules = load_rules(path)
        assert detect_pattern("123-45-6789", rules) == []

    def test_bad_pattern_rejected(self, tmp_path):
        path = tmp_path / "rules.conf"
        path.write_text("SSN\ton\t(((\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_rules(path)


class TestSpanInvariants:
    def test_pattern_confidence_enforced(self):
        with pytest.raises(ValueError):
            PhiSpan(0, 1, category("SSN"), Source.PATTERN, 0.9)

    def test_char_boundary_check(self):
        data = "é".encode("utf-8")
        assert is_char_boundary(data, 0) and is_char_boundary(data, 2)
        assert not is_char_boundary(data, 1)

    def test_check_span_end_bound(self):
        assert check_span(span(0, 99), b"short") is not None
