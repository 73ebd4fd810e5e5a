"""Redaction modes and the detect → merge → redact pipeline."""

from __future__ import annotations

import enum
import re

from .categories import (
    CONDITION,
    DEMOGRAPHIC_CATEGORIES,
    PhiSpan,
    SanitizationResult,
    Source,
    byte_offsets,
)
from .merge import merge_spans
from .remote import detect_contextual
from .rules import DEFAULT_RULES, detect_pattern


class OverlappingSpans(ValueError):
    """redact() requires a merged (sorted, disjoint) span list."""


class NotAnIcd10Code(ValueError):
    pass


class RedactionMode(enum.Enum):
    PLACEHOLDERS = "placeholders"
    REDACT_ALL = "redact-all"
    REDACT_DEMO = "redact-demo"
    MASK_CODES = "mask-codes"


REDACTED = "[REDACTED]"

# ICD-10-CM chapter letter ranges; compared lexicographically on the
# three-character category part.
_ICD10_CHAPTERS = (
    ("A00", "B99"),
    ("C00", "D49"),
    ("D50", "D89"),
    ("E00", "E89"),
    ("F01", "F99"),
    ("G00", "G99"),
    ("H00", "H59"),
    ("H60", "H95"),
    ("I00", "I99"),
    ("J00", "J99"),
    ("K00", "K95"),
    ("L00", "L99"),
    ("M00", "M99"),
    ("N00", "N99"),
    ("O00", "O9A"),
    ("P00", "P96"),
    ("Q00", "Q99"),
    ("R00", "R99"),
    ("S00", "T88"),
    ("V00", "Y99"),
    ("Z00", "Z99"),
    ("U00", "U85"),
)

_ICD10_RE = re.compile(r"^[A-Z]\d{2}(\.\d{1,4})?$")
# Token scanner skips codes inside an already-emitted chapter tag
# ("[ICD10:E00-E89]"), keeping mask-codes redaction idempotent.
_ICD10_TOKEN_RE = re.compile(r"(?<![:\-])\b[A-Z]\d{2}(?:\.\d{1,4})?\b(?!-)")


def classify_icd10(code: str) -> str:
    """Chapter tag like '[ICD10:E00-E89]' for a diagnosis code."""
    if not _ICD10_RE.match(code):
        raise NotAnIcd10Code(code)
    prefix = code[:3]
    for lo, hi in _ICD10_CHAPTERS:
        if lo <= prefix <= hi:
            return f"[ICD10:{lo}-{hi}]"
    raise NotAnIcd10Code(code)


def _check_disjoint(spans) -> None:
    previous_end = -1
    for span in spans:
        if span.start < previous_end:
            raise OverlappingSpans(f"span at {span.start} overlaps the previous one")
        previous_end = span.end


def redact(text: str, spans, mode: RedactionMode = RedactionMode.PLACEHOLDERS) -> SanitizationResult:
    """Apply one redaction mode over merged spans.

    PLACEHOLDERS substitutes each span's category placeholder; REDACT_ALL
    substitutes a uniform marker; REDACT_DEMO touches only demographic
    categories; MASK_CODES ignores the span list and replaces ICD-10 code
    tokens with their chapter tags.
    """
    spans = sorted(spans, key=lambda s: s.start)
    _check_disjoint(spans)
    data = text.encode("utf-8")

    if mode is RedactionMode.MASK_CODES:
        applied: list = []
        replacements: list = []
        offsets = byte_offsets(text)
        for match in _ICD10_TOKEN_RE.finditer(text):
            try:
                tag = classify_icd10(match.group(0))
            except NotAnIcd10Code:
                continue
            applied.append(
                PhiSpan(offsets[match.start()], offsets[match.end()], CONDITION, Source.PATTERN, 1.0)
            )
            replacements.append(tag)
    else:
        applied = []
        replacements = []
        for span in spans:
            if mode is RedactionMode.REDACT_DEMO and span.category.name not in DEMOGRAPHIC_CATEGORIES:
                continue
            applied.append(span)
            replacements.append(REDACTED if mode is RedactionMode.REDACT_ALL else span.category.placeholder)

    parts = []
    originals = {}
    cursor = 0
    for index, (span, replacement) in enumerate(zip(applied, replacements)):
        parts.append(data[cursor : span.start])
        parts.append(replacement.encode("utf-8"))
        originals[index] = data[span.start : span.end].decode("utf-8")
        cursor = span.end
    parts.append(data[cursor:])

    return SanitizationResult(
        redacted_text=b"".join(parts).decode("utf-8"),
        spans=tuple(applied),
        replacements=tuple(replacements),
        originals=originals,
    )


def detect_hybrid(text: str, detector=None, rules=DEFAULT_RULES, min_confidence: float = 0.5) -> list:
    """Merged union of pattern and contextual detections."""
    spans = detect_pattern(text, rules)
    if detector is not None:
        spans = spans + detect_contextual(text, detector, min_confidence)
    return merge_spans(spans)


def sanitize(
    text: str,
    mode: RedactionMode = RedactionMode.PLACEHOLDERS,
    detector=None,
    rules=DEFAULT_RULES,
    min_confidence: float = 0.5,
) -> SanitizationResult:
    """Full pipeline: hybrid detection, overlap resolution, redaction."""
    return redact(text, detect_hybrid(text, detector, rules, min_confidence), mode)
