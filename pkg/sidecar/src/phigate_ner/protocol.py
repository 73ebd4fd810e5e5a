"""Detector wire protocol: shared vocabulary and span validation.

The service answers POST /detect with spans whose offsets are UTF-8 byte
offsets into the request text. Every span must name a category from the
shared vocabulary, carry a confidence in [0, 1], and start/end on character
boundaries. These checks run on every response before it leaves the
process; a detector that emits invalid spans must fail loudly, not ship
them.
"""

from __future__ import annotations

from dataclasses import dataclass

CATEGORY_VOCABULARY = frozenset(
    {
        "PatientName",
        "Age",
        "DateOfBirth",
        "Date",
        "Year",
        "SSN",
        "MRN",
        "Phone",
        "Email",
        "Address",
        "InsuranceID",
        "Condition",
        "Medication",
        "ProviderName",
    }
)


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    category: str
    confidence: float

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "category": self.category,
            "confidence": self.confidence,
        }


def is_char_boundary(data: bytes, index: int) -> bool:
    if index == 0 or index == len(data):
        return True
    if index < 0 or index > len(data):
        return False
    return (data[index] & 0xC0) != 0x80


def span_violation(span: Span, data: bytes) -> str | None:
    """None if the span honors the wire contract against `data`."""
    if not 0 <= span.start < span.end <= len(data):
        return f"bad interval [{span.start}, {span.end}) for {len(data)} bytes"
    if not is_char_boundary(data, span.start) or not is_char_boundary(data, span.end):
        return f"interval [{span.start}, {span.end}) splits a multi-byte character"
    if span.category not in CATEGORY_VOCABULARY:
        return f"unknown category {span.category!r}"
    if not 0.0 <= span.confidence <= 1.0:
        return f"confidence {span.confidence} outside [0, 1]"
    return None


def byte_offsets(text: str) -> list[int]:
    """Byte offset of each character index; length len(text) + 1."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets
