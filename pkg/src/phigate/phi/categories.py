"""PHI categories, detected spans, and sanitization results.

Span offsets are byte offsets into the UTF-8 encoding of the scanned text.
That makes the detector wire contract unambiguous across languages; helpers
here convert regex character offsets and check character-boundary safety.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping


class Source(enum.Enum):
    PATTERN = "pattern"
    CONTEXTUAL = "contextual"


@dataclass(frozen=True)
class PhiCategory:
    name: str
    sensitivity: int  # 1 = low, 5 = high
    placeholder: str

    def __post_init__(self) -> None:
        if not 1 <= self.sensitivity <= 5:
            raise ValueError(f"sensitivity must be in [1,5], got {self.sensitivity}")
        if not (self.placeholder.startswith("[") and self.placeholder.endswith("]")):
            raise ValueError(f"placeholder must be bracketed, got {self.placeholder!r}")


def _cat(name: str, sensitivity: int) -> PhiCategory:
    return PhiCategory(name, sensitivity, f"[{name}]")


PATIENT_NAME = _cat("PatientName", 4)
AGE = _cat("Age", 2)
DATE_OF_BIRTH = _cat("DateOfBirth", 4)
DATE = _cat("Date", 2)
YEAR = _cat("Year", 1)
SSN = _cat("SSN", 5)
MRN = _cat("MRN", 5)
PHONE = _cat("Phone", 3)
EMAIL = _cat("Email", 3)
ADDRESS = _cat("Address", 3)
INSURANCE_ID = _cat("InsuranceID", 4)
CONDITION = _cat("Condition", 3)
MEDICATION = _cat("Medication", 2)
PROVIDER_NAME = _cat("ProviderName", 2)

CATEGORIES: dict = {
    c.name: c
    for c in (
        PATIENT_NAME,
        AGE,
        DATE_OF_BIRTH,
        DATE,
        YEAR,
        SSN,
        MRN,
        PHONE,
        EMAIL,
        ADDRESS,
        INSURANCE_ID,
        CONDITION,
        MEDICATION,
        PROVIDER_NAME,
    )
}

# Categories affected by demographic-only redaction.
DEMOGRAPHIC_CATEGORIES = frozenset(
    {PATIENT_NAME.name, AGE.name, DATE_OF_BIRTH.name, DATE.name, ADDRESS.name, PHONE.name, EMAIL.name}
)


def category(name: str) -> PhiCategory:
    try:
        return CATEGORIES[name]
    except KeyError:
        raise ValueError(f"unknown PHI category {name!r}") from None


@dataclass(frozen=True)
class PhiSpan:
    """A detected PHI interval: [start, end) in UTF-8 byte offsets."""

    start: int
    end: int
    category: PhiCategory
    source: Source
    confidence: float

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad span interval [{self.start}, {self.end})")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of [0,1]: {self.confidence}")
        if self.source is Source.PATTERN and self.confidence != 1.0:
            raise ValueError("pattern spans carry confidence 1.0")

    @property
    def length(self) -> int:
        return self.end - self.start


def is_char_boundary(data: bytes, index: int) -> bool:
    if index == 0 or index == len(data):
        return True
    if index < 0 or index > len(data):
        return False
    return (data[index] & 0xC0) != 0x80


def check_span(span: PhiSpan, data: bytes) -> str | None:
    """None when the span is valid for `data`; otherwise a reason."""
    if span.end > len(data):
        return f"span end {span.end} beyond text length {len(data)}"
    if not is_char_boundary(data, span.start) or not is_char_boundary(data, span.end):
        return f"span [{span.start}, {span.end}) splits a multi-byte character"
    return None


def byte_offsets(text: str) -> list[int]:
    """Prefix map: byte offset of each character index (length len(text)+1)."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


@dataclass(frozen=True)
class SanitizationResult:
    """Redacted text plus the applied spans (offsets into the original).

    Splicing `replacements[i]` over `spans[i]` in the original text
    reproduces `redacted_text` byte for byte. `originals` retains the
    replaced substrings for audit-side raw storage only; it must never
    travel with the user-facing payload.
    """

    redacted_text: str
    spans: tuple
    replacements: tuple
    originals: Mapping[int, str]

    def __post_init__(self) -> None:
        if len(self.spans) != len(self.replacements):
            raise ValueError("spans and replacements must be parallel")
        previous_end = -1
        for span in self.spans:
            if span.start < previous_end:
                raise ValueError("result spans must be sorted and disjoint")
            previous_end = span.end


def reconstruct(original: str, spans, replacements) -> str:
    """Re-apply replacements over the original text (invariant check)."""
    data = original.encode("utf-8")
    parts = []
    cursor = 0
    for span, replacement in zip(spans, replacements):
        parts.append(data[cursor : span.start])
        parts.append(replacement.encode("utf-8"))
        cursor = span.end
    parts.append(data[cursor:])
    return b"".join(parts).decode("utf-8")
