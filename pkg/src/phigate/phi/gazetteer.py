"""Deterministic dictionary detector for contextual PHI.

Stands in for the model-backed sidecar so the full pipeline runs with no
external service: lexicon lookups for names, conditions and medications plus
narrow context rules for ages, years, provider names and street addresses.
Detection is pure and stable for a fixed lexicon set.
"""

from __future__ import annotations

import re
from importlib import resources

from .categories import (
    ADDRESS,
    AGE,
    CONDITION,
    MEDICATION,
    PATIENT_NAME,
    PROVIDER_NAME,
    YEAR,
    PhiSpan,
    Source,
    byte_offsets,
)

_WORD_RE = re.compile(r"[^\W\d_][\w'\-]*", re.UNICODE)
_PROVIDER_RE = re.compile(r"\b(?:Dr\.|Doctor)\s+[^\W\d_][\w'\-]*(?:\s+[^\W\d_][\w'\-]*)?")
# Years embedded in full dates (03/02/2025, 2025-03-02) are the date's
# business, not a standalone year mention.
_YEAR_RE = re.compile(r"(?<![/\d-])(?:19|20)\d{2}(?![/\d-])")
_ADDRESS_RE = re.compile(
    r"\b\d{1,5}\s+[A-Z][a-z]+\s+(?:Street|St|Avenue|Ave|Road|Rd|Lane|Ln|Drive|Boulevard|Blvd|Court|Ct|Way)\b\.?"
)
_AGE_RES = (
    re.compile(r"\b(\d{1,3})(?=[- ]year[- ]old\b)"),
    re.compile(r"\bAge\s*:?\s*(\d{1,3})\b"),
    re.compile(r"(?<=,\s)(\d{1,3})(?=\s*,)"),
)

_CONFIDENCE = {
    PATIENT_NAME.name: 0.95,
    PROVIDER_NAME.name: 0.96,
    CONDITION.name: 0.97,
    MEDICATION.name: 0.94,
    AGE.name: 0.90,
    YEAR.name: 0.99,
    ADDRESS.name: 0.90,
}


def _load_lexicon(filename: str) -> tuple:
    ref = resources.files("phigate.phi") / "data" / filename
    terms = []
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.append(line)
    return tuple(terms)


def _is_acronym(term: str) -> bool:
    # Short terms that are upper-case or mixed-case like "AFib" must match
    # case-sensitively; "copd" as a word fragment is not a diagnosis.
    return len(term) <= 6 and (term.isupper() or any(c.isupper() for c in term[1:]))


def _term_regexes(terms) -> tuple:
    """(case-sensitive regex, case-insensitive regex) over a term list."""
    exact = sorted({t for t in terms if _is_acronym(t)}, key=len, reverse=True)
    loose = sorted({t for t in terms if not _is_acronym(t)}, key=len, reverse=True)
    exact_re = re.compile(r"\b(?:" + "|".join(map(re.escape, exact)) + r")\b") if exact else None
    loose_re = (
        re.compile(r"\b(?:" + "|".join(map(re.escape, loose)) + r")\b", re.IGNORECASE) if loose else None
    )
    return exact_re, loose_re


class GazetteerDetector:
    """Lexicon and context based detector; implements `detect(text)`."""

    def __init__(self, first_names=None, last_names=None, conditions=None, medications=None):
        self.first_names = frozenset(first_names or _load_lexicon("first_names.txt"))
        self.last_names = frozenset(last_names or _load_lexicon("last_names.txt"))
        self._condition_res = _term_regexes(conditions or _load_lexicon("conditions.txt"))
        self._medication_res = _term_regexes(medications or _load_lexicon("medications.txt"))

    def detect(self, text: str) -> list:
        if not text:
            return []
        offsets = byte_offsets(text)
        spans = []

        def add(start: int, end: int, cat) -> None:
            spans.append(
                PhiSpan(
                    start=offsets[start],
                    end=offsets[end],
                    category=cat,
                    source=Source.CONTEXTUAL,
                    confidence=_CONFIDENCE[cat.name],
                )
            )

        provider_intervals = []
        for match in _PROVIDER_RE.finditer(text):
            add(match.start(), match.end(), PROVIDER_NAME)
            provider_intervals.append((match.start(), match.end()))

        words = list(_WORD_RE.finditer(text))
        for first, second in zip(words, words[1:]):
            if text[first.end() : second.start()] != " ":
                continue
            if first.group(0) in self.first_names and second.group(0) in self.last_names:
                inside_provider = any(a <= first.start() and second.end() <= b for a, b in provider_intervals)
                if not inside_provider:
                    add(first.start(), second.end(), PATIENT_NAME)

        for regexes, cat in ((self._condition_res, CONDITION), (self._medication_res, MEDICATION)):
            for regex in regexes:
                if regex is None:
                    continue
                for match in regex.finditer(text):
                    add(match.start(), match.end(), cat)

        for age_re in _AGE_RES:
            for match in age_re.finditer(text):
                if int(match.group(1)) <= 130:
                    add(match.start(1), match.end(1), AGE)

        for match in _YEAR_RE.finditer(text):
            add(match.start(), match.end(), YEAR)

        for match in _ADDRESS_RE.finditer(text):
            add(match.start(), match.end(), ADDRESS)

        spans.sort(key=lambda s: (s.start, s.end, s.category.name))
        return spans
