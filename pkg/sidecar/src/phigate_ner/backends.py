"""Detection backends.

`TransformerBackend` wraps any token-classification checkpoint: raw
sub-token predictions are merged into word-level entities (BIO-aware),
model labels are translated to the shared category vocabulary through a
label-map file, and character offsets become UTF-8 byte offsets. Which
checkpoint to serve is deployment configuration, not code.

`LexicalBackend` is the dependency-free default: lexicon lookups and
narrow context rules over the same clinical vocabulary. It keeps the
service useful in environments without model weights and pins the floor
for protocol behavior.
"""

from __future__ import annotations

import json
import re
import statistics
from importlib import resources
from pathlib import Path
from typing import Protocol

from .protocol import CATEGORY_VOCABULARY, Span, byte_offsets


class ModelNotLoaded(Exception):
    """No usable backend: the service must answer 503, not guess."""


class DetectorBackend(Protocol):
    def detect(self, text: str) -> list: ...


# Reasonable translations for common clinical and general NER label sets;
# deployments override with --label-map.
DEFAULT_LABEL_MAP = {
    "PER": "PatientName",
    "PERSON": "PatientName",
    "PATIENT": "PatientName",
    "DOCTOR": "ProviderName",
    "HCW": "ProviderName",
    "HOSPITAL": "Address",
    "LOC": "Address",
    "LOCATION": "Address",
    "GPE": "Address",
    "AGE": "Age",
    "DATE": "Date",
    "PHONE": "Phone",
    "EMAIL": "Email",
    "ID": "MRN",
    "IDNUM": "MRN",
    "MEDICALRECORD": "MRN",
    "SSN": "SSN",
    "PROBLEM": "Condition",
    "DISEASE": "Condition",
    "DIAGNOSIS": "Condition",
    "CONDITION": "Condition",
    "TREATMENT": "Medication",
    "DRUG": "Medication",
    "MEDICATION": "Medication",
}


def load_label_map(path) -> dict:
    mapping = json.loads(Path(path).read_text(encoding="utf-8"))
    bad = sorted(set(mapping.values()) - CATEGORY_VOCABULARY)
    if bad:
        raise ValueError(f"label map targets outside the category vocabulary: {bad}")
    return {str(k).upper(): str(v) for k, v in mapping.items()}


def _strip_bio(label: str) -> str:
    if len(label) > 2 and label[1] == "-" and label[0] in "BIES":
        return label[2:]
    return label


class TransformerBackend:
    """Token-classification model behind the wire protocol.

    `pipeline` is any callable text -> list of token predictions shaped like
    the transformers token-classification pipeline output (entity/start/end/
    score per sub-token). Passing it explicitly keeps the merging and
    mapping logic testable without model weights.
    """

    def __init__(self, model_path: str | None = None, label_map: dict | None = None,
                 min_score: float = 0.5, pipeline=None):
        self.label_map = {k.upper(): v for k, v in (label_map or DEFAULT_LABEL_MAP).items()}
        bad = sorted(set(self.label_map.values()) - CATEGORY_VOCABULARY)
        if bad:
            raise ValueError(f"label map targets outside the category vocabulary: {bad}")
        self.min_score = min_score
        if pipeline is not None:
            self._pipeline = pipeline
        elif model_path is not None:
            self._pipeline = self._load_pipeline(model_path)
        else:
            raise ModelNotLoaded("no checkpoint configured")

    @staticmethod
    def _load_pipeline(model_path: str):
        try:
            from transformers import pipeline as hf_pipeline
        except ImportError as exc:
            raise ModelNotLoaded(f"transformers is not installed: {exc}") from exc
        try:
            return hf_pipeline("token-classification", model=model_path, tokenizer=model_path)
        except Exception as exc:
            raise ModelNotLoaded(f"cannot load checkpoint {model_path!r}: {exc}") from exc

    def detect(self, text: str) -> list:
        if not text:
            return []
        predictions = self._pipeline(text)
        offsets = byte_offsets(text)
        spans: list = []
        current = None  # [label, start_char, end_char, scores]
        for token in predictions:
            label = _strip_bio(str(token["entity"]))
            begins = str(token["entity"]).startswith(("B-", "S-"))
            start, end, score = int(token["start"]), int(token["end"]), float(token["score"])
            if current is not None and current[0] == label and not begins and start <= current[2] + 1:
                current[2] = max(current[2], end)
                current[3].append(score)
                continue
            if current is not None:
                spans.extend(self._emit(current, offsets, text))
            current = [label, start, end, [score]]
        if current is not None:
            spans.extend(self._emit(current, offsets, text))
        return spans

    def _emit(self, current, offsets, text) -> list:
        label, start, end, scores = current
        category = self.label_map.get(label.upper())
        if category is None:
            return []
        confidence = statistics.fmean(scores)
        if confidence < self.min_score:
            return []
        # Trim whitespace the tokenizer may have swallowed at the edges.
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start >= end:
            return []
        return [Span(offsets[start], offsets[end], category, min(confidence, 1.0))]


_WORD_RE = re.compile(r"[^\W\d_][\w'\-]*", re.UNICODE)
_PROVIDER_RE = re.compile(r"\b(?:Dr\.|Doctor)\s+[^\W\d_][\w'\-]*(?:\s+[^\W\d_][\w'\-]*)?")
_YEAR_RE = re.compile(r"(?<![/\d-])(?:19|20)\d{2}(?![/\d-])")
_AGE_RES = (
    re.compile(r"\b(\d{1,3})(?=[- ]year[- ]old\b)"),
    re.compile(r"\bAge\s*:?\s*(\d{1,3})\b"),
    re.compile(r"(?<=,\s)(\d{1,3})(?=\s*,)"),
)

_CONFIDENCE = {
    "PatientName": 0.93,
    "ProviderName": 0.94,
    "Condition": 0.95,
    "Medication": 0.92,
    "Age": 0.88,
    "Year": 0.97,
}


def _load_lexicon(filename: str) -> tuple:
    ref = resources.files("phigate_ner") / "data" / filename
    terms = []
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.append(line)
    return tuple(terms)


def _is_acronym(term: str) -> bool:
    return len(term) <= 6 and (term.isupper() or any(c.isupper() for c in term[1:]))


def _term_regexes(terms) -> tuple:
    exact = sorted({t for t in terms if _is_acronym(t)}, key=len, reverse=True)
    loose = sorted({t for t in terms if not _is_acronym(t)}, key=len, reverse=True)
    exact_re = re.compile(r"\b(?:" + "|".join(map(re.escape, exact)) + r")\b") if exact else None
    loose_re = (
        re.compile(r"\b(?:" + "|".join(map(re.escape, loose)) + r")\b", re.IGNORECASE) if loose else None
    )
    return exact_re, loose_re


class LexicalBackend:
    """Deterministic lexicon-and-context tagger; no model weights needed."""

    def __init__(self):
        self.first_names = frozenset(_load_lexicon("first_names.txt"))
        self.last_names = frozenset(_load_lexicon("last_names.txt"))
        self._condition_res = _term_regexes(_load_lexicon("conditions.txt"))
        self._medication_res = _term_regexes(_load_lexicon("medications.txt"))

    def detect(self, text: str) -> list:
        if not text:
            return []
        offsets = byte_offsets(text)
        spans: list = []

        def add(start: int, end: int, category: str) -> None:
            spans.append(Span(offsets[start], offsets[end], category, _CONFIDENCE[category]))

        provider_intervals = []
        for match in _PROVIDER_RE.finditer(text):
            add(match.start(), match.end(), "ProviderName")
            provider_intervals.append((match.start(), match.end()))

        words = list(_WORD_RE.finditer(text))
        for first, second in zip(words, words[1:]):
            if text[first.end() : second.start()] != " ":
                continue
            if first.group(0) in self.first_names and second.group(0) in self.last_names:
                inside = any(a <= first.start() and second.end() <= b for a, b in provider_intervals)
                if not inside:
                    add(first.start(), second.end(), "PatientName")

        for regexes, category in ((self._condition_res, "Condition"), (self._medication_res, "Medication")):
            for regex in regexes:
                if regex is None:
                    continue
                for match in regex.finditer(text):
                    add(match.start(), match.end(), category)

        for age_re in _AGE_RES:
            for match in age_re.finditer(text):
                if int(match.group(1)) <= 130:
                    add(match.start(1), match.end(1), "Age")

        for match in _YEAR_RE.finditer(text):
            add(match.start(), match.end(), "Year")

        spans.sort(key=lambda s: (s.start, s.end, s.category))
        return spans
