"""Pattern rules for structured identifiers.

The rule table targets identifier formats with rigid syntax; every match is
reported at confidence 1.0. Matches may overlap each other (a year inside a
date, for instance) — `merge.merge_spans` resolves overlaps downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .categories import (
    DATE,
    EMAIL,
    INSURANCE_ID,
    MRN,
    PHONE,
    SSN,
    YEAR,
    PhiCategory,
    PhiSpan,
    Source,
    byte_offsets,
    category,
)


@dataclass(frozen=True)
class PatternRule:
    category: PhiCategory
    pattern: str
    enabled: bool = True

    def compiled(self) -> re.Pattern:
        return re.compile(self.pattern)


DEFAULT_RULES: tuple = (
    PatternRule(SSN, r"\b\d{3}-\d{2}-\d{4}\b"),
    PatternRule(MRN, r"\bMRN-\d{8}\b"),
    PatternRule(MRN, r"\b[A-Z]\d{6}\b"),
    PatternRule(DATE, r"\b\d{1,2}/\d{1,2}/\d{4}\b"),
    PatternRule(DATE, r"\b\d{4}-\d{2}-\d{2}\b"),
    PatternRule(YEAR, r"\b(?:19|20)\d{2}\b"),
    PatternRule(PHONE, r"\(\d{3}\)\s?\d{3}-\d{4}|\b\d{3}-\d{3}-\d{4}\b"),
    PatternRule(EMAIL, r"\b[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}\b"),
    PatternRule(INSURANCE_ID, r"\b[A-Z]{3}\d{9}\b"),
)


def detect_pattern(text: str, rules=DEFAULT_RULES) -> list:
    """Every rule-table match as a pattern-source span (may overlap)."""
    if not text:
        return []
    offsets = byte_offsets(text)
    spans = []
    for rule in rules:
        if not rule.enabled:
            continue
        for match in rule.compiled().finditer(text):
            if match.start() == match.end():
                continue
            spans.append(
                PhiSpan(
                    start=offsets[match.start()],
                    end=offsets[match.end()],
                    category=rule.category,
                    source=Source.PATTERN,
                    confidence=1.0,
                )
            )
    spans.sort(key=lambda s: (s.start, s.end, s.category.name))
    return spans


def load_rules(path) -> tuple:
    """Read a rule table file: `category on|off pattern` per line, # comments."""
    rules = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 2)
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected 'category on|off pattern'")
            cat_name, flag, pattern = parts
            if flag not in ("on", "off"):
                raise ValueError(f"{path}:{line_no}: flag must be 'on' or 'off'")
            try:
                re.compile(pattern)
            except re.error as exc:
                raise ValueError(f"{path}:{line_no}: bad pattern: {exc}") from None
            rules.append(PatternRule(category(cat_name), pattern, enabled=flag == "on"))
    return tuple(rules)


def dump_rules(rules=DEFAULT_RULES) -> str:
    lines = ["# Pattern rule table: category  on|off  regex"]
    for rule in rules:
        lines.append(f"{rule.category.name}\t{'on' if rule.enabled else 'off'}\t{rule.pattern}")
    return "\n".join(lines) + "\n"


def shipped_rules() -> tuple:
    """Rules from the bundled config file (identical to DEFAULT_RULES)."""
    ref = resources.files("phigate.phi") / "data" / "rules.conf"
    with resources.as_file(ref) as path:
        return load_rules(path)
