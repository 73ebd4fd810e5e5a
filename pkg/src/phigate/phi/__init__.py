"""PHI detection, span merging, and redaction."""

from .categories import (
    CATEGORIES,
    DEMOGRAPHIC_CATEGORIES,
    PhiCategory,
    PhiSpan,
    SanitizationResult,
    Source,
    byte_offsets,
    category,
    check_span,
    is_char_boundary,
    reconstruct,
)
from .gazetteer import GazetteerDetector
from .merge import merge_spans
from .redact import (
    NotAnIcd10Code,
    OverlappingSpans,
    RedactionMode,
    classify_icd10,
    detect_hybrid,
    redact,
    sanitize,
)
from .remote import (
    DetectorError,
    DetectorInterface,
    DetectorProtocolError,
    DetectorUnavailable,
    RemoteDetector,
    detect_contextual,
)
from .rules import DEFAULT_RULES, PatternRule, detect_pattern, dump_rules, load_rules, shipped_rules

__all__ = [
    "CATEGORIES",
    "DEFAULT_RULES",
    "DEMOGRAPHIC_CATEGORIES",
    "DetectorError",
    "DetectorInterface",
    "DetectorProtocolError",
    "DetectorUnavailable",
    "GazetteerDetector",
    "NotAnIcd10Code",
    "OverlappingSpans",
    "PatternRule",
    "PhiCategory",
    "PhiSpan",
    "RedactionMode",
    "RemoteDetector",
    "SanitizationResult",
    "Source",
    "byte_offsets",
    "category",
    "check_span",
    "classify_icd10",
    "detect_contextual",
    "detect_hybrid",
    "detect_pattern",
    "dump_rules",
    "is_char_boundary",
    "load_rules",
    "merge_spans",
    "reconstruct",
    "redact",
    "sanitize",
    "shipped_rules",
]
