"""Contextual PHI detector sidecar speaking the phigate detector protocol."""

from .backends import (
    DEFAULT_LABEL_MAP,
    DetectorBackend,
    LexicalBackend,
    ModelNotLoaded,
    TransformerBackend,
    load_label_map,
)
from .protocol import CATEGORY_VOCABULARY, Span, byte_offsets, is_char_boundary, span_violation
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "CATEGORY_VOCABULARY",
    "DEFAULT_LABEL_MAP",
    "DetectorBackend",
    "LexicalBackend",
    "ModelNotLoaded",
    "Span",
    "TransformerBackend",
    "byte_offsets",
    "create_app",
    "is_char_boundary",
    "load_label_map",
    "span_violation",
    "__version__",
]
