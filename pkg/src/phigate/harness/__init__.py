"""Desk-scale evaluation harness: synthetic corpus, scoring, benchmarks."""

from .bench import (
    BenchResult,
    EnforcementReport,
    ScriptStep,
    SessionScript,
    bench_pda,
    random_policy_set,
    random_request,
    random_session_script,
    simulate_sessions,
)
from .corpus import RARE_NAMES, GoldNote, generate_corpus, read_corpus, write_corpus
from .scoring import (
    CONFIGURATIONS,
    DetectionMetrics,
    LatencyStats,
    MetricsReport,
    score_all,
    score_detections,
    score_sanitizer,
)

__all__ = [
    "BenchResult",
    "CONFIGURATIONS",
    "DetectionMetrics",
    "EnforcementReport",
    "GoldNote",
    "LatencyStats",
    "MetricsReport",
    "RARE_NAMES",
    "ScriptStep",
    "SessionScript",
    "bench_pda",
    "generate_corpus",
    "random_policy_set",
    "random_request",
    "random_session_script",
    "read_corpus",
    "score_all",
    "score_detections",
    "score_sanitizer",
    "simulate_sessions",
    "write_corpus",
]
