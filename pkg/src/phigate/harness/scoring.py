"""Span-level detection scoring and report rendering.

Matching is relaxed-overlap: a predicted span is a true positive iff it
overlaps some gold span of the same category; a gold span is covered iff
some same-category prediction overlaps it. Residual PHI counts gold spans
untouched by ANY prediction regardless of category — text that would leak
through redaction entirely.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field

from ..phi.gazetteer import GazetteerDetector
from ..phi.merge import merge_spans
from ..phi.remote import detect_contextual
from ..phi.rules import DEFAULT_RULES, detect_pattern


@dataclass(frozen=True)
class DetectionMetrics:
    precision: float
    recall: float
    f1: float
    true_positives: int
    false_positives: int
    false_negatives: int
    residual: int
    per_category_precision: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, matched_pred: int, total_pred: int, covered_gold: int, total_gold: int,
                    residual: int, per_category: dict | None = None) -> "DetectionMetrics":
        precision = matched_pred / total_pred if total_pred else 1.0
        recall = covered_gold / total_gold if total_gold else 1.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(
            precision=precision,
            recall=recall,
            f1=f1,
            true_positives=matched_pred,
            false_positives=total_pred - matched_pred,
            false_negatives=total_gold - covered_gold,
            residual=residual,
            per_category_precision=per_category or {},
        )


@dataclass(frozen=True)
class LatencyStats:
    mean_ms: float
    sd_ms: float
    p50_ms: float
    p99_ms: float

    @classmethod
    def from_samples(cls, samples_ms) -> "LatencyStats":
        samples = sorted(samples_ms)
        if not samples:
            raise ValueError("no latency samples")
        mean = statistics.fmean(samples)
        sd = statistics.stdev(samples) if len(samples) > 1 else 0.0
        return cls(
            mean_ms=mean,
            sd_ms=sd,
            p50_ms=samples[len(samples) // 2],
            p99_ms=samples[min(len(samples) - 1, int(len(samples) * 0.99))],
        )


@dataclass(frozen=True)
class MetricsReport:
    configurations: dict
    latency: LatencyStats | None = None
    threshold_enforcement_rate: float | None = None

    def to_json(self) -> str:
        doc = {
            "configurations": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "true_positives": m.true_positives,
                    "false_positives": m.false_positives,
                    "false_negatives": m.false_negatives,
                    "residual_phi": m.residual,
                    "per_category_precision": m.per_category_precision,
                }
                for name, m in self.configurations.items()
            },
        }
        if self.latency is not None:
            doc["latency_ms"] = {
                "mean": self.latency.mean_ms,
                "sd": self.latency.sd_ms,
                "p50": self.latency.p50_ms,
                "p99": self.latency.p99_ms,
            }
        if self.threshold_enforcement_rate is not None:
            doc["threshold_enforcement_rate"] = self.threshold_enforcement_rate
        return json.dumps(doc, indent=2) + "\n"

    def render_table(self) -> str:
        names = list(self.configurations)
        width = max(len(n) for n in names) if names else 8
        header = "Metric".ljust(14) + "".join(n.rjust(width + 2) for n in names)
        rows = [header, "-" * len(header)]
        for label, attr, fmt in (
            ("Precision", "precision", "{:.1%}"),
            ("Recall", "recall", "{:.1%}"),
            ("F1-Score", "f1", "{:.1%}"),
            ("Residual PHI", "residual", "{}"),
        ):
            cells = "".join(
                fmt.format(getattr(self.configurations[n], attr)).rjust(width + 2) for n in names
            )
            rows.append(label.ljust(14) + cells)
        return "\n".join(rows) + "\n"


def _overlaps(a, b) -> bool:
    return a.start < b.end and b.start < a.end


def score_detections(notes, predictions) -> DetectionMetrics:
    """Aggregate metrics for per-note predicted span lists."""
    matched_pred = 0
    total_pred = 0
    covered_gold = 0
    total_gold = 0
    residual = 0
    per_cat: dict = {}
    for note, predicted in zip(notes, predictions):
        total_pred += len(predicted)
        total_gold += len(note.spans)
        for span in predicted:
            hit = any(
                _overlaps(span, gold) and gold.category.name == span.category.name for gold in note.spans
            )
            stats = per_cat.setdefault(span.category.name, [0, 0])
            stats[1] += 1
            if hit:
                matched_pred += 1
                stats[0] += 1
        for gold in note.spans:
            if any(_overlaps(gold, s) and s.category.name == gold.category.name for s in predicted):
                covered_gold += 1
            if not any(_overlaps(gold, s) for s in predicted):
                residual += 1
    per_category = {name: hits / total for name, (hits, total) in per_cat.items() if total}
    return DetectionMetrics.from_counts(matched_pred, total_pred, covered_gold, total_gold, residual, per_category)


CONFIGURATIONS = ("pattern", "contextual", "hybrid")


def _predict(note_text: str, configuration: str, detector, rules, min_confidence: float):
    if configuration == "pattern":
        return merge_spans(detect_pattern(note_text, rules))
    if configuration == "contextual":
        return merge_spans(detect_contextual(note_text, detector, min_confidence))
    if configuration == "hybrid":
        return merge_spans(
            detect_pattern(note_text, rules) + detect_contextual(note_text, detector, min_confidence)
        )
    raise ValueError(f"unknown configuration {configuration!r}; expected one of {CONFIGURATIONS}")


def score_sanitizer(
    notes,
    configuration: str,
    detector=None,
    rules=DEFAULT_RULES,
    min_confidence: float = 0.5,
) -> DetectionMetrics:
    """Score one detector configuration over a gold corpus."""
    if not notes:
        raise ValueError("corpus is empty")
    if detector is None and configuration != "pattern":
        detector = GazetteerDetector()
    predictions = [_predict(note.text, configuration, detector, rules, min_confidence) for note in notes]
    return score_detections(notes, predictions)


def score_all(notes, detector=None, rules=DEFAULT_RULES, min_confidence: float = 0.5) -> MetricsReport:
    detector = detector or GazetteerDetector()
    return MetricsReport(
        configurations={
            name: score_sanitizer(notes, name, detector, rules, min_confidence) for name in CONFIGURATIONS
        }
    )
