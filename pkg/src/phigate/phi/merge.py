"""Resolve overlapping detections into a disjoint span list.

Overlap resolution order: higher confidence wins, then the longer span, then
pattern over contextual, then the lower start offset. A losing span is not
discarded outright — the parts of it not claimed by stronger spans survive as
truncated spans, so weaker detections never un-cover text.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import replace


def _priority(span):
    return (
        -span.confidence,
        -(span.end - span.start),
        0 if span.source.value == "pattern" else 1,
        span.start,
        span.end,
        span.category.name,
    )


def _subtract(start: int, end: int, claimed) -> list:
    """Sub-intervals of [start, end) not covered by the sorted claim list."""
    pieces = []
    cursor = start
    for a, b in claimed:
        if b <= cursor:
            continue
        if a >= end:
            break
        if a > cursor:
            pieces.append((cursor, min(a, end)))
        cursor = max(cursor, b)
        if cursor >= end:
            break
    if cursor < end:
        pieces.append((cursor, end))
    return pieces


def merge_spans(spans) -> list:
    """Sorted, pairwise-disjoint spans after overlap resolution."""
    unique = sorted(set(spans), key=_priority)
    claimed: list = []
    out = []
    for span in unique:
        for a, b in _subtract(span.start, span.end, claimed):
            out.append(replace(span, start=a, end=b))
            insort(claimed, (a, b))
    out.sort(key=lambda s: s.start)
    return out
