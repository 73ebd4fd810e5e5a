from __future__ import annotations

import math
import random

import pytest

from phigate.harness import (
    RARE_NAMES,
    ScriptStep,
    SessionScript,
    bench_pda,
    generate_corpus,
    random_policy_set,
    random_session_script,
    read_corpus,
    score_all,
    score_detections,
    score_sanitizer,
    simulate_sessions,
    write_corpus,
)
from phigate.harness.scoring import LatencyStats, MetricsReport
from phigate.policy import PolicySet


class TestCorpus:
    def test_determinism_byte_identical(self):
        a = generate_corpus(25, 7)
        b = generate_corpus(25, 7)
        assert [n.text for n in a] == [n.text for n in b]
        assert [n.spans for n in a] == [n.spans for n in b]

    def test_different_seed_differs(self):
        assert generate_corpus(10, 1)[0].text != generate_corpus(10, 2)[0].text

    def test_single_note(self):
        notes = generate_corpus(1, 3)
        assert len(notes) == 1
        assert notes[0].text.startswith("Discharge Summary")

    def test_gold_spans_valid_and_disjoint(self):
        for note in generate_corpus(40, 11):
            data = note.text.encode("utf-8")
            previous_end = -1
            for span in note.spans:
                assert previous_end <= span.start < span.end <= len(data)
                previous_end = span.end

    def test_density_near_target(self, corpus_500):
        total = sum(len(n.spans) for n in corpus_500)
        assert 2350 * 0.9 <= total <= 2350 * 1.1

    def test_write_read_round_trip(self, tmp_path):
        notes = generate_corpus(5, 13)
        write_corpus(notes, tmp_path)
        loaded = read_corpus(tmp_path)
        assert [n.text for n in loaded] == [n.text for n in notes]
        assert [
            [(s.start, s.end, s.category.name) for s in n.spans] for n in loaded
        ] == [[(s.start, s.end, s.category.name) for s in n.spans] for n in notes]

    def test_rejects_zero_notes(self):
        with pytest.raises(ValueError):
            generate_corpus(0, 1)


class TestScoring:
    def test_gold_against_gold_is_perfect(self):
        notes = generate_corpus(20, 5)
        metrics = score_detections(notes, [list(n.spans) for n in notes])
        assert metrics.precision == metrics.recall == metrics.f1 == 1.0
        assert metrics.residual == 0

    def test_empty_predictions(self):
        notes = generate_corpus(10, 5)
        metrics = score_detections(notes, [[] for _ in notes])
        assert metrics.recall == 0.0
        assert metrics.residual == sum(len(n.spans) for n in notes)

    def test_f1_consistency(self, corpus_500):
        report = score_all(corpus_500)
        for metrics in report.configurations.values():
            p, r = metrics.precision, metrics.recall
            expected = 2 * p * r / (p + r) if p + r else 0.0
            assert math.isclose(metrics.f1, expected, abs_tol=1e-9)

    def test_hybrid_union_recall(self, corpus_500):
        report = score_all(corpus_500)
        hybrid = report.configurations["hybrid"].recall
        assert hybrid >= report.configurations["pattern"].recall
        assert hybrid >= report.configurations["contextual"].recall

    def test_unknown_configuration_rejected(self):
        with pytest.raises(ValueError):
            score_sanitizer(generate_corpus(2, 1), "quantum")

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            score_sanitizer([], "pattern")

    def test_report_rendering(self, corpus_500):
        report = score_all(corpus_500[:50])
        table = report.render_table()
        assert "Precision" in table and "Residual PHI" in table
        assert "hybrid" in table
        as_json = report.to_json()
        assert '"configurations"' in as_json


class TestBench:
    def test_empty_policy_set_all_deny_full_agreement(self):
        result = bench_pda(50, PolicySet(), seed=3)
        assert result.deny_count == 50
        assert result.agreement_rate == 1.0

    def test_latency_stats_shape(self):
        rng = random.Random(5)
        result = bench_pda(100, random_policy_set(rng), seed=5)
        assert result.latency.mean_ms >= 0
        assert result.latency.p99_ms >= result.latency.p50_ms >= 0
        assert 0.0 <= result.agreement_rate <= 1.0

    def test_latency_stats_from_samples(self):
        stats = LatencyStats.from_samples([1.0, 2.0, 3.0, 4.0])
        assert stats.mean_ms == 2.5
        assert stats.p50_ms == 3.0


class TestSimulateSessions:
    def test_billing_clerk_driven_past_threshold(self):
        script = SessionScript(
            role="billing clerk",
            steps=tuple(ScriptStep("access", ("SSN",)) for _ in range(5)),
        )
        report = simulate_sessions([script])
        assert report.over_threshold_sessions == 1
        assert report.terminated_over_threshold == 1
        assert report.enforcement_rate == 1.0
        assert report.post_termination_releases == 0

    def test_never_exceeding_threshold(self):
        script = SessionScript(role="cardiologist", steps=(ScriptStep("access", ("Year",)),))
        report = simulate_sessions([script])
        assert report.over_threshold_sessions == 0
        assert report.enforcement_rate == 1.0
        assert report.releases == 1

    def test_revocation_mid_script_blocks_rest(self):
        script = SessionScript(
            role="cardiologist",
            steps=(
                ScriptStep("access", ("Year",)),
                ScriptStep("revoke"),
                ScriptStep("access", ("SSN",)),
                ScriptStep("access", ("SSN",)),
            ),
        )
        report = simulate_sessions([script])
        assert report.releases == 1
        assert report.post_revocation_releases == 0
        assert report.risk_invariant_violations == 0

    def test_randomized_scripts_enforce_fully(self):
        rng = random.Random(23)
        scripts = [random_session_script(rng) for _ in range(200)]
        report = simulate_sessions(scripts)
        assert report.enforcement_rate == 1.0
        assert report.post_revocation_releases == 0
        assert report.post_termination_releases == 0
        assert report.risk_invariant_violations == 0
        assert report.over_threshold_sessions > 0  # the scripts actually bite


class TestCorpusDetectorAlignment:
    def test_no_pattern_phi_passes_through(self, corpus_500, gazetteer):
        # Every gold span a rule-table pattern can find must be covered by
        # some span of the merged hybrid output.
        from phigate.phi import detect_hybrid, detect_pattern

        for note in corpus_500[:100]:
            raw_pattern = detect_pattern(note.text)
            hybrid = detect_hybrid(note.text, gazetteer)
            for gold in note.spans:
                pattern_hit = any(p.start < gold.end and gold.start < p.end for p in raw_pattern)
                if pattern_hit:
                    assert any(
                        h.start < gold.end and gold.start < h.end for h in hybrid
                    ), f"pattern-detectable gold span leaked: {note.text[gold.start:gold.end]!r}"

    def test_rare_names_missed_by_design(self, corpus_500, gazetteer):
        rare_notes = [n for n in corpus_500 if any(r in n.text for r in RARE_NAMES)]
        assert rare_notes, "expected some rare-name notes in the corpus"
        for note in rare_notes:
            names = [s for s in gazetteer.detect(note.text) if s.category.name == "PatientName"]
            gold_names = [s for s in note.spans if s.category.name == "PatientName"]
            covered = any(
                g.start < p.end and p.start < g.end for g in gold_names for p in names
            )
            assert not covered
