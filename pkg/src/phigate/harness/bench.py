"""Decision-engine benchmarking and scripted session replay."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from ..engine import AccessRequest, evaluate
from ..oracle import oracle_evaluate
from ..phi.categories import CATEGORIES, PhiSpan, Source
from ..policy.model import (
    AttributeBag,
    BagCategory,
    Compare,
    Effect,
    Equals,
    InRange,
    MemberOf,
    Obligation,
    Policy,
    PolicySet,
    Target,
    TimeOfDay,
)
from ..session import (
    DEFAULT_THRESHOLDS,
    RoleThresholdTable,
    SessionStatus,
    ThresholdAction,
    check_threshold,
    open_session,
    record_phi_access,
    revoke_consent,
)
from .scoring import LatencyStats

_ROLES = ("cardiologist", "billing clerk", "nurse", "oncologist", "radiologist", "admin")
_DATA_TYPES = ("cardiac", "oncology", "billing", "lab", "radiology")
_ACTIONS = ("read", "write", "export")
_PROVIDERS = ("Azure OpenAI", "AWS", "on-prem")
_OBLIGATIONS = ("log_access", "sanitize_phi", "REDACT_ALL", "REDACT_DEMO", "MASK_CODES")


def random_request(rng: random.Random) -> AccessRequest:
    subject = {"role": rng.choice(_ROLES)}
    if rng.random() < 0.3:
        subject["department"] = rng.choice(_DATA_TYPES)
    if rng.random() < 0.3:
        subject["clearance"] = rng.randint(1, 5)
    resource = {"data_type": rng.choice(_DATA_TYPES), "sensitivity": rng.randint(1, 5)}
    environment = {"time": TimeOfDay(rng.randrange(0, 1440)), "consent_status": rng.choice(("active", "revoked"))}
    if rng.random() < 0.35:
        environment["api_provider"] = rng.choice(_PROVIDERS)
        environment["baa_valid"] = rng.random() < 0.6
    return AccessRequest(
        subject=AttributeBag(BagCategory.SUBJECT, subject),
        resource=AttributeBag(BagCategory.RESOURCE, resource),
        action=rng.choice(_ACTIONS),
        environment=AttributeBag(BagCategory.ENVIRONMENT, environment),
    )


def random_policy(rng: random.Random, index: int) -> Policy:
    subject = []
    if rng.random() < 0.8:
        subject.append(Equals("role", rng.choice(_ROLES)))
    if rng.random() < 0.2:
        subject.append(MemberOf("department", frozenset(rng.sample(_DATA_TYPES, 2))))
    resource = []
    if rng.random() < 0.7:
        resource.append(Equals("data_type", rng.choice(_DATA_TYPES)))
    if rng.random() < 0.6:
        resource.append(Compare("sensitivity", rng.choice(("<", "<=", ">=", ">")), rng.randint(1, 5)))
    actions = tuple(rng.sample(_ACTIONS, rng.randint(0, 2)))
    condition = []
    if rng.random() < 0.6:
        lo = rng.randrange(0, 720)
        hi = rng.randrange(lo, 1440)
        condition.append(InRange("time", TimeOfDay(lo), TimeOfDay(hi), inclusive=rng.random() < 0.8))
    if rng.random() < 0.25:
        condition.append(Equals("consent_status", rng.choice(("active", "revoked"))))
    obligations = tuple(Obligation(k) for k in rng.sample(_OBLIGATIONS, rng.randint(0, 3)))
    effect = Effect.DENY if rng.random() < 0.15 else Effect.ALLOW
    return Policy(
        id=f"bench-{index}",
        target=Target(subject=tuple(subject), resource=tuple(resource), actions=actions),
        condition=tuple(condition),
        effect=effect,
        obligations=obligations if effect is Effect.ALLOW else (),
    )


def random_policy_set(rng: random.Random, max_policies: int = 6) -> PolicySet:
    return PolicySet(tuple(random_policy(rng, i) for i in range(rng.randint(0, max_policies))))


@dataclass(frozen=True)
class BenchResult:
    latency: LatencyStats
    agreement_rate: float
    requests: int
    allow_count: int
    deny_count: int


def bench_pda(n_requests: int, policy_set: PolicySet, seed: int = 0) -> BenchResult:
    """Latency distribution of `evaluate` plus agreement with the oracle."""
    if n_requests < 1:
        raise ValueError("n_requests must be >= 1")
    rng = random.Random(seed)
    requests = [random_request(rng) for _ in range(n_requests)]
    samples_ms = []
    decisions = []
    for request in requests:
        start = time.perf_counter_ns()
        decision = evaluate(request, policy_set)
        samples_ms.append((time.perf_counter_ns() - start) / 1e6)
        decisions.append(decision)
    agreements = 0
    for request, decision in zip(requests, decisions):
        reference = oracle_evaluate(request, policy_set)
        if (
            reference.effect is decision.effect
            and reference.matched_policy == decision.matched_policy
            and reference.obligations == decision.obligations
        ):
            agreements += 1
    allow_count = sum(1 for d in decisions if d.effect is Effect.ALLOW)
    return BenchResult(
        latency=LatencyStats.from_samples(samples_ms),
        agreement_rate=agreements / n_requests,
        requests=n_requests,
        allow_count=allow_count,
        deny_count=n_requests - allow_count,
    )


# --- Scripted session replay -----------------------------------------------------


@dataclass(frozen=True)
class ScriptStep:
    kind: str  # "access" | "revoke"
    categories: tuple = ()


@dataclass(frozen=True)
class SessionScript:
    role: str
    steps: tuple


def random_session_script(rng: random.Random) -> SessionScript:
    steps = []
    for _ in range(rng.randint(1, 12)):
        if rng.random() < 0.06:
            steps.append(ScriptStep("revoke"))
        else:
            names = rng.sample(sorted(CATEGORIES), rng.randint(0, 3))
            steps.append(ScriptStep("access", tuple(names)))
    return SessionScript(role=rng.choice(_ROLES), steps=tuple(steps))


@dataclass
class EnforcementReport:
    sessions: int = 0
    over_threshold_sessions: int = 0
    terminated_over_threshold: int = 0
    post_termination_releases: int = 0
    post_revocation_releases: int = 0
    risk_invariant_violations: int = 0
    releases: int = 0

    @property
    def enforcement_rate(self) -> float:
        if self.over_threshold_sessions == 0:
            return 1.0
        return self.terminated_over_threshold / self.over_threshold_sessions


def _spans_for(categories) -> list:
    return [
        PhiSpan(i * 2, i * 2 + 1, CATEGORIES[name], Source.CONTEXTUAL, 0.9)
        for i, name in enumerate(categories)
    ]


def simulate_sessions(scripts, thresholds: RoleThresholdTable = DEFAULT_THRESHOLDS) -> EnforcementReport:
    """Replay access scripts through the session rules, counting violations.

    A step's data is "released" only when the session is still open and the
    threshold check passes after accounting. Any release after termination
    or revocation is a violation (and must never happen).
    """
    report = EnforcementReport()
    for script in scripts:
        report.sessions += 1
        subject = AttributeBag(BagCategory.SUBJECT, {"role": script.role})
        state = open_session(subject, thresholds)
        revoked = False
        went_over = False
        for step in script.steps:
            if step.kind == "revoke":
                revoke_consent(state)
                revoked = True
                if state.phi_cache:
                    report.risk_invariant_violations += 1
                continue
            if state.status is SessionStatus.TERMINATED:
                continue  # blocked: no release
            record_phi_access(state, _spans_for(step.categories))
            if state.risk_score != sum(state.accessed_sensitivities) * state.phi_access_count:
                report.risk_invariant_violations += 1
            outcome = check_threshold(state)
            if state.risk_score > state.threshold and not went_over:
                went_over = True
                report.over_threshold_sessions += 1
                if outcome.action is ThresholdAction.TERMINATE:
                    report.terminated_over_threshold += 1
            if outcome.action is ThresholdAction.TERMINATE:
                continue  # the crossing request is withheld
            report.releases += 1
            if revoked:
                report.post_revocation_releases += 1
            if went_over:
                report.post_termination_releases += 1
    return report
