"""Policy decision engine: evaluate access requests against a policy set.

Combining is first-applicable over document order. A business-associate gate
is applied before any policy is inspected: when the environment names an
external API provider, a valid agreement flag must accompany it or the
request is denied outright. Evaluation is a pure function of the request and
the policy-set snapshot, so any number of callers may evaluate concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .policy.model import (
    AttributeBag,
    BagCategory,
    Effect,
    Obligation,
    Policy,
    PolicySet,
)

BAA_GATE_TRACE_ID = "(baa-gate)"


@dataclass(frozen=True)
class AccessRequest:
    subject: AttributeBag
    resource: AttributeBag
    action: str
    environment: AttributeBag

    def __post_init__(self) -> None:
        if not self.action or not self.action.strip():
            raise ValueError("action must be a non-empty token")
        if self.subject.category is not BagCategory.SUBJECT:
            raise ValueError("subject bag must have category 'subject'")
        if self.resource.category is not BagCategory.RESOURCE:
            raise ValueError("resource bag must have category 'resource'")
        if self.environment.category is not BagCategory.ENVIRONMENT:
            raise ValueError("environment bag must have category 'environment'")


@dataclass(frozen=True)
class TraceEntry:
    policy_id: str
    matched: bool
    detail: str | None = None


@dataclass(frozen=True)
class Decision:
    effect: Effect
    obligations: tuple = ()
    matched_policy: str | None = None
    trace: tuple = ()

    def __post_init__(self) -> None:
        if self.effect is Effect.ALLOW and self.matched_policy is None:
            raise ValueError("an ALLOW decision must name the matched policy")
        if self.effect is Effect.DENY and self.obligations:
            raise ValueError("a DENY decision carries no obligations")

    @property
    def allowed(self) -> bool:
        return self.effect is Effect.ALLOW


@dataclass(frozen=True)
class BaaGate:
    """Third-party inference gate: provider attribute requires a valid BAA."""

    api_provider: str | None
    baa_valid: bool

    @classmethod
    def from_environment(cls, environment: AttributeBag) -> "BaaGate":
        provider = environment.get("api_provider")
        valid = environment.get("baa_valid")
        # An absent flag next to a named provider fails closed.
        return cls(
            api_provider=provider if isinstance(provider, str) else None,
            baa_valid=valid is True,
        )

    def passes(self) -> bool:
        return self.api_provider is None or self.baa_valid


def match_attributes(policy: Policy, request: AccessRequest) -> bool:
    """True iff target, action and condition all hold for the request."""
    return first_failure(policy, request) is None


def first_failure(policy: Policy, request: AccessRequest) -> str | None:
    """Description of the first non-matching matcher, or None on a match."""
    for pred in policy.target.subject:
        if not pred.holds(request.subject):
            return f"subject: {pred}"
    for pred in policy.target.resource:
        if not pred.holds(request.resource):
            return f"resource: {pred}"
    if policy.target.actions:
        wanted = {a.lower() for a in policy.target.actions}
        if request.action.lower() not in wanted:
            return f"action: {request.action!r} not in {sorted(wanted)}"
    for pred in policy.condition:
        if not pred.holds(request.environment):
            return f"condition: {pred}"
    return None


def evaluate(request: AccessRequest, policy_set: PolicySet) -> Decision:
    """First-applicable evaluation; default deny when nothing matches.

    The trace lists every policy inspected, in order, up to and including
    the match, so the audit trail records the decision rationale.
    """
    gate = BaaGate.from_environment(request.environment)
    if not gate.passes():
        trace = (
            TraceEntry(
                BAA_GATE_TRACE_ID,
                False,
                f"api_provider={gate.api_provider!r} without a valid business associate agreement",
            ),
        )
        return Decision(Effect.DENY, (), None, trace)

    trace: list[TraceEntry] = []
    for policy in policy_set.policies:
        failure = first_failure(policy, request)
        matched = failure is None
        trace.append(TraceEntry(policy.id, matched, failure))
        if matched:
            if policy.effect is Effect.ALLOW:
                return Decision(Effect.ALLOW, tuple(policy.obligations), policy.id, tuple(trace))
            return Decision(Effect.DENY, (), policy.id, tuple(trace))
    return Decision(Effect.DENY, (), None, tuple(trace))
