"""Reference evaluator used to cross-check the decision engine.

Re-reads the policy set from its serialized JSON mirror on every call and
interprets the raw dictionaries directly: no compiled predicates, no shared
matching code, no caching. Slow on purpose — it exists so the fast path in
`engine.evaluate` has an independently written answer to agree with.
"""

from __future__ import annotations

import json

from .engine import AccessRequest, Decision, TraceEntry
from .policy.documents import policy_set_to_json
from .policy.model import AttributeBag, Effect, Obligation, PolicySet, TimeOfDay


def _kinded(value):
    """(kind, plain value) for one attribute value; bool before int."""
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, int):
        return ("int", value)
    if isinstance(value, TimeOfDay):
        return ("time", value.minutes)
    if isinstance(value, frozenset):
        return ("set", tuple(sorted(value)))
    return ("text", value)


def _bag_items(bag: AttributeBag) -> dict:
    return {name: _kinded(value) for name, value in bag.entries.items()}


def _json_value(obj) -> tuple:
    kind, value = obj["kind"], obj["value"]
    if kind == "set":
        return (kind, tuple(sorted(value)))
    return (kind, value)


def _predicate_holds(pred: dict, items: dict) -> bool:
    op = pred["op"]
    if op == "all":
        return all(_predicate_holds(child, items) for child in pred["children"])
    actual = items.get(pred["name"])
    if actual is None:
        return False
    if op == "eq":
        return actual == _json_value(pred["value"])
    if op == "member":
        return actual[0] == "text" and actual[1] in pred["values"]
    if op == "cmp":
        kind, bound = _json_value(pred["value"])
        if actual[0] != kind:
            return False
        a = actual[1]
        return {
            "<": a < bound,
            "<=": a <= bound,
            "=": a == bound,
            ">=": a >= bound,
            ">": a > bound,
        }[pred["cmp"]]
    if op == "range":
        lo_kind, lo = _json_value(pred["lo"])
        hi_kind, hi = _json_value(pred["hi"])
        if actual[0] != lo_kind or actual[0] != hi_kind:
            return False
        if pred.get("inclusive", True):
            return lo <= actual[1] <= hi
        return lo < actual[1] < hi
    raise ValueError(f"unknown predicate op {op!r}")


def oracle_evaluate(request: AccessRequest, policy_set: PolicySet) -> Decision:
    """Same decision semantics as `engine.evaluate`, computed the slow way."""
    doc = json.loads(policy_set_to_json(policy_set))

    env = _bag_items(request.environment)
    provider = env.get("api_provider")
    if provider is not None and provider[0] == "text":
        baa = env.get("baa_valid")
        if not (baa is not None and baa[0] == "bool" and baa[1] is True):
            return Decision(Effect.DENY, (), None, ())

    subject = _bag_items(request.subject)
    resource = _bag_items(request.resource)
    action = request.action.lower()

    trace: list[TraceEntry] = []
    for policy in doc["policies"]:
        target = policy.get("target", {})
        ok = all(_predicate_holds(p, subject) for p in target.get("subject", []))
        if ok:
            ok = all(_predicate_holds(p, resource) for p in target.get("resource", []))
        if ok and target.get("actions"):
            ok = action in {a.lower() for a in target["actions"]}
        if ok:
            ok = all(_predicate_holds(p, env) for p in policy.get("condition", []))
        trace.append(TraceEntry(policy["id"], ok))
        if ok:
            if policy.get("effect", "ALLOW") == "ALLOW":
                obligations = tuple(Obligation(o) for o in policy.get("obligations", []))
                return Decision(Effect.ALLOW, obligations, policy["id"], tuple(trace))
            return Decision(Effect.DENY, (), policy["id"], tuple(trace))
    return Decision(Effect.DENY, (), None, tuple(trace))
