"""Attribute and policy data model for the access-control engine.

Attributes describe subjects (who is asking), resources (what is asked for),
actions, and the environment of a request. Policies match attribute bags with
predicate trees and attach obligations that the enforcement point must carry
out on an allow.
"""

from __future__ import annotations

import enum
import operator
from dataclasses import dataclass, field
from typing import Mapping, Union


class BagCategory(enum.Enum):
    SUBJECT = "subject"
    RESOURCE = "resource"
    ACTION = "action"
    ENVIRONMENT = "environment"


@dataclass(frozen=True, order=True)
class TimeOfDay:
    """Clock time as minutes since midnight, in [0, 1440)."""

    minutes: int

    def __post_init__(self) -> None:
        if not 0 <= self.minutes < 1440:
            raise ValueError(f"time of day out of range: {self.minutes} minutes")

    @classmethod
    def parse(cls, text: str) -> "TimeOfDay":
        """Parse 'HH:MM' or a bare hour count ('8' -> 08:00)."""
        text = text.strip()
        if ":" in text:
            hh, _, mm = text.partition(":")
            if not (hh.isdigit() and mm.isdigit() and len(mm) == 2):
                raise ValueError(f"not a clock time: {text!r}")
            return cls(int(hh) * 60 + int(mm))
        if text.isdigit():
            return cls(int(text) * 60)
        raise ValueError(f"not a clock time: {text!r}")

    @classmethod
    def from_datetime(cls, dt) -> "TimeOfDay":
        return cls(dt.hour * 60 + dt.minute)

    def __str__(self) -> str:
        return f"{self.minutes // 60:02d}:{self.minutes % 60:02d}"


AttributeValue = Union[str, int, bool, TimeOfDay, frozenset]


def value_kind(value: AttributeValue) -> str:
    """Tag for an attribute value's domain. bool is checked before int."""
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, TimeOfDay):
        return "time"
    if isinstance(value, frozenset):
        return "set"
    if isinstance(value, str):
        return "text"
    raise TypeError(f"unsupported attribute value type: {type(value).__name__}")


def check_attribute_value(name: str, value: AttributeValue) -> None:
    kind = value_kind(value)
    if kind == "text" and not value:
        raise ValueError(f"attribute {name!r}: text values must be non-empty")
    if kind == "set" and not all(isinstance(v, str) and v for v in value):
        raise ValueError(f"attribute {name!r}: set members must be non-empty text")


@dataclass(frozen=True)
class AttributeBag:
    """A named collection of attributes for one request facet.

    Treated as immutable after construction; matchers ignore attribute names
    they do not reference.
    """

    category: BagCategory
    entries: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, value in self.entries.items():
            if not name:
                raise ValueError("attribute names must be non-empty")
            check_attribute_value(name, value)
        if self.category is BagCategory.RESOURCE:
            sens = self.entries.get("sensitivity")
            if sens is not None and (not isinstance(sens, int) or isinstance(sens, bool) or not 1 <= sens <= 5):
                raise ValueError(f"resource sensitivity must be an integer in [1,5], got {sens!r}")

    def get(self, name: str) -> AttributeValue | None:
        return self.entries.get(name)


def subject_bag(**entries: AttributeValue) -> AttributeBag:
    return AttributeBag(BagCategory.SUBJECT, entries)


def resource_bag(**entries: AttributeValue) -> AttributeBag:
    return AttributeBag(BagCategory.RESOURCE, entries)


def environment_bag(**entries: AttributeValue) -> AttributeBag:
    return AttributeBag(BagCategory.ENVIRONMENT, entries)


# --- Predicates -------------------------------------------------------------
#
# Evaluation is total: a referenced-but-absent attribute makes the predicate
# false, never an error, and comparisons across mismatched value kinds are
# false. This is the deny-biased default for a least-privilege posture.


class Predicate:
    def holds(self, bag: AttributeBag) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class Equals(Predicate):
    name: str
    value: AttributeValue

    def holds(self, bag: AttributeBag) -> bool:
        actual = bag.get(self.name)
        if actual is None:
            return False
        return value_kind(actual) == value_kind(self.value) and actual == self.value

    def __str__(self) -> str:
        return f"{self.name} = {_literal(self.value)}"


_CMP_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
}


@dataclass(frozen=True)
class Compare(Predicate):
    name: str
    op: str
    value: Union[int, TimeOfDay]

    def __post_init__(self) -> None:
        if self.op not in _CMP_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")

    def holds(self, bag: AttributeBag) -> bool:
        actual = bag.get(self.name)
        if actual is None or value_kind(actual) != value_kind(self.value):
            return False
        return _CMP_OPS[self.op](actual, self.value)

    def __str__(self) -> str:
        return f"{self.name} {self.op} {_literal(self.value)}"


@dataclass(frozen=True)
class InRange(Predicate):
    name: str
    lo: Union[int, TimeOfDay]
    hi: Union[int, TimeOfDay]
    inclusive: bool = True

    def __post_init__(self) -> None:
        if value_kind(self.lo) != value_kind(self.hi):
            raise ValueError("range bounds must share a kind")

    def holds(self, bag: AttributeBag) -> bool:
        actual = bag.get(self.name)
        if actual is None or value_kind(actual) != value_kind(self.lo):
            return False
        if self.inclusive:
            return self.lo <= actual <= self.hi
        return self.lo < actual < self.hi

    def __str__(self) -> str:
        op = "<=" if self.inclusive else "<"
        return f"{_literal(self.lo)} {op} {self.name} {op} {_literal(self.hi)}"


@dataclass(frozen=True)
class MemberOf(Predicate):
    name: str
    values: frozenset

    def holds(self, bag: AttributeBag) -> bool:
        actual = bag.get(self.name)
        if actual is None or value_kind(actual) != "text":
            return False
        return actual in self.values

    def __str__(self) -> str:
        members = ", ".join(sorted(self.values))
        return f"{self.name} in {{{members}}}"


@dataclass(frozen=True)
class AllOf(Predicate):
    children: tuple = ()

    def holds(self, bag: AttributeBag) -> bool:
        return all(child.holds(bag) for child in self.children)

    def __str__(self) -> str:
        if not self.children:
            return "true"
        return " and ".join(str(c) for c in self.children)


def flatten(predicates) -> tuple:
    """Expand nested conjunctions into a flat predicate tuple."""
    out = []
    for pred in predicates:
        if isinstance(pred, AllOf):
            out.extend(flatten(pred.children))
        else:
            out.append(pred)
    return tuple(out)


def _literal(value: AttributeValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, TimeOfDay):
        return str(value)
    if isinstance(value, frozenset):
        return "{" + ", ".join(sorted(value)) + "}"
    return str(value)


# --- Obligations ------------------------------------------------------------

LOG_ACCESS = "log_access"
SANITIZE_PHI = "sanitize_phi"
TERMINATE_SESSION = "TERMINATE_SESSION"
DELETE_CACHED_PHI = "DELETE_CACHED_PHI"
REDACT_ALL = "REDACT_ALL"
REDACT_DEMO = "REDACT_DEMO"
MASK_CODES = "MASK_CODES"

KNOWN_OBLIGATIONS = frozenset(
    {
        LOG_ACCESS,
        SANITIZE_PHI,
        TERMINATE_SESSION,
        DELETE_CACHED_PHI,
        REDACT_ALL,
        REDACT_DEMO,
        MASK_CODES,
    }
)


@dataclass(frozen=True)
class Obligation:
    """An action the enforcement point must perform as part of a decision.

    Kinds outside the built-in vocabulary are extensions and must carry a
    non-empty identifier.
    """

    kind: str

    def __post_init__(self) -> None:
        if not self.kind or not self.kind.strip():
            raise ValueError("obligation kind must be a non-empty identifier")

    @property
    def is_extension(self) -> bool:
        return self.kind not in KNOWN_OBLIGATIONS

    def __str__(self) -> str:
        return self.kind


# --- Policies ---------------------------------------------------------------


class Effect(enum.Enum):
    ALLOW = "ALLOW"
    DENY = "DENY"


@dataclass(frozen=True)
class Target:
    """Per-category matchers. Empty parts match anything."""

    subject: tuple = ()
    resource: tuple = ()
    actions: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "subject", flatten(self.subject))
        object.__setattr__(self, "resource", flatten(self.resource))
        for action in self.actions:
            if not action or not action.strip():
                raise ValueError("action matchers must be non-empty tokens")


@dataclass(frozen=True)
class Policy:
    id: str
    target: Target = field(default_factory=Target)
    condition: tuple = ()
    effect: Effect = Effect.ALLOW
    obligations: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "condition", flatten(self.condition))
        object.__setattr__(self, "obligations", tuple(self.obligations))


@dataclass(frozen=True)
class PolicySet:
    """An ordered policy collection, combined first-applicable.

    Immutable after construction; reload is a new PolicySet swapped in
    atomically so in-flight evaluations keep their snapshot.
    """

    policies: tuple = ()

    COMBINING = "first-applicable"

    def __post_init__(self) -> None:
        object.__setattr__(self, "policies", tuple(self.policies))
        seen = set()
        for policy in self.policies:
            if policy.id in seen:
                raise ValueError(f"duplicate policy id {policy.id!r}")
            seen.add(policy.id)

    def __len__(self) -> int:
        return len(self.policies)

    def __iter__(self):
        return iter(self.policies)
