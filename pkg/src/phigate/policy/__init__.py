"""Policy data model and document formats."""

from .documents import (
    Diagnostic,
    InvalidValue,
    MalformedDocument,
    PolicyDocumentError,
    UnknownElement,
    load_policy_file,
    parse_policy_document,
    parse_policy_json,
    policy_set_to_json,
    serialize_policy_set,
    validate_policy,
)
from .model import (
    AllOf,
    AttributeBag,
    AttributeValue,
    BagCategory,
    Compare,
    Effect,
    Equals,
    InRange,
    MemberOf,
    Obligation,
    Policy,
    PolicySet,
    Predicate,
    Target,
    TimeOfDay,
    environment_bag,
    resource_bag,
    subject_bag,
)

__all__ = [
    "AllOf",
    "AttributeBag",
    "AttributeValue",
    "BagCategory",
    "Compare",
    "Diagnostic",
    "Effect",
    "Equals",
    "InRange",
    "InvalidValue",
    "MalformedDocument",
    "MemberOf",
    "Obligation",
    "Policy",
    "PolicyDocumentError",
    "PolicySet",
    "Predicate",
    "Target",
    "TimeOfDay",
    "UnknownElement",
    "environment_bag",
    "load_policy_file",
    "parse_policy_document",
    "parse_policy_json",
    "policy_set_to_json",
    "resource_bag",
    "serialize_policy_set",
    "subject_bag",
    "validate_policy",
]
