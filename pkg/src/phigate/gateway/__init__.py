"""Request/response interception gateway."""

from .app import create_app
from .assertions import InvalidAssertion, bag_from_plain, mint_assertion, verify_assertion
from .config import ConfigError, GatewayConfig, load_config
from .service import (
    Denied,
    Gateway,
    GatewayError,
    HealthReport,
    PolicySnapshotProvider,
    PolicyUnavailable,
    QueryResult,
    StaticPolicyProvider,
    TerminatedSession,
    UnknownSession,
)
from .upstream import EchoUpstream, HttpUpstream, UpstreamClient, UpstreamFailure

__all__ = [
    "ConfigError",
    "Denied",
    "EchoUpstream",
    "Gateway",
    "GatewayConfig",
    "GatewayError",
    "HealthReport",
    "HttpUpstream",
    "InvalidAssertion",
    "PolicySnapshotProvider",
    "PolicyUnavailable",
    "QueryResult",
    "StaticPolicyProvider",
    "TerminatedSession",
    "UnknownSession",
    "UpstreamClient",
    "UpstreamFailure",
    "bag_from_plain",
    "create_app",
    "load_config",
    "mint_assertion",
    "verify_assertion",
]
