"""Gateway configuration: plain `key = value` file with env overrides.

Keys (paths are resolved relative to the config file):

    policies   = policies.xml        policy document (.xml dialect or .json)
    thresholds = thresholds.conf     role threshold table
    rules      = rules.conf          pattern rule table
    detector   = http://host:port    contextual detector endpoint (optional)
    upstream   = http://host:port    upstream model endpoint (optional; echo stub when absent)
    provider   = Azure OpenAI        provider name for the upstream endpoint
    baa_valid  = Azure OpenAI, AWS   providers with a signed business associate agreement
    listen     = 127.0.0.1:8080
    audit_dir  = audit
    secret     = <hex>               shared secret for subject assertions

Environment overrides: PHIGATE_LISTEN, PHIGATE_UPSTREAM. Fail mode is
closed and not configurable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(Exception):
    pass


@dataclass
class GatewayConfig:
    policy_path: Path
    thresholds_path: Path | None = None
    rules_path: Path | None = None
    detector_url: str | None = None
    upstream_url: str | None = None
    provider: str | None = None
    baa_valid: frozenset = frozenset()
    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    audit_dir: Path = field(default_factory=lambda: Path("audit"))
    secret: bytes = b"phigate-dev-secret"
    min_confidence: float = 0.5
    fail_mode: str = "closed"  # fixed; recorded for the health report

    def __post_init__(self) -> None:
        if self.upstream_url and not self.provider:
            raise ConfigError("an external upstream endpoint requires a provider name")

    def provider_baa_valid(self) -> bool:
        return self.provider is not None and self.provider in self.baa_valid


def _parse_listen(text: str) -> tuple:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ConfigError(f"listen address must be host:port, got {text!r}")
    return host, int(port)


def load_config(path) -> GatewayConfig:
    path = Path(path)
    base = path.parent
    values: dict = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        values[key.strip()] = value.strip()

    if "policies" not in values:
        raise ConfigError(f"{path}: missing required key 'policies'")

    listen = os.environ.get("PHIGATE_LISTEN", values.get("listen", "127.0.0.1:8080"))
    host, port = _parse_listen(listen)
    upstream = os.environ.get("PHIGATE_UPSTREAM", values.get("upstream")) or None

    def resolve(key: str) -> Path | None:
        return (base / values[key]).resolve() if key in values else None

    try:
        secret = bytes.fromhex(values["secret"]) if "secret" in values else GatewayConfig.secret
        min_confidence = float(values.get("min_confidence", "0.5"))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    return GatewayConfig(
        policy_path=(base / values["policies"]).resolve(),
        thresholds_path=resolve("thresholds"),
        rules_path=resolve("rules"),
        detector_url=values.get("detector") or None,
        upstream_url=upstream,
        provider=values.get("provider") or None,
        baa_valid=frozenset(p.strip() for p in values.get("baa_valid", "").split(",") if p.strip()),
        listen_host=host,
        listen_port=port,
        audit_dir=(base / values.get("audit_dir", "audit")).resolve(),
        secret=secret,
        min_confidence=min_confidence,
    )
