"""Signed subject-attribute assertions.

Authentication proper is out of scope; the gateway trusts attribute
assertions minted by the deployment's identity layer and verifies them with
a shared-secret keyed MAC. Token format:

    base64url(canonical JSON attributes) "." base64url(HMAC-SHA256 tag)
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json

from ..policy.model import AttributeBag, BagCategory, TimeOfDay


class InvalidAssertion(Exception):
    pass


def _canonical(attributes: dict) -> bytes:
    return json.dumps(attributes, sort_keys=True, separators=(",", ":")).encode("utf-8")


def mint_assertion(attributes: dict, secret: bytes) -> str:
    body = _canonical(attributes)
    tag = hmac.new(secret, body, hashlib.sha256).digest()
    return (
        base64.urlsafe_b64encode(body).decode("ascii").rstrip("=")
        + "."
        + base64.urlsafe_b64encode(tag).decode("ascii").rstrip("=")
    )


def _unpad(text: str) -> bytes:
    return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))


def verify_assertion(token: str, secret: bytes) -> dict:
    """Attributes from a valid token; raises InvalidAssertion otherwise."""
    try:
        body_text, sep, tag_text = token.partition(".")
        if not sep:
            raise ValueError("missing signature")
        body = _unpad(body_text)
        tag = _unpad(tag_text)
    except (ValueError, TypeError) as exc:
        raise InvalidAssertion(f"malformed assertion: {exc}") from None
    expected = hmac.new(secret, body, hashlib.sha256).digest()
    if not hmac.compare_digest(tag, expected):
        raise InvalidAssertion("assertion signature mismatch")
    try:
        attributes = json.loads(body)
    except json.JSONDecodeError as exc:
        raise InvalidAssertion(f"assertion body is not JSON: {exc}") from None
    if not isinstance(attributes, dict):
        raise InvalidAssertion("assertion body must be an attribute object")
    return attributes


def bag_from_plain(category: BagCategory, attributes: dict) -> AttributeBag:
    """Build a typed bag from plain JSON values (time strings become times)."""
    entries = {}
    for name, value in attributes.items():
        if name == "time" and isinstance(value, str):
            entries[name] = TimeOfDay.parse(value)
        elif isinstance(value, list):
            entries[name] = frozenset(str(v) for v in value)
        else:
            entries[name] = value
    return AttributeBag(category, entries)
