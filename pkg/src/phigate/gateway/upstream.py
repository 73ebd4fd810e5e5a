"""Upstream model clients. The gateway only ever sends sanitized text."""

from __future__ import annotations

from typing import Protocol

import httpx


class UpstreamFailure(Exception):
    pass


class UpstreamClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class EchoUpstream:
    """Test and development stub: echoes the prompt, counting invocations."""

    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self.calls = 0
        self.prompts: list = []

    def complete(self, prompt: str) -> str:
        self.calls += 1
        self.prompts.append(prompt)
        return f"{self.prefix}{prompt}"


class HttpUpstream:
    """POST {"prompt": ...} -> {"output": ...} against a model endpoint."""

    def __init__(self, url: str, timeout: float = 30.0, client: httpx.Client | None = None):
        self.url = url
        self._client = client or httpx.Client(timeout=timeout)

    def complete(self, prompt: str) -> str:
        try:
            response = self._client.post(self.url, json={"prompt": prompt})
            response.raise_for_status()
            return str(response.json()["output"])
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise UpstreamFailure(f"upstream {self.url}: {exc}") from exc

    def ping(self) -> bool:
        # Any HTTP answer counts as reachable; only transport errors fail.
        try:
            self._client.get(self.url)
            return True
        except httpx.HTTPError:
            return False
