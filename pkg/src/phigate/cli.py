"""Operator command line: policy evaluation, sanitization, audit checks,
corpus generation, and benchmarks.

Exit codes for `policy eval`: 0 = ALLOW, 1 = DENY, 2 = error.
"""

from __future__ import annotations

import json
import random
import sys
from importlib import resources
from pathlib import Path

import click

from .engine import AccessRequest, evaluate
from .gateway.assertions import bag_from_plain
from .gateway.config import load_config
from .gateway.service import Gateway
from .harness.bench import bench_pda
from .harness.corpus import generate_corpus, write_corpus
from .ledger import AuditLedger, StorageFailure
from .phi.gazetteer import GazetteerDetector
from .phi.redact import RedactionMode, sanitize
from .phi.remote import DetectorUnavailable, RemoteDetector
from .policy.documents import (
    PolicyDocumentError,
    load_policy_file,
    validate_policy,
)
from .policy.model import BagCategory, PolicySet


def shipped_policy_path() -> Path:
    ref = resources.files("phigate") / "data" / "policies.xml"
    return Path(str(ref))


def load_request_file(path) -> AccessRequest:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return AccessRequest(
        subject=bag_from_plain(BagCategory.SUBJECT, doc.get("subject", {})),
        resource=bag_from_plain(BagCategory.RESOURCE, doc.get("resource", {})),
        action=doc.get("action", "read"),
        environment=bag_from_plain(BagCategory.ENVIRONMENT, doc.get("environment", {})),
    )


@click.group()
def main() -> None:
    """Compliance gateway operator tooling."""


@main.group()
def policy() -> None:
    """Inspect and evaluate policy documents."""


@policy.command("eval")
@click.option("--policies", "policies_path", required=True, type=click.Path(exists=True))
@click.option("--request", "request_path", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def policy_eval(policies_path, request_path, as_json) -> None:
    """Evaluate one access request against a policy document."""
    try:
        policy_set = load_policy_file(policies_path)
        request = load_request_file(request_path)
    except (PolicyDocumentError, ValueError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    decision = evaluate(request, policy_set)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "effect": decision.effect.value,
                    "matched_policy": decision.matched_policy,
                    "obligations": [o.kind for o in decision.obligations],
                    "trace": [
                        {"policy": t.policy_id, "matched": t.matched, "detail": t.detail}
                        for t in decision.trace
                    ],
                },
                indent=2,
            )
        )
    else:
        click.echo(f"effect: {decision.effect.value}")
        click.echo(f"matched_policy: {decision.matched_policy or '-'}")
        click.echo("obligations: " + (", ".join(o.kind for o in decision.obligations) or "-"))
        click.echo("trace:")
        for entry in decision.trace:
            mark = "match" if entry.matched else f"no-match ({entry.detail})"
            click.echo(f"  {entry.policy_id}: {mark}")
    sys.exit(0 if decision.allowed else 1)


@policy.command("validate")
@click.option("--policies", "policies_path", required=True, type=click.Path(exists=True))
def policy_validate(policies_path) -> None:
    """Print diagnostics for every policy in a document."""
    try:
        policy_set = load_policy_file(policies_path)
    except PolicyDocumentError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    clean = True
    for item in policy_set.policies:
        for diagnostic in validate_policy(item):
            clean = False
            click.echo(f"{item.id}: {diagnostic}")
    if clean:
        click.echo("ok")
    sys.exit(0 if clean else 1)


_MODES = {
    "placeholders": RedactionMode.PLACEHOLDERS,
    "redact-all": RedactionMode.REDACT_ALL,
    "redact-demo": RedactionMode.REDACT_DEMO,
    "mask-codes": RedactionMode.MASK_CODES,
}


@main.command("sanitize")
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(sorted(_MODES)), default="placeholders")
@click.option("--detector", "detector_url", default=None, help="Contextual detector endpoint.")
@click.option("--out", "output_path", default=None, type=click.Path())
@click.option("--fail-open", is_flag=True, help="Continue pattern-only when the detector is down.")
def sanitize_cmd(input_path, mode, detector_url, output_path, fail_open) -> None:
    """Redact a document and write a span sidecar next to it."""
    text = Path(input_path).read_text(encoding="utf-8")
    detector = RemoteDetector(detector_url) if detector_url else GazetteerDetector()
    try:
        result = sanitize(text, _MODES[mode], detector=detector)
    except DetectorUnavailable as exc:
        if not fail_open:
            click.echo(f"error: detector unavailable, failing closed: {exc}", err=True)
            sys.exit(2)
        click.echo("warning: detector unavailable, continuing pattern-only", err=True)
        result = sanitize(text, _MODES[mode], detector=None)
    out = Path(output_path) if output_path else Path(input_path).with_suffix(".redacted.txt")
    out.write_text(result.redacted_text, encoding="utf-8")
    sidecar = [
        {
            "start": span.start,
            "end": span.end,
            "category": span.category.name,
            "source": span.source.value,
            "confidence": span.confidence,
            "replacement": replacement,
        }
        for span, replacement in zip(result.spans, result.replacements)
    ]
    sidecar_path = out.with_suffix(out.suffix + ".spans.json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {out} ({len(result.spans)} spans; sidecar {sidecar_path})")


@main.group()
def audit() -> None:
    """Audit chain tooling."""


@audit.command("verify")
@click.option("--dir", "directory", required=True, type=click.Path(exists=True))
def audit_verify(directory) -> None:
    """Verify both hash chains in an audit directory."""
    try:
        results = AuditLedger(directory).verify()
    except StorageFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    tampered = False
    for name, verification in results.items():
        if verification.ok:
            click.echo(f"{name}: Ok")
        else:
            tampered = True
            where = f"TamperedAt({verification.tampered_at})" if verification.tampered_at is not None else "HeadMismatch"
            click.echo(f"{name}: {where} - {verification.message}")
    sys.exit(1 if tampered else 0)


@main.group()
def corpus() -> None:
    """Synthetic evaluation corpus."""


@corpus.command("gen")
@click.option("--out", "output_dir", required=True, type=click.Path())
@click.option("--notes", "n_notes", default=500, show_default=True)
@click.option("--seed", default=7, show_default=True)
def corpus_gen(output_dir, n_notes, seed) -> None:
    """Generate a gold-labelled synthetic note corpus."""
    notes = generate_corpus(n_notes, seed)
    write_corpus(notes, output_dir)
    total = sum(len(note.spans) for note in notes)
    click.echo(f"wrote {len(notes)} notes, {total} gold spans -> {output_dir}")


@main.group()
def bench() -> None:
    """Performance and agreement benchmarks."""


@bench.command("pda")
@click.option("--requests", "n_requests", default=200, show_default=True)
@click.option("--policies", "policies_path", default=None, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def bench_pda_cmd(n_requests, policies_path, seed, as_json) -> None:
    """Measure decision latency and oracle agreement on simulated requests."""
    path = Path(policies_path) if policies_path else shipped_policy_path()
    policy_set: PolicySet = load_policy_file(path)
    result = bench_pda(n_requests, policy_set, seed=seed)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "requests": result.requests,
                    "allow": result.allow_count,
                    "deny": result.deny_count,
                    "agreement_rate": result.agreement_rate,
                    "latency_ms": {
                        "mean": result.latency.mean_ms,
                        "sd": result.latency.sd_ms,
                        "p50": result.latency.p50_ms,
                        "p99": result.latency.p99_ms,
                    },
                },
                indent=2,
            )
        )
    else:
        click.echo(f"requests: {result.requests} (allow {result.allow_count}, deny {result.deny_count})")
        click.echo(f"oracle agreement: {result.agreement_rate:.2%}")
        click.echo(
            f"latency: mean {result.latency.mean_ms:.3f} ms, sd {result.latency.sd_ms:.3f} ms, "
            f"p50 {result.latency.p50_ms:.3f} ms, p99 {result.latency.p99_ms:.3f} ms"
        )


@main.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path) -> None:
    """Run the gateway HTTP service."""
    import uvicorn

    from .gateway.app import create_app

    config = load_config(config_path)
    gateway = Gateway.from_config(config)
    uvicorn.run(create_app(gateway), host=config.listen_host, port=config.listen_port)


if __name__ == "__main__":
    main()
