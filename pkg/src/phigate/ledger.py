"""Tamper-evident audit storage: two hash chains plus a payload store.

Decision and interaction logs are physically separate append-only chains.
Each record line carries

    seq  prev_hash(hex)  payload_hash(hex)  entry_hash(hex)  payload(base64)

with entry_hash = SHA-256(prev_hash || payload_hash), payload_hash =
SHA-256(payload), and a 32-zero-byte prev_hash at sequence 0. The first line
of a chain file is a header naming the format and hash function. A head
checkpoint file (`<name>.head`) pins the expected tail so truncation is
detectable even though every surviving prefix self-verifies.

Raw model outputs never enter the chains: they live in a content-addressed
payload store and are referenced by key, keeping bulk PHI out of the
widely-readable logs. Encryption of that store is a deployment concern.

Canonical payload encoding: a one-byte record tag, then each field in fixed
order as a 4-byte big-endian length followed by the UTF-8 bytes of its
string form. Lists are encoded as a length-prefixed count followed by their
items. Absent optional fields encode as the empty string.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

GENESIS_HASH = b"\x00" * 32
CHAIN_HEADER = "phigate-chain v1 sha256"


class StorageFailure(Exception):
    """Durable write failed; callers must treat the entry as unrecorded."""


def _hash(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def _lp(text: str) -> bytes:
    raw = text.encode("utf-8")
    return struct.pack(">I", len(raw)) + raw


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self) -> str:
        (length,) = struct.unpack_from(">I", self.data, self.pos)
        self.pos += 4
        raw = self.data[self.pos : self.pos + length]
        if len(raw) != length:
            raise ValueError("truncated field")
        self.pos += length
        return raw.decode("utf-8")


@dataclass(frozen=True)
class DecisionLogEntry:
    timestamp_ms: int
    session_id: str
    request_digest: str
    effect: str
    matched_policy: str | None
    obligations: tuple

    def __post_init__(self) -> None:
        if self.effect not in ("ALLOW", "DENY"):
            raise ValueError(f"effect must be ALLOW or DENY, got {self.effect!r}")


@dataclass(frozen=True)
class InteractionLogEntry:
    timestamp_ms: int
    session_id: str
    sanitized_query: str
    decision_seq: int | None
    redactions: tuple
    raw_output_ref: str | None
    sanitized_output_ref: str | None


def encode_entry(entry) -> bytes:
    if isinstance(entry, DecisionLogEntry):
        parts = [
            b"D",
            _lp(str(entry.timestamp_ms)),
            _lp(entry.session_id),
            _lp(entry.request_digest),
            _lp(entry.effect),
            _lp(entry.matched_policy or ""),
            _lp(str(len(entry.obligations))),
        ]
        parts.extend(_lp(o) for o in entry.obligations)
        return b"".join(parts)
    if isinstance(entry, InteractionLogEntry):
        parts = [
            b"I",
            _lp(str(entry.timestamp_ms)),
            _lp(entry.session_id),
            _lp(entry.sanitized_query),
            _lp("" if entry.decision_seq is None else str(entry.decision_seq)),
            _lp(str(len(entry.redactions))),
        ]
        parts.extend(_lp(r) for r in entry.redactions)
        parts.append(_lp(entry.raw_output_ref or ""))
        parts.append(_lp(entry.sanitized_output_ref or ""))
        return b"".join(parts)
    raise TypeError(f"cannot encode {type(entry).__name__}")


def decode_entry(payload: bytes):
    tag, reader = payload[:1], _Reader(payload[1:])
    if tag == b"D":
        timestamp = int(reader.take())
        session_id = reader.take()
        digest = reader.take()
        effect = reader.take()
        matched = reader.take() or None
        count = int(reader.take())
        obligations = tuple(reader.take() for _ in range(count))
        return DecisionLogEntry(timestamp, session_id, digest, effect, matched, obligations)
    if tag == b"I":
        timestamp = int(reader.take())
        session_id = reader.take()
        query = reader.take()
        seq_text = reader.take()
        count = int(reader.take())
        redactions = tuple(reader.take() for _ in range(count))
        raw_ref = reader.take() or None
        sanitized_ref = reader.take() or None
        return InteractionLogEntry(
            timestamp, session_id, query, int(seq_text) if seq_text else None, redactions, raw_ref, sanitized_ref
        )
    raise ValueError(f"unknown record tag {tag!r}")


@dataclass(frozen=True)
class ChainedEntry:
    seq: int
    prev_hash: bytes
    payload_hash: bytes
    entry_hash: bytes


@dataclass(frozen=True)
class ChainVerification:
    ok: bool
    tampered_at: int | None = None
    head_mismatch: bool = False
    message: str = "ok"


class HashChain:
    """One append-only chain file plus its head checkpoint.

    Both files are held open across appends and fsync'd before an append
    returns. Entries are never rewritten; the head checkpoint is derived
    state (a fixed-width `seq entry_hash` record rewritten in place) whose
    worst crash outcome is a torn checkpoint, which verify() reports as a
    conservative head-mismatch alarm — never a silently accepted chain.
    """

    def __init__(self, directory, name: str):
        self.directory = Path(directory)
        self.name = name
        self.log_path = self.directory / f"{name}.log"
        self.head_path = self.directory / f"{name}.head"
        self.directory.mkdir(parents=True, exist_ok=True)
        self._head: ChainedEntry | None = None
        self._next_seq = 0
        self._damaged = False
        fresh = not self.log_path.exists()
        if not fresh:
            try:
                for entry, _payload in self.entries():
                    self._head = entry
                    self._next_seq = entry.seq + 1
            except ValueError:
                # Unparseable tail. verify() reports the damage; appends are
                # refused until the operator repairs or replaces the chain.
                self._damaged = True
        try:
            self._log_handle = open(self.log_path, "ab")
            if fresh:
                self._log_handle.write((CHAIN_HEADER + "\n").encode("ascii"))
                self._log_handle.flush()
                os.fsync(self._log_handle.fileno())
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        self._head_handle = None  # created on first append; verify never writes

    def close(self) -> None:
        self._log_handle.close()
        if self._head_handle is not None:
            self._head_handle.close()

    @property
    def head(self) -> ChainedEntry | None:
        return self._head

    def append(self, payload: bytes) -> ChainedEntry:
        if self._damaged:
            raise StorageFailure(f"chain {self.name} is damaged; refusing to extend it")
        prev_hash = self._head.entry_hash if self._head else GENESIS_HASH
        payload_hash = _hash(payload)
        entry_hash = _hash(prev_hash + payload_hash)
        entry = ChainedEntry(self._next_seq, prev_hash, payload_hash, entry_hash)
        line = (
            f"{entry.seq} {prev_hash.hex()} {payload_hash.hex()} {entry_hash.hex()} "
            f"{base64.b64encode(payload).decode('ascii')}\n"
        )
        try:
            self._log_handle.write(line.encode("ascii"))
            self._log_handle.flush()
            os.fsync(self._log_handle.fileno())
            self._write_head(entry)
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        self._head = entry
        self._next_seq += 1
        return entry

    def _write_head(self, entry: ChainedEntry) -> None:
        if self._head_handle is None:
            self._head_handle = open(self.head_path, "r+b" if self.head_path.exists() else "w+b")
        self._head_handle.seek(0)
        self._head_handle.write(f"{entry.seq:020d} {entry.entry_hash.hex()}\n".encode("ascii"))
        self._head_handle.flush()
        os.fsync(self._head_handle.fileno())

    def entries(self) -> Iterator[tuple]:
        """(ChainedEntry, payload bytes) pairs in sequence order; raises on parse errors."""
        with open(self.log_path, "rb") as handle:
            header = handle.readline()
            if header.decode("ascii", errors="replace").strip() != CHAIN_HEADER:
                raise ValueError(f"bad chain header in {self.log_path}")
            for raw in handle:
                try:
                    parts = raw.rstrip(b"\n").decode("ascii").split(" ")
                except UnicodeDecodeError as exc:
                    raise ValueError(f"non-ascii bytes in record: {exc}") from None
                if len(parts) != 5:
                    raise ValueError("bad record line")
                seq = int(parts[0])
                yield (
                    ChainedEntry(seq, bytes.fromhex(parts[1]), bytes.fromhex(parts[2]), bytes.fromhex(parts[3])),
                    base64.b64decode(parts[4], validate=True),
                )

    def verify(self) -> ChainVerification:
        """Recompute every hash; report the first tampered sequence number."""
        expected_prev = GENESIS_HASH
        expected_seq = 0
        last: ChainedEntry | None = None
        with open(self.log_path, "rb") as handle:
            header = handle.readline()
            if header.decode("ascii", errors="replace").strip() != CHAIN_HEADER:
                return ChainVerification(False, tampered_at=0, message="bad or missing chain header")
            for raw in handle:
                try:
                    line = raw.rstrip(b"\n").decode("ascii")
                    parts = line.split(" ")
                    if len(parts) != 5:
                        raise ValueError("bad field count")
                    seq = int(parts[0])
                    prev_hash = bytes.fromhex(parts[1])
                    payload_hash = bytes.fromhex(parts[2])
                    entry_hash = bytes.fromhex(parts[3])
                    payload = base64.b64decode(parts[4], validate=True)
                    # Non-canonical re-encodings (hex case, zero padding,
                    # base64 slack bits) are tampering too: every stored
                    # byte must be accountable.
                    canonical = (
                        f"{seq} {prev_hash.hex()} {payload_hash.hex()} {entry_hash.hex()} "
                        f"{base64.b64encode(payload).decode('ascii')}"
                    )
                    if line != canonical:
                        raise ValueError("non-canonical record encoding")
                except (ValueError, UnicodeDecodeError, struct.error):
                    return ChainVerification(False, tampered_at=expected_seq, message=f"unparseable record {expected_seq}")
                if seq != expected_seq:
                    return ChainVerification(False, tampered_at=expected_seq, message=f"sequence break at {expected_seq}")
                if prev_hash != expected_prev:
                    return ChainVerification(False, tampered_at=seq, message=f"broken linkage at {seq}")
                if _hash(payload) != payload_hash:
                    return ChainVerification(False, tampered_at=seq, message=f"payload hash mismatch at {seq}")
                if _hash(prev_hash + payload_hash) != entry_hash:
                    return ChainVerification(False, tampered_at=seq, message=f"entry hash mismatch at {seq}")
                expected_prev = entry_hash
                expected_seq = seq + 1
                last = ChainedEntry(seq, prev_hash, payload_hash, entry_hash)
        if last is None:
            if self.head_path.exists() and self.head_path.read_text(encoding="utf-8").strip():
                return ChainVerification(False, head_mismatch=True, message="head checkpoint names a missing entry")
            return ChainVerification(True)
        if not self.head_path.exists():
            raise StorageFailure(f"missing head checkpoint {self.head_path}")
        try:
            head_seq_text, head_hash_text = self.head_path.read_text(encoding="utf-8").split()
            head_seq = int(head_seq_text)
            head_hash = bytes.fromhex(head_hash_text)
        except ValueError:
            return ChainVerification(False, head_mismatch=True, message="unparseable head checkpoint")
        if head_seq != last.seq or head_hash != last.entry_hash:
            return ChainVerification(
                False,
                head_mismatch=True,
                message=f"head checkpoint expects seq {head_seq}, chain ends at {last.seq}",
            )
        return ChainVerification(True)


class PayloadStore:
    """Content-addressed side store for raw and sanitized output payloads."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def put(self, text: str) -> str:
        data = text.encode("utf-8")
        key = hashlib.sha256(data).hexdigest()
        path = self.directory / key
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            try:
                with open(tmp, "wb") as handle:
                    handle.write(data)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp, path)
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc
        return key

    def get(self, key: str) -> str:
        return (self.directory / key).read_text(encoding="utf-8")


def request_digest(request) -> str:
    """Stable digest of a canonical access-request serialization."""
    from .policy.model import TimeOfDay  # local import to avoid a cycle

    def plain(value):
        if isinstance(value, TimeOfDay):
            return {"time": value.minutes}
        if isinstance(value, frozenset):
            return {"set": sorted(value)}
        return value

    doc = {
        "subject": {k: plain(v) for k, v in sorted(request.subject.entries.items())},
        "resource": {k: plain(v) for k, v in sorted(request.resource.entries.items())},
        "action": request.action,
        "environment": {k: plain(v) for k, v in sorted(request.environment.entries.items())},
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode("utf-8")).hexdigest()


class AuditLedger:
    """Dual logging: a decision chain and an interaction chain, plus payloads."""

    DECISION = "decision"
    INTERACTION = "interaction"

    def __init__(self, directory):
        self.directory = Path(directory)
        self.decision_chain = HashChain(self.directory, self.DECISION)
        self.interaction_chain = HashChain(self.directory, self.INTERACTION)
        self.payloads = PayloadStore(self.directory / "payloads")
        self._decision_lock = threading.Lock()
        self._interaction_lock = threading.Lock()

    def record_decision(self, entry: DecisionLogEntry) -> ChainedEntry:
        with self._decision_lock:
            return self.decision_chain.append(encode_entry(entry))

    def record_interaction(self, entry: InteractionLogEntry) -> ChainedEntry:
        with self._interaction_lock:
            return self.interaction_chain.append(encode_entry(entry))

    def store_payload(self, text: str) -> str:
        return self.payloads.put(text)

    def load_payload(self, key: str) -> str:
        return self.payloads.get(key)

    def verify(self) -> dict:
        return {
            self.DECISION: self.decision_chain.verify(),
            self.INTERACTION: self.interaction_chain.verify(),
        }

    def query(self, session_id: str | None = None, start_ms: int | None = None, end_ms: int | None = None) -> list:
        """Decoded entries from both chains, filtered, in time order."""
        results = []
        for kind, chain in ((self.DECISION, self.decision_chain), (self.INTERACTION, self.interaction_chain)):
            for chained, payload in chain.entries():
                entry = decode_entry(payload)
                if session_id is not None and entry.session_id != session_id:
                    continue
                if start_ms is not None and entry.timestamp_ms < start_ms:
                    continue
                if end_ms is not None and entry.timestamp_ms > end_ms:
                    continue
                results.append((kind, chained.seq, entry))
        results.sort(key=lambda item: (item[2].timestamp_ms, item[0], item[1]))
        return results
