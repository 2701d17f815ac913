"""Disk-backed, append-only, role-permissioned shared memory.

Five segment streams per run, one length-prefixed checksummed frame per
record. Agents stage writes during a round; the store assigns sequence
numbers and flushes at the round barrier, so a snapshot taken at any time is
a prefix of every later snapshot. Rejected writes never touch a segment —
they land in a separate audit stream.

Frame layout: 4-byte big-endian payload length, UTF-8 JSON payload, 4-byte
CRC32 of the payload. The JSON field names are part of the on-disk contract.
"""

from __future__ import annotations

import enum
import json
import os
import struct
import threading
import zlib
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from .clock import SystemClock, from_rfc3339, to_rfc3339
from .errors import CorruptStream, OutOfOrderRound, PermissionDenied, RoundMismatch, RunClosed


class Segment(enum.Enum):
    PROBLEM_STATE = "ProblemState"
    LITERATURE_CONTEXT = "LiteratureContext"
    KNOWLEDGE_ENTRIES = "KnowledgeEntries"
    PROOF_STATE = "ProofState"
    FEEDBACK_STATE = "FeedbackState"


class Role(enum.Enum):
    INITIALIZER = "Initializer"
    PROPOSER = "Proposer"
    VERIFIER = "Verifier"
    SYSTEM = "System"


# Proposers touch only the proof, verifiers only the feedback; the
# initializer seeds everything but feedback; the system owns run metadata.
WRITE_PERMISSIONS: dict[Role, frozenset[Segment]] = {
    Role.PROPOSER: frozenset({Segment.PROOF_STATE}),
    Role.VERIFIER: frozenset({Segment.FEEDBACK_STATE}),
    Role.INITIALIZER: frozenset(
        {
            Segment.PROBLEM_STATE,
            Segment.LITERATURE_CONTEXT,
            Segment.KNOWLEDGE_ENTRIES,
            Segment.PROOF_STATE,
        }
    ),
    Role.SYSTEM: frozenset(Segment),
}

# Commit ordering: initializer before proposers before verifiers; system
# records (run markers) sort last within a round.
ROLE_RANK = {Role.INITIALIZER: 0, Role.PROPOSER: 1, Role.VERIFIER: 2, Role.SYSTEM: 3}


def can_write(role: Role, segment: Segment) -> bool:
    return segment in WRITE_PERMISSIONS[role]


def agent_index(agent_id: str) -> int:
    """Numeric suffix of ids like proposer-2; 0 for initializer/system."""
    _, _, tail = agent_id.rpartition("-")
    return int(tail) if tail.isdigit() else 0


@dataclass(frozen=True)
class RecordDraft:
    """A record as an agent submits it, before a sequence number exists."""

    segment: Segment
    agent_id: str
    role: Role
    round: int
    content_kind: str
    content: str


@dataclass(frozen=True)
class MemoryRecord:
    sequence: int
    segment: Segment
    agent_id: str
    role: Role
    round: int
    created_at: datetime
    content_kind: str
    content: str

    def to_payload(self) -> bytes:
        doc = {
            "sequence": self.sequence,
            "segment": self.segment.value,
            "agent_id": self.agent_id,
            "role": self.role.value,
            "round": self.round,
            "created_at": to_rfc3339(self.created_at),
            "content_kind": self.content_kind,
            "content": self.content,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_payload(cls, payload: bytes) -> "MemoryRecord":
        doc = json.loads(payload.decode("utf-8"))
        return cls(
            sequence=doc["sequence"],
            segment=Segment(doc["segment"]),
            agent_id=doc["agent_id"],
            role=Role(doc["role"]),
            round=doc["round"],
            created_at=from_rfc3339(doc["created_at"]),
            content_kind=doc["content_kind"],
            content=doc["content"],
        )


_LEN = struct.Struct(">I")


def encode_frame(payload: bytes) -> bytes:
    return _LEN.pack(len(payload)) + payload + _LEN.pack(zlib.crc32(payload) & 0xFFFFFFFF)


def iter_frames(path: Path) -> Iterator[bytes]:
    """Yield frame payloads; raise CorruptStream with the failing byte offset."""
    data = path.read_bytes()
    offset = 0
    total = len(data)
    while offset < total:
        if total - offset < _LEN.size:
            raise CorruptStream(path, offset, "truncated length prefix")
        (length,) = _LEN.unpack_from(data, offset)
        body_start = offset + _LEN.size
        frame_end = body_start + length + _LEN.size
        if frame_end > total:
            raise CorruptStream(path, offset, "truncated frame body")
        payload = data[body_start : body_start + length]
        (crc,) = _LEN.unpack_from(data, body_start + length)
        if crc != (zlib.crc32(payload) & 0xFFFFFFFF):
            raise CorruptStream(path, offset, "checksum mismatch")
        yield payload
        offset = frame_end


class SharedMemory:
    """One run's shared memory: five segment logs, a manifest, an audit log.

    Staging is serialized internally and safe for concurrent agents; commit
    is exclusive. Snapshots observe committed records only.
    """

    def __init__(self, run_dir: Path, clock=None):
        self.run_dir = Path(run_dir)
        self.segments_dir = self.run_dir / "segments"
        self.manifest_path = self.run_dir / "manifest"
        self.audit_path = self.run_dir / "audit.log"
        self._clock = clock or SystemClock()
        self._lock = threading.Lock()
        self._committed: list[MemoryRecord] = []
        self._staged: list[MemoryRecord] = []
        self._last_committed_round = -1  # round 0 is the first committable round
        self._closed = False
        self.manifest: dict = {}

    # -- lifecycle ----------------------------------------------------------

    @classmethod
    def create(cls, run_dir, *, clock=None, run_id: str = "run", config_hash: str = "",
               backend_descriptor: Optional[dict] = None) -> "SharedMemory":
        store = cls(Path(run_dir), clock=clock)
        store.segments_dir.mkdir(parents=True, exist_ok=True)
        store.manifest = {
            "run_id": run_id,
            "config_hash": config_hash,
            "backend": backend_descriptor or {},
            "last_committed_round": -1,
            "record_count": 0,
            "tokens_used": 0,
            "status": "open",
        }
        store._write_manifest()
        return store

    @classmethod
    def replay(cls, run_dir, *, clock=None) -> "SharedMemory":
        """Rebuild the store from its segment streams, ready to append again."""
        store = cls(Path(run_dir), clock=clock)
        records: list[MemoryRecord] = []
        if store.segments_dir.is_dir():
            for segment in Segment:
                path = store._segment_path(segment)
                if not path.exists():
                    continue
                for payload in iter_frames(path):
                    records.append(MemoryRecord.from_payload(payload))
        records.sort(key=lambda r: r.sequence)
        store._committed = records
        if store.manifest_path.exists():
            store.manifest = json.loads(store.manifest_path.read_text("utf-8"))
            store._last_committed_round = store.manifest.get("last_committed_round", -1)
        elif records:
            store._last_committed_round = max(r.round for r in records)
        return store

    def close(self, status: str = "closed") -> None:
        with self._lock:
            self._closed = True
            self.manifest["status"] = status
            self._write_manifest()

    @property
    def closed(self) -> bool:
        return self._closed

    @property
    def current_round(self) -> int:
        """The round currently accepting staged appends."""
        return self._last_committed_round + 1

    @property
    def last_committed_round(self) -> int:
        return self._last_committed_round

    # -- writes -------------------------------------------------------------

    def append(self, draft: RecordDraft, acting_role: Role) -> MemoryRecord:
        """Stage one record for the open round.

        Permission- and round-checked immediately; durable at commit_round.
        The returned sequence number is final provided staging happens in the
        commit order (role rank, then agent index) — the orchestrator stages
        that way; commit re-sorts and reassigns otherwise.
        """
        with self._lock:
            if self._closed:
                raise RunClosed(f"run at {self.run_dir} is closed")
            if not can_write(acting_role, draft.segment):
                self._audit_denial(draft, acting_role)
                raise PermissionDenied(acting_role, draft.segment, draft.agent_id)
            if draft.round != self.current_round:
                raise RoundMismatch(
                    f"draft round {draft.round} != open round {self.current_round}"
                )
            record = MemoryRecord(
                sequence=len(self._committed) + len(self._staged) + 1,
                segment=draft.segment,
                agent_id=draft.agent_id,
                role=draft.role,
                round=draft.round,
                created_at=self._clock.now(),
                content_kind=draft.content_kind,
                content=draft.content,
            )
            self._staged.append(record)
            return record

    def discard_staged(self) -> int:
        """Drop all staged records (budget/time termination mid-round)."""
        with self._lock:
            n = len(self._staged)
            self._staged = []
            return n

    def commit_round(self, round_no: int, manifest_updates: Optional[dict] = None) -> None:
        """Assign final sequence numbers in deterministic order and flush.

        Ordering: role rank (initializer < proposer < verifier < system),
        then agent index, then per-agent emission order. An empty round is a
        valid no-op that still advances the round counter.
        """
        with self._lock:
            if self._closed:
                raise RunClosed(f"run at {self.run_dir} is closed")
            if round_no != self.current_round:
                raise OutOfOrderRound(
                    f"commit of round {round_no} but open round is {self.current_round}"
                )
            ordered = sorted(
                self._staged,
                key=lambda r: (ROLE_RANK[r.role], agent_index(r.agent_id)),
            )  # stable sort keeps per-agent emission order
            base = len(self._committed)
            finals = [replace(rec, sequence=base + i + 1) for i, rec in enumerate(ordered)]
            by_segment: dict[Segment, list[MemoryRecord]] = {}
            for rec in finals:
                by_segment.setdefault(rec.segment, []).append(rec)
            for segment, recs in by_segment.items():
                path = self._segment_path(segment)
                with open(path, "ab") as fh:
                    for rec in recs:
                        fh.write(encode_frame(rec.to_payload()))
                    fh.flush()
                    os.fsync(fh.fileno())
            self._committed.extend(finals)
            self._staged = []
            self._last_committed_round = round_no
            self.manifest["last_committed_round"] = round_no
            self.manifest["record_count"] = len(self._committed)
            if manifest_updates:
                self.manifest.update(manifest_updates)
            self._write_manifest()

    # -- reads --------------------------------------------------------------

    def snapshot(
        self, segment: Optional[Segment] = None, up_to_round: Optional[int] = None
    ) -> list[MemoryRecord]:
        """Committed records in ascending sequence order, optionally filtered."""
        with self._lock:
            records = list(self._committed)
        if segment is not None:
            records = [r for r in records if r.segment == segment]
        if up_to_round is not None:
            records = [r for r in records if r.round <= up_to_round]
        return records

    def staged_records(self) -> list[MemoryRecord]:
        with self._lock:
            return list(self._staged)

    def audit_entries(self) -> list[dict]:
        if not self.audit_path.exists():
            return []
        return [
            json.loads(line)
            for line in self.audit_path.read_text("utf-8").splitlines()
            if line.strip()
        ]

    # -- internals ----------------------------------------------------------

    def _segment_path(self, segment: Segment) -> Path:
        return self.segments_dir / f"{segment.value}.log"

    def _audit_denial(self, draft: RecordDraft, acting_role: Role) -> None:
        entry = {
            "ts": to_rfc3339(self._clock.now()),
            "agent_id": draft.agent_id,
            "role": acting_role.value,
            "segment": draft.segment.value,
            "round": draft.round,
            "reason": "permission-denied",
        }
        self.run_dir.mkdir(parents=True, exist_ok=True)
        with open(self.audit_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def _write_manifest(self) -> None:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n", "utf-8"
        )
