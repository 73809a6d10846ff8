"""Durable document store: write-ahead log, audit trail, versioning.

One NDJSON write-ahead log is the source of truth. Each committed mutation
appends exactly one line carrying the audit event and the entity documents
it wrote; the line's seq is the store version. The audit trail is mirrored
to its own NDJSON file for external consumption and is rebuilt from the log
whenever the two disagree.

Recovery tolerates a torn final line (the classic crash-mid-write case) by
dropping it with a warning; corruption anywhere earlier is unrecoverable
and reported with the byte offset of the failing record.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from typing import Iterable, Optional

from .canonical import canonical_json, entity_digest
from .errors import ConflictRetry, CorruptStore, UnknownRef
from .model import Actor

log = logging.getLogger(__name__)

WAL_FILE = "wal.ndjson"
AUDIT_FILE = "audit.ndjson"

#: Entity collections the store knows about, in canonical export order.
KINDS = (
    "assets",
    "threats",
    "vulnerabilities",
    "controls",
    "cycles",
    "risks",
    "notes",
    "nonconformities",
    "backups",
    "media",
    "restores",
    "schedules",
)


def audit_event_doc(
    *,
    seq: int,
    at: str,
    actor: Actor,
    operation: str,
    entity_id: str,
    after_hash: str,
    before_hash: Optional[str] = None,
    detail: Optional[dict] = None,
) -> dict:
    doc = {
        "seq": seq,
        "at": at,
        "actor": actor.to_doc(),
        "operation": operation,
        "entityId": entity_id,
        "afterHash": after_hash,
    }
    if before_hash is not None:
        doc["beforeHash"] = before_hash
    if detail is not None:
        doc["detail"] = detail
    return doc


class Store:
    """Single-writer versioned document store over a write-ahead log.

    Thread-safe: all commits take the writer lock, readers see the in-memory
    snapshot dict (replaced wholesale per entity, never mutated in place).
    """

    def __init__(self, data_dir: str) -> None:
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._wal_path = os.path.join(data_dir, WAL_FILE)
        self._audit_path = os.path.join(data_dir, AUDIT_FILE)
        self._lock = threading.Lock()
        self.version = 0
        self.entities: dict[str, dict[str, dict]] = {k: {} for k in KINDS}
        self.audit: list[dict] = []
        self._recover()

    # recovery

    def _recover(self) -> None:
        if not os.path.exists(self._wal_path):
            self._sync_audit_file()
            return
        with open(self._wal_path, "rb") as fh:
            data = fh.read()
        lines = data.split(b"\n")
        last_nonempty = max((i for i, l in enumerate(lines) if l), default=-1)
        offset = 0
        last_good_end = 0
        for index, raw in enumerate(lines):
            if raw == b"":
                offset += 1
                continue
            try:
                record = json.loads(raw.decode("utf-8"))
                self._validate_record(record)
            except (ValueError, KeyError, TypeError) as exc:
                if index == last_nonempty:
                    log.warning(
                        "dropping torn final log record at offset %d: %s", offset, exc
                    )
                    break
                raise CorruptStore(offset, str(exc))
            self._apply_committed(record)
            offset += len(raw) + 1
            last_good_end = offset
        if last_good_end > len(data):
            # final record intact but its newline was lost; restore it
            with open(self._wal_path, "ab") as fh:
                fh.write(b"\n")
        elif last_good_end < len(data):
            with open(self._wal_path, "r+b") as fh:
                fh.truncate(last_good_end)
        self._sync_audit_file()

    def _validate_record(self, record: dict) -> None:
        """Reject a log record before any of it touches memory state."""
        seq = record["seq"]
        if seq != self.version + 1:
            raise ValueError(f"sequence gap: expected {self.version + 1}, got {seq}")
        if not isinstance(record["audit"], dict):
            raise ValueError("audit event must be an object")
        for put in record["puts"]:
            if put["kind"] not in self.entities:
                raise ValueError(f"unknown collection {put['kind']!r}")
            if not isinstance(put["id"], str) or not isinstance(put["doc"], dict):
                raise ValueError("malformed entity write")

    def _sync_audit_file(self) -> None:
        """Make the audit mirror agree with the replayed log."""
        want = "".join(canonical_json(e) + "\n" for e in self.audit)
        have = None
        if os.path.exists(self._audit_path):
            with open(self._audit_path, "r", encoding="utf-8") as fh:
                have = fh.read()
        if have != want:
            if have is not None:
                log.warning("rebuilding audit mirror from the write-ahead log")
            with open(self._audit_path, "w", encoding="utf-8") as fh:
                fh.write(want)
                fh.flush()
                os.fsync(fh.fileno())

    # reads

    def get(self, kind: str, entity_id: str) -> dict:
        doc = self.entities[kind].get(entity_id)
        if doc is None:
            raise UnknownRef(kind, entity_id)
        return doc

    def find(self, kind: str, entity_id: str) -> Optional[dict]:
        return self.entities[kind].get(entity_id)

    def list(self, kind: str) -> list[dict]:
        return [doc for _, doc in sorted(self.entities[kind].items())]

    def audit_since(self, since_seq: int = 0) -> list[dict]:
        return [e for e in self.audit if e["seq"] > since_seq]

    # writes

    def commit(
        self,
        *,
        actor: Actor,
        operation: str,
        entity_id: str,
        at: str,
        puts: Iterable[tuple[str, str, dict]],
        primary: dict,
        before: Optional[dict] = None,
        detail: Optional[dict] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        """Atomically append one audited mutation; returns the audit event.

        ``puts`` are (kind, id, document) writes; ``primary`` is the document
        whose canonical digest becomes afterHash. Optimistic concurrency:
        a stale expected_version raises ConflictRetry and writes nothing.
        """
        with self._lock:
            if expected_version is not None and expected_version != self.version:
                raise ConflictRetry(expected_version, self.version)
            seq = self.version + 1
            event = audit_event_doc(
                seq=seq,
                at=at,
                actor=actor,
                operation=operation,
                entity_id=entity_id,
                after_hash=entity_digest(primary),
                before_hash=entity_digest(before) if before is not None else None,
                detail=detail,
            )
            record = {
                "seq": seq,
                "audit": event,
                "puts": [{"kind": k, "id": i, "doc": d} for k, i, d in puts],
            }
            line = canonical_json(record) + "\n"
            with open(self._wal_path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            with open(self._audit_path, "a", encoding="utf-8") as fh:
                fh.write(canonical_json(event) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._apply_committed(record)
            return event

    def _apply_committed(self, record: dict) -> None:
        for put in record["puts"]:
            self.entities[put["kind"]] = {
                **self.entities[put["kind"]],
                put["id"]: put["doc"],
            }
        self.audit.append(record["audit"])
        self.version = record["seq"]

    # export

    def export_doc(self) -> dict:
        """Full store state in canonical shape; byte-stable once serialized."""
        return {
            "version": self.version,
            "entities": {
                kind: dict(sorted(self.entities[kind].items())) for kind in KINDS
            },
            "audit": list(self.audit),
        }

    def export_json(self) -> str:
        return canonical_json(self.export_doc())
