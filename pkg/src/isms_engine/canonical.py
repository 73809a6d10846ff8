"""Canonical JSON serialization and entity digests.

Audit hashes must be reproducible across implementations, so everything that
gets hashed or exported goes through one canonical form: sorted keys, UTF-8,
no insignificant whitespace.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def entity_digest(doc: Any) -> str:
    """Hex SHA-256 of the canonical serialization of an entity document."""
    return hashlib.sha256(canonical_bytes(doc)).hexdigest()
