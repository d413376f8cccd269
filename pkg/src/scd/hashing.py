"""Content hashing and canonical serialization helpers.

Every persisted artifact is hashed with SHA-256 over its canonical byte
representation so that runs can be compared and resumed by content, never
by timestamp.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def canonical_json(obj) -> str:
    """Serialize to the one canonical JSON form used everywhere: sorted keys,
    compact separators, raw (non-escaped) Unicode."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_text(text: str) -> str:
    return sha256_bytes(text.encode("utf-8"))


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def stable_int_hash(text: str) -> int:
    """Process-independent 64-bit integer hash of a string.

    Python's builtin hash() is salted per process, so anything feeding RNG
    seeds goes through here instead.
    """
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(master_seed: int, label: str) -> int:
    """Stable per-stage seed derived from the master seed and a stage label."""
    return stable_int_hash(f"{master_seed}:{label}") % (2**31)
