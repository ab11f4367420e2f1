"""Opaque event and entity identifiers.

Event ids carry 128 bits of randomness rendered in the familiar
8-4-4-4-12 hex layout, so collisions are out of reach for any realistic
call volume and the tokens stay copy-paste friendly in logs.
"""

from __future__ import annotations

import secrets
from hashlib import blake2b


def new_event_id() -> str:
    """Return a fresh 128-bit random identifier, e.g. ``6c1935df-…``."""
    raw = secrets.token_hex(16)
    return f"{raw[:8]}-{raw[8:12]}-{raw[12:16]}-{raw[16:20]}-{raw[20:]}"


def derive_seed(*parts) -> int:
    """Stable sub-seed from labeled parts (hash() is salted; blake2b is not)."""
    token = ":".join(str(p) for p in parts)
    return int.from_bytes(blake2b(token.encode("utf-8"), digest_size=8).digest(), "little")
