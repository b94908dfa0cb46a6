"""Stable seed derivation so corpus items are order- and worker-independent."""

from __future__ import annotations

import hashlib
import random


def stable_hash(*parts) -> int:
    """64-bit integer hash of the argument tuple, stable across processes."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(*parts) -> random.Random:
    return random.Random(stable_hash(*parts))
