"""Splittable deterministic random streams.

One root seed per environment instance; every subsystem derives its own
stream from a string label, so adding a consumer never perturbs the draws
seen by existing ones.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _label_key(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:16], "little")


def stream(seed: int, label: str) -> np.random.Generator:
    """Return an independent Philox stream for (seed, label)."""
    return np.random.Generator(np.random.Philox(key=_label_key(seed, label)))


def entropy_seed() -> int:
    """Draw a fresh root seed from OS entropy (used when none is given)."""
    return int(np.random.SeedSequence().entropy % (2**63))
