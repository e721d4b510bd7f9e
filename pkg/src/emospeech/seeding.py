"""Deterministic seed derivation so every random draw is reproducible."""

import hashlib

import numpy as np


def derive_seed(*parts) -> int:
    """Hash arbitrary parts (ints, strings, floats) into a 64-bit seed.

    The same parts always produce the same seed, on any platform, so nested
    components (splits, bootstrap draws, per-utterance jitter) can each own an
    independent generator derived from one master seed.
    """
    key = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "little")


def rng_from(*parts) -> np.random.Generator:
    """Fresh numpy generator seeded from the derived parts."""
    return np.random.default_rng(derive_seed(*parts))
