"""Seed derivation so every stochastic component gets its own reproducible stream."""

from __future__ import annotations

import hashlib
import random

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, label: str) -> int:
    """Hash ``(seed, label)`` into a 64-bit sub-seed."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed & _MASK64).to_bytes(8, "little"))
    h.update(label.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def py_rng(seed: int, label: str = "") -> random.Random:
    return random.Random(derive_seed(seed, label))


def np_rng(seed: int, label: str = "") -> np.random.Generator:
    return np.random.Generator(np.random.Philox(derive_seed(seed, label)))


def child_seed(rng: random.Random) -> int:
    """Draw a fresh 64-bit seed from an existing stream."""
    return rng.getrandbits(64)
