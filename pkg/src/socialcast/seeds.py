"""Deterministic RNG substream fan-out.

One scenario seed is expanded into independent per-module, per-entity
streams, so adding or removing one entity (e.g. a video) never perturbs
the randomness consumed by any other. This is what makes
common-random-number strategy comparisons properly paired.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _spawn_key(tag: str, ids: tuple) -> tuple[int, int]:
    raw = tag.encode() + b"|" + b":".join(str(i).encode() for i in ids)
    word = int.from_bytes(hashlib.blake2s(raw, digest_size=8).digest(), "little")
    return word & 0xFFFFFFFF, word >> 32


def rng_for(seed: int, tag: str, *ids) -> np.random.Generator:
    """Independent generator for the (seed, tag, *ids) substream."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=_spawn_key(tag, ids))
    return np.random.default_rng(seq)


def derive_seed(seed: int, tag: str, *ids) -> int:
    """Stable integer sub-seed for APIs that take a plain seed."""
    return int(rng_for(seed, tag, *ids).integers(0, 2**63))
