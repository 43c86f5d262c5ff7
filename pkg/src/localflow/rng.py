"""Seeded random streams.

All randomness derives from one 64-bit seed.  A stream for a given purpose
is ``SeedSequence(seed, spawn_key=keys)``, so worker ``k`` of task ``name``
always sees the same numbers regardless of scheduling or worker count.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part)
    return zlib.crc32(str(part).encode())


def stream(seed: int, *keys) -> np.random.Generator:
    seq = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(_key(k) for k in keys))
    return np.random.default_rng(seq)
