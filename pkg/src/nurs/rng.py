"""Seeded random streams.

All randomness flows through ``numpy.random.Generator`` (PCG64) handles built
here. Stream ``k`` of seed ``s`` is an independent child of ``SeedSequence(s)``,
so parallel chains never share state. Reproducible within one build only.
"""

import numpy as np


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(seed) if stream is None else np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))
