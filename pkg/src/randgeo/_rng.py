"""Seeding helpers.

Every sampler in the package is a pure function of (inputs, seed). A root
seed is expanded into independent streams with ``SeedSequence(seed,
spawn_key=path)``, so replica k of an experiment always draws from the same
stream regardless of execution order or worker count.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int | None, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by (seed, path)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=path)
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, None (fresh entropy) or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(seed)
