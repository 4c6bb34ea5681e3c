"""Named deterministic random streams.

Every sampling stage draws from its own PCG64 generator, keyed by the master
seed plus a purpose tag (numpy ``SeedSequence`` spawn keys).  Changing how one
stage consumes randomness therefore never perturbs the others, and any run is
fully reproducible from the single 64-bit experiment seed.
"""

from __future__ import annotations

import enum

import numpy as np


class Stream(enum.IntEnum):
    """Purpose tags for the per-stage random sub-streams."""

    EDGES = 0
    KINDS = 1
    WARMUP = 2
    GRADCHECK = 3


def substream(seed: int, stream: Stream, index: int = 0) -> np.random.Generator:
    """Generator for one purpose; ``index`` splits a purpose into numbered lanes."""
    key = (int(stream), int(index)) if index else (int(stream),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))
