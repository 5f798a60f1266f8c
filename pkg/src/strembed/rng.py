"""Named, reproducible random sub-streams.

Every source of randomness in the project derives from a single master seed
through a named branch, so one integer reproduces an entire experiment and
parallel generation cannot depend on scheduling order.
"""

import zlib

import numpy as np


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def substream(master_seed, *path):
    """Return a Generator for the branch `path` of `master_seed`.

    The same (seed, path) always yields the same stream; distinct paths give
    statistically independent streams.
    """
    spawn_key = tuple(_key(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=spawn_key))
