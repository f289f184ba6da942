"""Seeded, counter-based random streams.

Every consumer of randomness asks for a substream keyed by ``(seed, *keys)``.
Substreams use the Philox counter-based generator, so the numbers drawn by a
task depend only on its key and never on scheduling or thread count.
"""
import zlib

import numpy as np


def _key_to_int(key):
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError("stream keys must be nonnegative")
        return int(key)
    return zlib.crc32(str(key).encode("utf-8"))


def make_rng(seed, *keys):
    """Return a ``numpy.random.Generator`` for the substream ``(seed, *keys)``.

    Keys may be nonnegative integers or strings (strings are hashed with CRC32,
    which is stable across processes and platforms).
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
