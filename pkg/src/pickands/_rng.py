"""Seed handling.

All randomness is drawn from numpy's PCG64.  A run is identified by one
integer master seed; the stream for replicate ``r`` of purpose ``p`` is
``PCG64(SeedSequence(seed, spawn_key=(p, r)))``, so any replicate can be
regenerated in isolation and results do not depend on execution order.
"""

import numpy as np

# purpose tags used in spawn keys
DATA = 0
MULTIPLIERS = 1


def stream(seed, *key):
    """Independent generator derived from ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
