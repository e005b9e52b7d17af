"""Deterministic stream derivation.

Every random number in a run is traceable to a 64-bit master seed through
numpy's SeedSequence hashing, which is stable across platforms and numpy
versions.  The mixing scheme, in full, so that an independent implementation
can replay any run:

* realization k of an ensemble with master seed M draws from a PCG64
  generator seeded with ``SeedSequence(M, spawn_key=(k,))``;
* the rescue stream of that realization (used only when the bailout budget
  is positive) is the first spawned child, ``SeedSequence(M, spawn_key=(k, 0))``;
* point p of a sweep-like command runs a standalone ensemble whose master
  seed is the first uint64 of ``SeedSequence((M, tag, p))``, where tag
  identifies the command (SWEEP_TAG, SUSCEPTIBILITY_TAG, RESCUE_TAG below).

Tags are large constants so derived-seed entropy pools can never collide
with realization spawn keys.
"""

import numpy as np

SWEEP_TAG = 0x53574545_50
SUSCEPTIBILITY_TAG = 0x53555343_45
RESCUE_TAG = 0x52455343_55


def realization_streams(master_seed, index):
    """Return (main, rescue) generators for one realization."""
    main = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(index,)))
    )
    rescue = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(index, 0)))
    )
    return main, rescue


def derive_seed(master_seed, tag, index):
    """Derive an independent 64-bit master seed for a sub-experiment."""
    ss = np.random.SeedSequence((master_seed, tag, index))
    return int(ss.generate_state(1, np.uint64)[0])
