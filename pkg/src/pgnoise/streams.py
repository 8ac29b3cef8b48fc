"""Deterministic random-stream derivation.

Every stochastic operation in this package draws from a numpy Generator built
out of a SeedSequence, and substreams are derived *statelessly* by extending
the spawn key:

    child = SeedSequence(parent.entropy, spawn_key=parent.spawn_key + (index,))

so a given (seed, index path) pair always names the same stream, regardless of
evaluation order or parallel scheduling. The tree used by the high-level
pipeline is:

    root(seed)
      -> image j          (batch CLI only; the library uses the root directly)
        -> realization i
          -> 0 = parameter sampling -> channel c in (0=R, 1=G, 2=B)
          -> 1 = noise synthesis    -> channel c

Each plane-noising consumes exactly three blocks from its channel stream, in
order: a uniform block (Poisson inversion), a normal block (large-mean Poisson
approximation), a normal block (additive Gaussian). The block sizes equal the
pixel count, independent of parameter values, so streams never shift when
parameters change.
"""

import numpy as np

PARAMS_STREAM = 0
NOISE_STREAM = 1


def as_seed_sequence(seed):
    """Coerce an int, SeedSequence or Generator into a SeedSequence.

    Generators are accepted for convenience but must still be backed by a
    SeedSequence (numpy's default) for substream derivation to be defined.
    """
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        ss = seed.bit_generator.seed_seq
        if not isinstance(ss, np.random.SeedSequence):
            raise TypeError("Generator is not backed by a SeedSequence; pass an int seed instead")
        return ss
    if isinstance(seed, (int, np.integer)):
        return np.random.SeedSequence(int(seed))
    raise TypeError(f"cannot derive a seed sequence from {type(seed).__name__}")


def substream(seed, *key):
    """Child SeedSequence at `key` below `seed` (stateless spawn)."""
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(
        entropy=ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(k) for k in key)
    )


def generator(seed, *key):
    """PCG64 Generator for the substream at `key` below `seed`."""
    if not key and isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(substream(seed, *key) if key else as_seed_sequence(seed))
