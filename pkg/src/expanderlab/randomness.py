"""Seeded, splittable random streams.

All stochastic entry points in this package take an explicit seed, a
``numpy.random.SeedSequence`` or an already-built ``Generator``; there is no
ambient randomness.  Streams are backed by the counter-based Philox bit
generator so that independent child streams spawned from one root seed are
reproducible bit-for-bit across platforms and across parallel schedules.
"""

from __future__ import annotations

import numpy as np

RngSource = "int | np.random.SeedSequence | np.random.Generator | None"


def seed_sequence(source, default_seed: int | None = None) -> np.random.SeedSequence:
    """Normalize ``source`` into a SeedSequence.

    ``source`` may be an int seed or a SeedSequence.  ``None`` falls back to
    ``default_seed``; if both are None a ValueError is raised (seeds are
    mandatory, no ambient entropy).
    """
    if source is None:
        source = default_seed
    if source is None:
        raise ValueError("a seed is required; ambient randomness is not allowed")
    if isinstance(source, np.random.SeedSequence):
        return source
    return np.random.SeedSequence(int(source))


def make_rng(source, default_seed: int | None = None) -> np.random.Generator:
    """Build a Philox-backed Generator from a seed, SeedSequence or Generator."""
    if isinstance(source, np.random.Generator):
        return source
    return np.random.Generator(np.random.Philox(seed_sequence(source, default_seed)))


def spawn(source, n: int) -> list[np.random.SeedSequence]:
    """Spawn ``n`` independent child SeedSequences from a seed or SeedSequence."""
    return seed_sequence(source).spawn(n)


def coins_of(source) -> tuple | None:
    """JSON-friendly transcript of the entropy behind a stream.

    Returns ``(entropy, spawn_key)`` for a SeedSequence or plain seed, or
    None for an opaque Generator (whose past draws are not reconstructible).
    """
    if isinstance(source, np.random.Generator):
        return None
    ss = seed_sequence(source)
    entropy = ss.entropy
    if isinstance(entropy, (list, tuple)):
        entropy = tuple(int(e) for e in entropy)
    else:
        entropy = int(entropy)
    return (entropy, tuple(int(k) for k in ss.spawn_key))
