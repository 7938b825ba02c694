"""Deterministic seed derivation helpers built on numpy's SeedSequence."""

import numpy as np

_MASK64 = (1 << 64) - 1


def seed_sequence(*parts):
    """Build a SeedSequence from integer parts (negatives are wrapped to uint64).

    Composing the same parts always yields the same stream, and distinct part
    tuples yield independent streams, which is what the trainers rely on for
    reproducibility.
    """
    entropy = [int(p) & _MASK64 for p in parts]
    return np.random.SeedSequence(entropy)


def derived_rng(seed, *tags):
    """Generator seeded from a base seed plus integer purpose tags."""
    return np.random.default_rng(seed_sequence(seed, *tags))
