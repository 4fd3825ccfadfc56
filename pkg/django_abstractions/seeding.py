# -*- coding: utf-8 -*-
"""Random streams.

Every stochastic routine takes either a seed or a ``numpy.random.Generator``.
Seeds are mixed with integer keys through ``SeedSequence`` and drive the
counter-based Philox bit generator, so a (root seed, keys) pair names one
stream independent of scheduling."""
import numpy as np

__all__ = ['make_rng', 'derive_rng', 'derive_seed']


def make_rng(seed=None):
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.Generator(np.random.Philox())
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def derive_seed(root_seed, *keys):
    """Integer seed for the stream named by `keys` under `root_seed`."""
    sequence = np.random.SeedSequence([int(root_seed)] + [int(key) for key in keys])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def derive_rng(root_seed, *keys):
    sequence = np.random.SeedSequence([int(root_seed)] + [int(key) for key in keys])
    return np.random.Generator(np.random.Philox(sequence))
