"""Seed handling.

Every random stream is a numpy ``PCG64`` generator. A stream is addressed by a
64-bit master seed plus an integer key path (for example ``(trial, color,
purpose)``); the pair is fed to ``SeedSequence(master, spawn_key=key)``. Child
seeds handed to single-stream functions are the first 64-bit word of that
sequence's state, so each recorded seed reproduces its stream on its own.
"""

from __future__ import annotations

import secrets

import numpy as np

SEED_BITS = 64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 1 << SEED_BITS:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def fresh_seed() -> int:
    return secrets.randbits(SEED_BITS)


def rng_from_seed(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed), spawn_key=key)))


def derive_seed(master: int, *key: int) -> int:
    """64-bit child seed for the stream at ``key`` under ``master``."""
    ss = np.random.SeedSequence(check_seed(master), spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])


def permutation_from_seed(n: int, seed: int) -> list[int]:
    """Uniform permutation of ``range(n)`` (numpy's shuffle is Fisher-Yates)."""
    return [int(x) for x in rng_from_seed(seed).permutation(n)]
