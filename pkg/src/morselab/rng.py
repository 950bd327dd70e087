"""Deterministic splittable randomness.

Every run derives all randomness from one 64-bit seed through SeedSequence
spawning, so parallel and serial executions of the same work items agree.
"""

from __future__ import annotations

import numpy as np


def root_sequence(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF)


def spawn_rngs(seed: int, n: int) -> list:
    """n independent generators derived from the seed."""
    return [np.random.default_rng(s) for s in root_sequence(seed).spawn(n)]


def task_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for a task addressed by a path of indices under the seed."""
    seq = root_sequence(seed)
    for idx in path:
        seq = seq.spawn(idx + 1)[idx]
    return np.random.default_rng(seq)
