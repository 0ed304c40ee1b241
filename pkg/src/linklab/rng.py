"""Deterministic named random streams derived from a single master seed.

Every stage of the pipeline (splitting, training, sampling, perturbation)
draws from its own stream, so changing how much randomness one stage
consumes never perturbs any other stage.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK = (1 << 64) - 1


def _entropy_words(seed: int, scope: tuple) -> list[int]:
    words = [int(seed) & _MASK]
    for part in scope:
        if isinstance(part, str):
            digest = hashlib.sha256(part.encode("utf-8")).digest()
            words.append(int.from_bytes(digest[:8], "little"))
        else:
            words.append(int(part) & _MASK)
    return words


def stream(seed: int, *scope: int | str) -> np.random.Generator:
    """Return the RNG uniquely determined by ``seed`` and a scope path.

    The same (seed, scope) always yields an identical stream; distinct
    scopes yield statistically independent streams.
    """
    return np.random.default_rng(np.random.SeedSequence(_entropy_words(seed, scope)))


def derive_seed(seed: int, *scope: int | str) -> int:
    """Collapse a scoped stream into a plain integer seed."""
    return int(stream(seed, *scope).integers(0, 1 << 62))
