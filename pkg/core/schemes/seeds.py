"""Stable seed derivation.

A derived seed is the first 8 bytes (little-endian) of the BLAKE2b digest of
"<master>:<tag>:<index>", so streams can be recomputed outside this package.
"""

import hashlib
from typing import List, Tuple

import numpy as np


def derive_seed(master_seed: int, tag: str, index: int) -> int:
    """64-bit seed for stream `index` of `tag` under `master_seed`."""
    digest = hashlib.blake2b(f"{master_seed}:{tag}:{index}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def trial_streams(trial_seed: int, count: int = 2) -> List[np.random.Generator]:
    """Independent generators for the pieces of one trial (source draw, encoder, ...)."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(trial_seed).spawn(count)]


def block_of(trial_index: int, trials: int, blocks: int) -> int:
    """Codebook block serving a trial; blocks partition the trials into contiguous runs."""
    return trial_index * blocks // trials


def block_count(trials: int, codebooks_per_experiment: int) -> int:
    return max(1, min(codebooks_per_experiment, trials))


def draw_pairs(probs: np.ndarray, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """n i.i.d. draws from a two-axis table, returned as the two coordinate sequences."""
    rows, cols = probs.shape
    flat = rng.choice(rows * cols, size=n, p=probs.ravel())
    return flat // cols, flat % cols
