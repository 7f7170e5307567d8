"""Deterministic seeded train/validation partitioning."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractViolation


def train_size(n_items: int, train_fraction: float) -> int:
    """Round-half-up share of the items that goes to training."""
    return int(math.floor(train_fraction * n_items + 0.5))


def split_dataset(item_ids, train_fraction: float, seed: int):
    """Seeded shuffle, then the first round-half-up(fraction*N) items train.

    The split is disjoint, covering, and identical for identical seeds.
    """
    items = list(item_ids)
    if not items:
        raise ContractViolation("split_dataset: no items to split")
    if not 0.0 < train_fraction < 1.0:
        raise ContractViolation(
            f"split_dataset: train_fraction must be in (0, 1), got {train_fraction}")
    order = np.random.default_rng(seed).permutation(len(items))
    shuffled = [items[i] for i in order]
    n_train = train_size(len(items), train_fraction)
    return shuffled[:n_train], shuffled[n_train:]
