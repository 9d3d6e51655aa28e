from numpy.random import Generator
from util.exceptions import ConfigError
import numpy as np


def clause_dropout(rng: Generator, slots: int, rate: float, min_keep: int = 2) -> np.ndarray:
    """
    Active-slot mask: drop each slot with probability rate, then revive dropped
    slots uniformly at random until at least min_keep are active
    """
    if min_keep > slots:
        raise ConfigError(f'min_keep ({min_keep}) exceeds the number of slots ({slots})')
    active = rng.random(slots) >= rate
    deficit = min_keep - int(active.sum())
    if deficit > 0:
        revive = rng.choice(np.flatnonzero(~active), size=deficit, replace=False)
        active[revive] = True
    return active


def batch_dropout(rng: Generator, batch: int, slots: int, rate: float, min_keep: int = 2) -> np.ndarray:
    """
    (batch, slots) masks, one independent draw per episode
    """
    return np.stack([clause_dropout(rng, slots, rate, min_keep) for _ in range(batch)])
