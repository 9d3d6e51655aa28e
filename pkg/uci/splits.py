from numpy.random import Generator
from typing import Tuple
from util.exceptions import ConfigError, SingleClassEpisodeError, StratificationError
from util.rng import FOLDS, stream
import numpy as np


def cv_split(labels: np.ndarray, folds: int = 5, seed: int = 0) -> np.ndarray:
    """
    Stratified fold index per row. Each class is shuffled, the classes are laid
    end to end and position i goes to fold i mod folds.
    """
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    if classes.shape[0] < 2:
        raise SingleClassEpisodeError()
    for cls, count in zip(classes, counts):
        if count < folds:
            raise StratificationError(cls, int(count), folds)

    rng = stream(seed, FOLDS, 0)
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == cls)) for cls in classes])
    assignment = np.empty(labels.shape[0], dtype=np.int64)
    assignment[order] = np.arange(labels.shape[0]) % folds
    return assignment


def support_rows(assignment: np.ndarray, fold: int, labels: np.ndarray, fraction: float,
                 rng: Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    (support, evaluation) row indices for one round. A fraction below one fold
    takes a stratified subsample of the fold; evaluation is every other row.
    """
    folds = int(assignment.max()) + 1
    share = 1.0 / folds
    if fraction > share + 1e-9:
        raise ConfigError(f'uci.support_fraction {fraction} exceeds one fold of {folds} ({share:.3f})')

    in_fold = np.flatnonzero(assignment == fold)
    if fraction >= share - 1e-9:
        support = in_fold
    else:
        keep = []
        for cls in np.unique(labels[in_fold]):
            members = in_fold[labels[in_fold] == cls]
            take = max(1, int(round(members.shape[0] * fraction / share)))
            keep.append(rng.choice(members, size=take, replace=False))
        support = np.sort(np.concatenate(keep))

    evaluation = np.setdiff1d(np.arange(assignment.shape[0]), support)
    return support, evaluation
