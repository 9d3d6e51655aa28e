from dataclass.episode import Episode
from dataclass.stats import Cooccurrence, FEATURE_NAMES, LiteralStatsMatrix
from dnf.evaluate import to_literals
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from util.exceptions import SingleClassEpisodeError
import numpy as np
import pandas as pd


# Up to this many literals the pairwise sums run in a fixed row order (einsum
# loops), which keeps the features bitwise stable under column permutations.
# Wider problems use BLAS.
EXACT_ORDER_MAX_LITERALS = 256


def _pair_sums(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] <= EXACT_ORDER_MAX_LITERALS:
        return np.einsum('mj,mk->jk', a, b)
    return a.T @ b


def _rates(values: np.ndarray, observed: np.ndarray, rows: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Truth rate over observed cells (0/0 -> 0.5) and observation rate
    """
    if rows is not None:
        values = values[rows]
        observed = observed[rows]
    total = values.shape[0]
    obs_count = observed.sum(axis=0).astype(np.float64)
    truth = values.sum(axis=0)
    rate = np.full(values.shape[1], 0.5)
    np.divide(truth, obs_count, out=rate, where=obs_count > 0)
    obs_rate = obs_count / total if total else np.zeros(values.shape[1])
    return rate, obs_rate


def binary_entropy(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        h = -p * np.log(p) - (1.0 - p) * np.log(1.0 - p)
    return np.where((p <= 0.0) | (p >= 1.0), 0.0, h)


def _aggregate(matrix: np.ndarray, valid: np.ndarray) -> np.ndarray:
    # Sorting fixes the summation order independently of column positions
    count = valid.sum(axis=1)
    total = np.sort(np.where(valid, matrix, 0.0), axis=1).sum(axis=1)
    out = np.zeros(matrix.shape[0])
    np.divide(total, count, out=out, where=count > 0)
    return out


def cooccurrence_matrix(lits: np.ndarray, rows: Optional[np.ndarray] = None) -> Cooccurrence:
    """
    c_jk = (1/M_jk) sum over co-observed rows of (l_j - mean_j)(l_k - mean_k), with
    means over the same co-observed rows. Pairs never co-observed get c = 0 and are
    left out of the aggregates, as is the self pair.
    """
    if rows is not None:
        lits = lits[rows]
    observed = ~np.isnan(lits)
    values = np.where(observed, lits, 0.0)
    obs_f = observed.astype(np.float64)

    counts = _pair_sums(obs_f, obs_f)
    products = _pair_sums(values, values)
    partial = _pair_sums(values, obs_f)   # partial[j, k] = sum of l_j over rows where k observed

    cov = np.zeros_like(products)
    with np.errstate(divide='ignore', invalid='ignore'):
        mean_j = partial / counts
        mean_k = partial.T / counts
        raw = products / counts - mean_j * mean_k
    np.copyto(cov, raw, where=counts > 0)

    valid = (counts > 0) & ~np.eye(cov.shape[0], dtype=bool)
    return Cooccurrence(
        cov=cov,
        counts=counts,
        mean_abs=_aggregate(np.abs(cov), valid),
        mean=_aggregate(cov, valid)
    )


def cooccurrence(episode: Episode) -> Tuple[Cooccurrence, Cooccurrence, Cooccurrence]:
    """
    Pairwise co-occurrence over all rows, positives and negatives
    """
    lits = to_literals(episode.X, unknown=np.nan)
    return (
        cooccurrence_matrix(lits),
        cooccurrence_matrix(lits, episode.y),
        cooccurrence_matrix(lits, ~episode.y)
    )


def compute_stats(episode: Episode) -> LiteralStatsMatrix:
    """
    The 18-feature statistical description of every literal of an episode
    """
    if not episode.has_both_classes:
        raise SingleClassEpisodeError(episode.y[0] if episode.m else None)
    return LiteralStatsMatrix(phi=compute_phi(episode.X, episode.y))


def compute_phi(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    lits = to_literals(X, unknown=np.nan)
    observed = ~np.isnan(lits)
    values = np.where(observed, lits, 0.0)
    pos = np.asarray(y, dtype=bool)
    neg = ~pos

    p_pos, obs_pos = _rates(values, observed, pos)
    p_neg, obs_neg = _rates(values, observed, neg)
    p_all, obs_all = _rates(values, observed, None)

    everything = cooccurrence_matrix(lits)
    positives = cooccurrence_matrix(lits, pos)
    negatives = cooccurrence_matrix(lits, neg)

    num_literals = lits.shape[1]
    sgn = (np.arange(num_literals) % 2 == 0).astype(np.float64)

    phi = np.zeros((num_literals, len(FEATURE_NAMES)))
    phi[:, 0] = p_pos
    phi[:, 1] = 1.0 - p_pos
    phi[:, 2] = obs_pos
    phi[:, 3] = p_neg
    phi[:, 4] = 1.0 - p_neg
    phi[:, 5] = obs_neg
    phi[:, 6] = p_all
    phi[:, 7] = 1.0 - p_all
    phi[:, 8] = obs_all
    phi[:, 9] = binary_entropy(p_all)
    phi[:, 10] = sgn
    phi[:, 11] = 0.0
    phi[:, 12] = everything.mean_abs
    phi[:, 13] = positives.mean_abs
    phi[:, 14] = positives.mean
    phi[:, 15] = negatives.mean_abs
    phi[:, 16] = negatives.mean
    phi[:, 17] = positives.mean - negatives.mean
    return phi


def literal_names(num_literals: int, names: Optional[Sequence[str]] = None) -> List[str]:
    """
    Row labels for a stats table: x3 / NOT x3, or dataset feature names
    """
    labels = []
    for column in range(num_literals):
        variable = column // 2
        base = names[variable] if names is not None else f'x{variable + 1}'
        labels.append(base if column % 2 == 0 else f'NOT {base}')
    return labels


def dump_stats_csv(stats: LiteralStatsMatrix, path: Union[str, Path], names: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Debug dump: one row per literal, one column per feature
    """
    frame = pd.DataFrame(stats.phi, columns=stats.feature_names)
    frame.insert(0, 'literal', literal_names(stats.num_literals, names))
    frame.to_csv(path, index=False)
    return frame
