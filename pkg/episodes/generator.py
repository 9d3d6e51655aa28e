from concurrent.futures import ThreadPoolExecutor
from dataclass.episode import Episode, GenConfig
from dataclass.rule import Clause, DnfRule, Literal
from dnf.evaluate import eval_boolean_rows
from numpy.random import Generator
from typing import List, Tuple
from util.exceptions import ConfigError, GenerationError
from util.rng import episode_rng
import logging
import numpy as np


logger = logging.getLogger(__name__)

MAX_RESAMPLES = 50
MAX_RULE_RESAMPLES = 1000


def _sample_clause(rng: Generator, n: int, length: int) -> Clause:
    variables = rng.choice(n, size=length, replace=False) + 1
    polarities = rng.random(length) < 0.5
    return Clause.of(Literal(int(v), bool(p)) for v, p in zip(variables, polarities))


def sample_rule(rng: Generator, n: int, k_max: int, l_max: int) -> DnfRule:
    """
    K ~ Unif{1..k_max} distinct clauses; each clause has L ~ Unif{1..min(l_max, N)}
    distinct variables with fair-coin polarities. A clause drawn twice is redrawn,
    so the rule holds exactly K clauses.
    """
    if l_max > n:
        raise ConfigError(f'l_max ({l_max}) exceeds N ({n})')
    k = int(rng.integers(1, k_max + 1))
    clauses = set()
    for _ in range(MAX_RULE_RESAMPLES):
        clauses.add(_sample_clause(rng, n, int(rng.integers(1, min(l_max, n) + 1))))
        if len(clauses) == k:
            return DnfRule(frozenset(clauses), n)
    raise GenerationError(f'{k} distinct clauses over {n} variables', MAX_RULE_RESAMPLES)


def sample_rule_exact(rng: Generator, n: int, k: int, length: int) -> DnfRule:
    """
    Rule with exactly k distinct clauses of exactly `length` literals
    """
    if length > n:
        raise ConfigError(f'clause length {length} exceeds N ({n})')
    clauses = set()
    for _ in range(MAX_RULE_RESAMPLES):
        clauses.add(_sample_clause(rng, n, length))
        if len(clauses) == k:
            return DnfRule(frozenset(clauses), n)
    raise ConfigError(f'cannot draw {k} distinct clauses of length {length} over {n} variables')


def sample_rows(rng: Generator, rule: DnfRule, n: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
    X = (rng.random((m, n)) < 0.5).astype(np.float64)
    return X, eval_boolean_rows(rule, X.astype(bool))


def fresh_rows(rule: DnfRule, n: int, count: int, rng: Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Held-out rows drawn from the same rule
    """
    return sample_rows(rng, rule, n, count)


def sample_labelled_rows(rng: Generator, rule: DnfRule, n: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rows with both classes present, or None after MAX_RESAMPLES tries
    """
    for _ in range(MAX_RESAMPLES):
        X, y = sample_rows(rng, rule, n, m)
        if 0 < y.sum() < m:
            return X, y
    return None


def attach_spurious(episode: Episode, s: int, rho: float, rng: Generator) -> Episode:
    """
    Append s two-environment spurious columns.

    Rows 1..floor(M/2) form environment 1 with P(s=1|Y=1)=rho, P(s=1|Y=0)=1-rho;
    the remaining rows form environment 2 with the correlations reversed.
    """
    if s < 0:
        raise ConfigError('spurious column count must be non-negative')
    if s == 0:
        return episode
    if not 0.0 < rho < 0.5:
        raise ConfigError(f'spurious flip rate must lie in (0, 0.5), got {rho}')

    m = episode.m
    first_env = np.arange(m) < m // 2
    p_one = np.where(episode.y, rho, 1.0 - rho)
    p_one = np.where(first_env, p_one, 1.0 - p_one)
    spurious = (rng.random((m, s)) < p_one[:, None]).astype(np.float64)

    meta = dict(episode.meta)
    meta['environment'] = np.where(first_env, 1, 2)
    return Episode(
        X=np.concatenate([episode.X, spurious], axis=1),
        y=episode.y,
        rule=episode.rule,
        n=episode.n,
        s=episode.s + s,
        meta=meta
    )


def attach_distractors(episode: Episode, d: int, rho: float, rng: Generator) -> Episode:
    """
    Append d distractors with P(d=1|Y=1)=rho and P(d=1|Y=0)=1-rho on every row
    """
    if d <= 0:
        return episode
    p_one = np.where(episode.y, rho, 1.0 - rho)
    distractors = (rng.random((episode.m, d)) < p_one[:, None]).astype(np.float64)
    return Episode(
        X=np.concatenate([episode.X, distractors], axis=1),
        y=episode.y,
        rule=episode.rule,
        n=episode.n,
        s=episode.s + d,
        meta=dict(episode.meta)
    )


def apply_label_noise(y: np.ndarray, rate: float, rng: Generator) -> np.ndarray:
    """
    Flip each label independently with probability rate
    """
    y = np.asarray(y, dtype=bool)
    if rate <= 0.0:
        return y.copy()
    return y ^ (rng.random(y.shape[0]) < rate)


def noisy_labels(y: np.ndarray, rate: float, rng: Generator) -> np.ndarray:
    """
    Label noise redrawn until both classes survive; raises after MAX_RESAMPLES draws
    """
    m = y.shape[0]
    for _ in range(MAX_RESAMPLES):
        noisy = apply_label_noise(y, rate, rng)
        if 0 < noisy.sum() < m:
            return noisy
    raise GenerationError(f'two-class labels at noise rate {rate}', MAX_RESAMPLES)


def apply_missingness(X: np.ndarray, rate: float, rng: Generator) -> np.ndarray:
    """
    Mark each cell unknown (NaN) independently with probability rate
    """
    X = np.array(X, dtype=np.float64, copy=True)
    if rate <= 0.0:
        return X
    X[rng.random(X.shape) < rate] = np.nan
    return X


def shuffle_rows(episode: Episode, rng: Generator) -> Episode:
    order = rng.permutation(episode.m)
    meta = dict(episode.meta)
    for key in ('environment', 'y_clean'):
        if key in meta:
            meta[key] = np.asarray(meta[key])[order]
    return Episode(X=episode.X[order], y=episode.y[order], rule=episode.rule, n=episode.n, s=episode.s, meta=meta)


def gen_episode(cfg: GenConfig, rng: Generator, index: int = 0) -> Episode:
    """
    One synthetic episode: rule, causal rows, spurious columns, label noise,
    missingness, then a final row shuffle
    """
    n = int(rng.integers(cfg.n_range[0], cfg.n_range[1] + 1))
    m = int(rng.integers(cfg.m_range[0], cfg.m_range[1] + 1))

    rows = None
    rule = None
    for _ in range(MAX_RULE_RESAMPLES):
        rule = sample_rule(rng, n, cfg.k_max, cfg.l_max)
        rows = sample_labelled_rows(rng, rule, n, m)
        if rows is not None:
            break
        logger.debug(f'Episode {index}: rule produced one class in {MAX_RESAMPLES} draws, resampling rule')
    if rows is None:
        raise GenerationError(f'a two-class episode with N={n}, M={m}', MAX_RULE_RESAMPLES)
    X, y = rows

    episode = Episode(X=X, y=y, rule=rule, n=n, s=0, meta={
        'seed': cfg.seed,
        'index': index,
        'config': cfg.to_dict()
    })
    episode = attach_spurious(episode, cfg.s_spurious, cfg.rho_flip, rng)
    episode.meta['y_clean'] = episode.y.copy()
    episode.y = noisy_labels(episode.meta['y_clean'], cfg.label_noise_rate, rng)
    episode.X = apply_missingness(episode.X, cfg.missing_rate, rng)
    return shuffle_rows(episode, rng)


def generate_episodes(cfg: GenConfig, start: int, count: int, threads: int = 1) -> List[Episode]:
    """
    Episodes start..start+count-1, each on its own (seed, index) stream
    """
    def build(index: int) -> Episode:
        return gen_episode(cfg, episode_rng(cfg.seed, index), index)

    indices = range(start, start + count)
    if threads <= 1 or count == 1:
        return [build(i) for i in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(build, indices))
