"""
Synthetic experiment families: rule complexity grid, label-noise sweep and
label-correlated distractor sweep. Each cell draws its episodes from its own
(seed, HARNESS, cell) stream, so cells can run in any order or in parallel.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclass.checkpoint import Checkpoint
from dataclass.episode import Episode
from dataclass.report import ExperimentReport, HarnessConfig
from dataclass.rule import DnfRule
from dnf.equivalence import logically_equivalent
from dnf.evaluate import mentioned_variables, rule_size, score_rows
from episodes.generator import attach_distractors, fresh_rows, noisy_labels, sample_labelled_rows, sample_rule_exact
from model.inference import RuleInducer
from numpy.random import Generator
from scipy.stats import spearmanr
from tqdm import tqdm
from typing import Any, Callable, Dict, List, Optional, Tuple
from util.enums import ExperimentFamily
from util.exceptions import GenerationError
from util.rng import HARNESS, stream
import logging
import numpy as np
import time


logger = logging.getLogger(__name__)

MAX_DRAWS = 1000


def draw_task(rng: Generator, n: int, m: int, k: int, length: int) -> Tuple[DnfRule, np.ndarray, np.ndarray]:
    """
    Rule with exactly k clauses of `length` literals, plus two-class support rows
    """
    for _ in range(MAX_DRAWS):
        rule = sample_rule_exact(rng, n, k, length)
        rows = sample_labelled_rows(rng, rule, n, m)
        if rows is not None:
            return rule, rows[0], rows[1]
    raise GenerationError(f'a two-class task with K={k}, L={length}, N={n}, M={m}', MAX_DRAWS)


def _distractor_rows(rng: Generator, y: np.ndarray, d: int, rho: float) -> np.ndarray:
    p_one = np.where(y, rho, 1.0 - rho)
    return (rng.random((y.shape[0], d)) < p_one[:, None]).astype(np.float64)


def run_episode(inducer: RuleInducer, rng: Generator, cfg: HarnessConfig, k: int, length: int,
                noise: float = 0.0, distractors: int = 0, rho: float = 0.5) -> Dict[str, Any]:
    """
    One task: induce on (possibly noisy, possibly padded) support rows, score on
    fresh clean rows drawn from the same rule
    """
    n = cfg.grid_n
    m = int(rng.integers(cfg.m_range[0], cfg.m_range[1] + 1))
    rule, X, y = draw_task(rng, n, m, k, length)

    support_y = noisy_labels(y, noise, rng)
    episode = Episode(X=X, y=support_y, rule=rule, n=n)
    if distractors:
        episode = attach_distractors(episode, distractors, rho, rng)

    heldout_X, heldout_y = fresh_rows(rule, n, cfg.heldout_rows, rng)
    if distractors:
        heldout_X = np.concatenate([heldout_X, _distractor_rows(rng, heldout_y, distractors, rho)], axis=1)

    started = time.perf_counter()
    induced = inducer.induce(episode, cfg.top_k)
    latency_ms = (time.perf_counter() - started) * 1000.0

    _, predicted = score_rows(induced, heldout_X)
    majority = bool(support_y.mean() >= 0.5)
    clauses, literals = rule_size(induced)
    return {
        'match': bool(logically_equivalent(induced, rule)),
        'accuracy': float(np.mean(predicted == heldout_y)),
        'majority_accuracy': float(np.mean(heldout_y == majority)),
        'clauses': clauses,
        'literals': literals,
        'mentions_distractor': any(v > n for v in mentioned_variables(induced)),
        'latency_ms': latency_ms
    }


def _summarize(results: List[Dict[str, Any]], per_seed: Dict[int, List[Dict[str, Any]]]) -> Dict[str, Any]:
    seed_accuracy = [np.mean([r['accuracy'] for r in rows]) for rows in per_seed.values()]
    std = float(np.std(seed_accuracy, ddof=1)) if len(seed_accuracy) > 1 else 0.0
    half_width = 1.96 * std / np.sqrt(len(seed_accuracy))
    accuracy = float(np.mean([r['accuracy'] for r in results]))
    return {
        'logical_match_rate': float(np.mean([r['match'] for r in results])),
        'accuracy': accuracy,
        'accuracy_std': std,
        'accuracy_ci_low': max(0.0, accuracy - half_width),
        'accuracy_ci_high': min(1.0, accuracy + half_width),
        'majority_accuracy': float(np.mean([r['majority_accuracy'] for r in results])),
        'avg_clauses': float(np.mean([r['clauses'] for r in results])),
        'avg_literals': float(np.mean([r['literals'] for r in results])),
        'distractor_mention_rate': float(np.mean([r['mentions_distractor'] for r in results])),
        'latency_ms': float(np.mean([r['latency_ms'] for r in results])),
        'episodes': len(results)
    }


def run_cell(cfg: HarnessConfig, cell_id: int,
             draw: Callable[[Generator], Dict[str, Any]]) -> Dict[str, Any]:
    """
    episodes_per_cell tasks for every seed, each seed on its own stream
    """
    per_seed: Dict[int, List[Dict[str, Any]]] = {}
    for seed in cfg.seeds:
        rng = stream(seed, HARNESS, cell_id)
        per_seed[seed] = [draw(rng) for _ in range(cfg.episodes_per_cell)]
    results = [r for rows in per_seed.values() for r in rows]
    return _summarize(results, per_seed)


def _mixed_draw(cfg: HarnessConfig, inducer: RuleInducer, **kwargs) -> Callable[[Generator], Dict[str, Any]]:
    # Complexity mix shared by the noise and distractor sweeps
    def draw(rng: Generator) -> Dict[str, Any]:
        k = int(rng.choice(cfg.grid_k))
        length = int(rng.choice(cfg.grid_l))
        return run_episode(inducer, rng, cfg, k, length, **kwargs)

    return draw


def _run_grid(cfg: HarnessConfig, cells: List[Tuple[Dict[str, Any], Callable]],
              threads: int, desc: str) -> List[Dict[str, Any]]:
    def job(item: Tuple[int, Tuple[Dict[str, Any], Callable]]) -> Dict[str, Any]:
        cell_id, (axes, draw) = item
        return {**axes, **run_cell(cfg, cell_id, draw)}

    items = list(enumerate(cells))
    if threads <= 1:
        return [job(item) for item in tqdm(items, desc=desc, unit='cell')]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(tqdm(pool.map(job, items), total=len(items), desc=desc, unit='cell'))


def _report(family: ExperimentFamily, axes: Dict[str, List[Any]], checkpoint: Checkpoint,
            cfg: HarnessConfig, rows: List[Dict[str, Any]]) -> ExperimentReport:
    report = ExperimentReport(
        family=family.value,
        axes=axes,
        checkpoint_hash=checkpoint.sha256 or '',
        seeds=list(cfg.seeds),
        grid_spec=cfg.to_dict()
    )
    for row in rows:
        report.add_cell(**row, seeds=list(cfg.seeds))
    return report


def complexity_grid(checkpoint: Checkpoint, cfg: Optional[HarnessConfig] = None, threads: int = 1) -> ExperimentReport:
    """
    Logical match and held-out accuracy for every (K, L) at N = grid_n
    """
    cfg = cfg or HarnessConfig()
    inducer = RuleInducer(checkpoint)
    cells = []
    for k in cfg.grid_k:
        for length in cfg.grid_l:
            cells.append(({'K': k, 'L': length},
                          lambda rng, k=k, length=length: run_episode(inducer, rng, cfg, k, length)))
    rows = _run_grid(cfg, cells, threads, 'complexity grid')
    report = _report(ExperimentFamily.COMPLEXITY_GRID, {'K': list(cfg.grid_k), 'L': list(cfg.grid_l)}, checkpoint, cfg, rows)

    non_increasing = {}
    for length in cfg.grid_l:
        rates = [report.find(K=k, L=length)[0]['logical_match_rate'] for k in cfg.grid_k]
        non_increasing[str(length)] = all(a >= b for a, b in zip(rates, rates[1:]))
    report.summary = {
        'match_non_increasing_in_k': non_increasing,
        'accuracy_at_least_match': all(c['accuracy'] >= c['logical_match_rate'] for c in report.cells)
    }
    if len(set(report.column('logical_match_rate'))) > 1:
        rho, _ = spearmanr(report.column('K'), report.column('logical_match_rate'))
        report.summary['spearman_k_match'] = float(rho)
    return report


def noise_sweep(checkpoint: Checkpoint, cfg: Optional[HarnessConfig] = None, threads: int = 1) -> ExperimentReport:
    """
    Held-out accuracy on clean rows while support labels are flipped at each rate
    """
    cfg = cfg or HarnessConfig()
    inducer = RuleInducer(checkpoint)
    cells = [({'noise_rate': rate}, _mixed_draw(cfg, inducer, noise=rate)) for rate in cfg.noise_rates]
    rows = _run_grid(cfg, cells, threads, 'noise sweep')
    report = _report(ExperimentFamily.NOISE_SWEEP, {'noise_rate': list(cfg.noise_rates)}, checkpoint, cfg, rows)

    by_rate = {c['noise_rate']: c['accuracy'] for c in report.cells}
    low, high = min(by_rate), max(by_rate)
    report.summary = {'accuracy_drop_pp': 100.0 * (by_rate[low] - by_rate[high])}
    return report


def spurious_sweep(checkpoint: Checkpoint, cfg: Optional[HarnessConfig] = None, threads: int = 1) -> ExperimentReport:
    """
    Accuracy and distractor-mention rate for every (D, rho)
    """
    cfg = cfg or HarnessConfig()
    inducer = RuleInducer(checkpoint)
    cells = []
    for d in cfg.distractor_counts:
        for rho in cfg.distractor_rhos:
            cells.append(({'D': d, 'rho': rho}, _mixed_draw(cfg, inducer, distractors=d, rho=rho)))
    rows = _run_grid(cfg, cells, threads, 'spurious sweep')
    report = _report(ExperimentFamily.SPURIOUS_SWEEP, {'D': list(cfg.distractor_counts), 'rho': list(cfg.distractor_rhos)},
                     checkpoint, cfg, rows)
    report.summary = {'min_accuracy': float(min(report.column('accuracy')))}
    return report
