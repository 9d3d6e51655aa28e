from dataclass.checkpoint import Checkpoint
from dataclass.episode import Episode
from dataclass.report import ExperimentReport, HarnessConfig
from episodes.generator import sample_labelled_rows, sample_rule
from model.inference import RuleInducer
from numpy.random import Generator
from threadpoolctl import threadpool_limits
from tqdm import tqdm
from typing import Dict, List, Optional, Tuple
from util.enums import ExperimentFamily
from util.exceptions import ConfigError
from util.rng import HARNESS, stream
from util.string_util import human_readable_size
import logging
import numpy as np
import time
import tracemalloc


logger = logging.getLogger(__name__)


def _episode(rng: Generator, n: int, m: int) -> Episode:
    for _ in range(1000):
        rule = sample_rule(rng, n, 2, 2)
        rows = sample_labelled_rows(rng, rule, n, m)
        if rows is not None:
            return Episode(X=rows[0], y=rows[1], rule=rule, n=n)
    raise ConfigError(f'cannot draw a two-class benchmark episode with N={n}, M={m}')


def measure(inducer: RuleInducer, episode: Episode, repeats: int, warmup: int) -> Tuple[float, int]:
    """
    Median induction latency (ms) after warm-up, and peak traced allocation (bytes)
    """
    for _ in range(warmup):
        inducer.induce(episode)
    timings = []
    for _ in range(repeats):
        started = time.perf_counter()
        inducer.induce(episode)
        timings.append((time.perf_counter() - started) * 1000.0)

    tracemalloc.start()
    try:
        inducer.induce(episode)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return float(np.median(timings)), int(peak)


def fit_exponent(sizes: List[int], values: List[float]) -> float:
    """
    Slope of log(values) against log(sizes)
    """
    slope, _ = np.polyfit(np.log(sizes), np.log(values), 1)
    return float(slope)


def scaling_bench(checkpoint: Checkpoint, cfg: Optional[HarnessConfig] = None) -> ExperimentReport:
    """
    Latency and peak memory over N at fixed M, and over M at fixed N, on one thread
    """
    cfg = cfg or HarnessConfig()
    inducer = RuleInducer(checkpoint)
    report = ExperimentReport(
        family=ExperimentFamily.SCALING.value,
        axes={'N': list(cfg.scaling_n), 'M': list(cfg.scaling_m)},
        checkpoint_hash=checkpoint.sha256 or '',
        seeds=list(cfg.seeds[:1]),
        grid_spec=cfg.to_dict()
    )
    seed = cfg.seeds[0]
    cells = [('N', n, cfg.scaling_fixed_m) for n in cfg.scaling_n] + [('M', cfg.scaling_fixed_n, m) for m in cfg.scaling_m]

    with threadpool_limits(limits=1):
        for cell_id, (axis, n, m) in enumerate(tqdm(cells, desc='scaling', unit='cell')):
            episode = _episode(stream(seed, HARNESS, cell_id), n, m)
            latency, peak = measure(inducer, episode, cfg.scaling_repeats, cfg.scaling_warmup)
            logger.debug(f'{axis} sweep: N={n} M={m} latency={latency:.2f}ms peak={human_readable_size(peak)}')
            report.add_cell(axis=axis, N=n, M=m, latency_ms=latency, peak_bytes=peak,
                            repeats=cfg.scaling_repeats, seeds=[seed])

    by_n: Dict[int, dict] = {c['N']: c for c in report.find(axis='N')}
    by_m: Dict[int, dict] = {c['M']: c for c in report.find(axis='M')}
    n_lo, n_hi = min(by_n), max(by_n)
    m_latency = [c['latency_ms'] for c in by_m.values()]
    report.summary = {
        'latency_ratio_n': by_n[n_hi]['latency_ms'] / by_n[n_lo]['latency_ms'],
        'n_increase': n_hi / n_lo,
        'latency_ratio_m': max(m_latency) / min(m_latency),
        'memory_exponent_n': fit_exponent(sorted(by_n), [by_n[n]['peak_bytes'] for n in sorted(by_n)]),
        'latency_exponent_n': fit_exponent(sorted(by_n), [by_n[n]['latency_ms'] for n in sorted(by_n)])
    }
    return report
