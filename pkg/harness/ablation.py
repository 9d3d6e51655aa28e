"""
Loss ablations: the base configuration and one variant per removed loss
component, all trained from the same seeds and scored on the complexity grid and
on any supplied real datasets.
"""
from dataclass.checkpoint import Checkpoint
from dataclass.dataset import BinarizedDataset, DatasetManifest
from dataclass.report import ExperimentReport, HarnessConfig
from dataclass.run_config import UciConfig
from dataclass.train_config import TrainConfig
from dataclasses import replace
from pathlib import Path
from training.trainer import SLOTS_CSV, train
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
from uci.zero_shot import zero_shot_eval
from util.enums import AblationTarget, ExperimentFamily
from views.csv_views import read_table, write_json
from .synthetic import complexity_grid
import logging
import numpy as np


logger = logging.getLogger(__name__)

FULL = 'full'

# Loss weight zeroed by each ablation
DROPPED_WEIGHT = {
    AblationTarget.CF: 'lambda_cf',
    AblationTarget.MAX_MARGIN: 'lambda_m',
    AblationTarget.SLOT_BALANCE: 'lambda_b',
}


def variant_config(base: TrainConfig, target: Optional[AblationTarget]) -> TrainConfig:
    if target is None:
        return base
    return replace(base, loss=replace(base.loss, **{DROPPED_WEIGHT[target]: 0.0}))


def final_usage_variance(run_dir: Union[str, Path]) -> float:
    slots = read_table(Path(run_dir) / SLOTS_CSV)
    if slots.empty:
        return float('nan')
    return float(slots['usage_variance'].iloc[-1])


def evaluate_variant(name: str, checkpoint: Checkpoint, run_dir: Path, harness_cfg: HarnessConfig,
                     uci_cfg: UciConfig, datasets: Sequence[Tuple[DatasetManifest, BinarizedDataset]],
                     threads: int) -> Dict[str, Any]:
    grid = complexity_grid(checkpoint, harness_cfg, threads)
    write_json(run_dir / 'complexity_grid.json', grid.to_dict())

    uci_accuracy = {}
    for manifest, dataset in datasets:
        result = zero_shot_eval(checkpoint, dataset, manifest, uci_cfg, threads)
        uci_accuracy[dataset.name] = result.headline.mean_accuracy
    uci_values = [v for v in uci_accuracy.values() if not np.isnan(v)]

    return {
        'variant': name,
        'checkpoint_hash': checkpoint.sha256 or '',
        'grid_accuracy': float(np.mean(grid.column('accuracy'))),
        'grid_match_rate': float(np.mean(grid.column('logical_match_rate'))),
        'uci_accuracy': float(np.mean(uci_values)) if uci_values else float('nan'),
        'uci_per_dataset': uci_accuracy,
        'usage_variance': final_usage_variance(run_dir),
        'avg_clauses': float(np.mean(grid.column('avg_clauses'))),
        'avg_literals': float(np.mean(grid.column('avg_literals')))
    }


def ablation_suite(base_cfg: TrainConfig, out_dir: Union[str, Path], harness_cfg: Optional[HarnessConfig] = None,
                   uci_cfg: Optional[UciConfig] = None,
                   datasets: Sequence[Tuple[DatasetManifest, BinarizedDataset]] = (),
                   targets: Optional[Sequence[AblationTarget]] = None, threads: int = 1) -> ExperimentReport:
    """
    Train and score the full objective plus each requested ablation
    """
    harness_cfg = harness_cfg or HarnessConfig()
    uci_cfg = uci_cfg or UciConfig()
    targets = list(targets) if targets is not None else list(AblationTarget)
    out_dir = Path(out_dir)

    variants: List[Tuple[str, Optional[AblationTarget]]] = [(FULL, None)] + [(t.value, t) for t in targets]
    rows = []
    for name, target in variants:
        run_dir = out_dir / name
        cfg = variant_config(base_cfg, target)
        logger.info(f'Ablation variant "{name}": training {cfg.steps} steps into {run_dir}')
        checkpoint = train(cfg, run_dir, threads)
        rows.append(evaluate_variant(name, checkpoint, run_dir, harness_cfg, uci_cfg, datasets, threads))

    report = ExperimentReport(
        family=ExperimentFamily.ABLATION.value,
        axes={'variant': [name for name, _ in variants]},
        checkpoint_hash=rows[0]['checkpoint_hash'],
        seeds=list(harness_cfg.seeds),
        grid_spec={'train': base_cfg.to_dict(), 'eval': harness_cfg.to_dict(), 'datasets': [d.name for _, d in datasets]}
    )
    full = rows[0]
    for row in rows:
        row['delta_grid_accuracy'] = row['grid_accuracy'] - full['grid_accuracy']
        row['delta_uci_accuracy'] = row['uci_accuracy'] - full['uci_accuracy']
        report.add_cell(**row, seeds=list(harness_cfg.seeds))

    report.summary = {
        'full_best_grid': all(full['grid_accuracy'] >= r['grid_accuracy'] for r in rows[1:]),
        'max_avg_clauses': max(r['avg_clauses'] for r in rows),
        'slots': base_cfg.model.T
    }
    if datasets:
        report.summary['full_best_uci'] = all(full['uci_accuracy'] >= r['uci_accuracy'] for r in rows[1:])
    balance = report.find(variant=AblationTarget.SLOT_BALANCE.value)
    if balance and full['usage_variance'] > 0:
        report.summary['balance_variance_ratio'] = balance[0]['usage_variance'] / full['usage_variance']
    return report
