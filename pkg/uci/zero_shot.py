"""
Zero-shot evaluation on real tables: the checkpoint is never updated, the rule
for each round is induced from the support fold alone and scored on the rest.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclass.checkpoint import Checkpoint
from dataclass.dataset import BinarizedDataset, DatasetManifest
from dataclass.episode import Episode
from dataclass.run_config import UciConfig
from dataclass.uci_result import ClassResult, DatasetResult, FoldResult
from dnf.evaluate import rule_size, score_rows
from dnf.rule_text import print_rule
from model.inference import RuleInducer
from pathlib import Path
from tqdm import tqdm
from typing import List, Optional, Sequence, Union
from util.rng import FOLDS, stream
from util.string_util import slugify
from views.csv_views import write_rules, write_table
from .splits import cv_split, support_rows
import logging
import numpy as np


logger = logging.getLogger(__name__)

RESULTS_CSV = 'uci_results.csv'
FOLDS_CSV = 'uci_folds.csv'
RULES_DIR = 'rules'


def evaluate_fold(inducer: RuleInducer, dataset: BinarizedDataset, y: np.ndarray, support: np.ndarray,
                  evaluation: np.ndarray, fold: int, top_k: int = 0) -> FoldResult:
    result = FoldResult(fold=fold, support_rows=int(support.shape[0]), eval_rows=int(evaluation.shape[0]))
    support_y = y[support]
    if support_y.all() or not support_y.any():
        logger.warning(f'{dataset.name}: support fold {fold} holds a single class, skipping')
        result.skipped = True
        return result

    episode = Episode(X=dataset.X[support], y=support_y, rule=None, n=dataset.n)
    rule = inducer.induce(episode, top_k)
    _, predicted = score_rows(rule, dataset.X[evaluation])
    truth = y[evaluation]
    majority = bool(support_y.mean() >= 0.5)

    result.accuracy = float(np.mean(predicted == truth))
    result.majority_accuracy = float(np.mean(truth == majority))
    result.rule = print_rule(rule, dataset.feature_names)
    result.clauses, result.literals = rule_size(rule)
    return result


def zero_shot_eval(checkpoint: Checkpoint, dataset: BinarizedDataset, manifest: DatasetManifest,
                   cfg: Optional[UciConfig] = None, threads: int = 1, top_k: int = 0) -> DatasetResult:
    """
    Stratified k-fold rounds, one-vs-rest for every class the manifest lists
    """
    cfg = cfg or UciConfig()
    inducer = RuleInducer(checkpoint)
    assignment = cv_split(dataset.labels, cfg.folds, cfg.seed)
    rounds = []
    for fold in range(cfg.folds):
        support, evaluation = support_rows(assignment, fold, dataset.labels, cfg.support_fraction,
                                           stream(cfg.seed, FOLDS, fold + 1))
        rounds.append((fold, support, evaluation))

    result = DatasetResult(dataset=dataset.name, headline_class=manifest.headline, num_features=dataset.n)
    for cls in manifest.classes:
        y = dataset.target(cls)

        def job(item) -> FoldResult:
            fold, support, evaluation = item
            return evaluate_fold(inducer, dataset, y, support, evaluation, fold, top_k)

        desc = f'{dataset.name}:{cls}'
        if threads <= 1:
            folds = [job(item) for item in tqdm(rounds, desc=desc, unit='fold')]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                folds = list(tqdm(pool.map(job, rounds), total=len(rounds), desc=desc, unit='fold'))

        class_result = ClassResult(dataset=dataset.name, target_class=cls, folds=folds)
        if not class_result.used:
            logger.warning(f'{dataset.name}: every support fold for class {cls} was single-class')
        else:
            logger.info(f'{dataset.name} [{cls}]: accuracy {100 * class_result.mean_accuracy:.1f} '
                        f'+/- {100 * class_result.std_accuracy:.1f} (majority {100 * class_result.majority_accuracy:.1f})')
        result.classes[cls] = class_result
    return result


def write_uci_outputs(results: Sequence[DatasetResult], out_dir: Union[str, Path]) -> List[dict]:
    """
    uci_results.csv (one row per dataset and class), uci_folds.csv and one rule
    file per dataset under rules/
    """
    out_dir = Path(out_dir)
    (out_dir / RULES_DIR).mkdir(parents=True, exist_ok=True)
    summary, per_fold = [], []
    for result in results:
        sections = {}
        for cls, class_result in result.classes.items():
            summary.append(class_result.summary(headline=cls == result.headline_class))
            for fold in class_result.folds:
                per_fold.append({'dataset': result.dataset, 'class': cls, **fold.to_dict()})
                status = 'skipped' if fold.skipped else f'accuracy {100 * fold.accuracy:.1f}'
                sections[f'{cls} fold {fold.fold} ({status})'] = [fold.rule] if fold.rule else []
        write_rules(out_dir / RULES_DIR / f'{slugify(result.dataset)}.txt', sections)

    write_table(out_dir / RESULTS_CSV, summary)
    write_table(out_dir / FOLDS_CSV, per_fold)
    return summary
