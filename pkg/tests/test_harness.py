from dataclass.rule import DnfRule
from harness.ablation import DROPPED_WEIGHT, ablation_suite, variant_config
from harness.scaling import fit_exponent, scaling_bench
from harness.synthetic import complexity_grid, draw_task, noise_sweep, spurious_sweep
from util.enums import AblationTarget
from views.csv_views import write_report
import json
import numpy as np
import pandas as pd
import pytest


RATES = ('logical_match_rate', 'accuracy', 'majority_accuracy', 'distractor_mention_rate')


def _check_rates(report):
    for cell in report.cells:
        for key in RATES:
            assert 0.0 <= cell[key] <= 1.0
        assert cell['accuracy_ci_low'] <= cell['accuracy'] <= cell['accuracy_ci_high']
        assert cell['episodes'] == 4


def test_draw_task_shapes():
    rule, X, y = draw_task(np.random.default_rng(0), 6, 16, 2, 2)
    assert X.shape == (16, 6)
    assert 0 < y.sum() < 16
    assert isinstance(rule, DnfRule)
    assert len(rule.clauses) == 2


def test_complexity_grid(tiny_checkpoint, tiny_harness, tmp_path):
    report = complexity_grid(tiny_checkpoint, tiny_harness)
    assert [(c['K'], c['L']) for c in report.cells] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    _check_rates(report)
    assert report.checkpoint_hash == tiny_checkpoint.sha256
    assert set(report.summary['match_non_increasing_in_k']) == {'1', '2'}

    path = write_report(report, tmp_path)
    assert json.loads(path.read_text())['family'] == 'complexity_grid'
    assert len(pd.read_csv(tmp_path / 'complexity_grid.csv')) == 4


def test_grid_is_reproducible_across_threads(tiny_checkpoint, tiny_harness):
    serial = complexity_grid(tiny_checkpoint, tiny_harness, threads=1)
    parallel = complexity_grid(tiny_checkpoint, tiny_harness, threads=3)
    for a, b in zip(serial.cells, parallel.cells):
        assert {k: v for k, v in a.items() if k != 'latency_ms'} == {k: v for k, v in b.items() if k != 'latency_ms'}


def test_noise_sweep(tiny_checkpoint, tiny_harness):
    report = noise_sweep(tiny_checkpoint, tiny_harness)
    assert report.column('noise_rate') == [0.0, 0.2]
    _check_rates(report)
    assert 'accuracy_drop_pp' in report.summary


def test_spurious_sweep_mentions(tiny_checkpoint, tiny_harness):
    report = spurious_sweep(tiny_checkpoint, tiny_harness)
    assert len(report.cells) == 4
    _check_rates(report)
    for cell in report.find(D=0):
        assert cell['distractor_mention_rate'] == 0.0


def test_scaling_bench(tiny_checkpoint, tiny_harness):
    report = scaling_bench(tiny_checkpoint, tiny_harness)
    assert len(report.find(axis='N')) == 2
    assert len(report.find(axis='M')) == 2
    assert all(c['latency_ms'] > 0 and c['peak_bytes'] > 0 for c in report.cells)
    assert report.summary['n_increase'] == 2.0
    assert np.isfinite(report.summary['memory_exponent_n'])


def test_fit_exponent():
    sizes = [16, 32, 64, 128]
    assert fit_exponent(sizes, [3.0 * s ** 2 for s in sizes]) == pytest.approx(2.0)


def test_variant_config_zeroes_one_weight(tiny_train):
    for target, weight in DROPPED_WEIGHT.items():
        cfg = variant_config(tiny_train, target)
        assert getattr(cfg.loss, weight) == 0.0
        others = {k: v for k, v in cfg.loss.to_dict().items() if k != weight}
        assert others == {k: v for k, v in tiny_train.loss.to_dict().items() if k != weight}
    assert variant_config(tiny_train, None) is tiny_train


def test_ablation_suite(tiny_train, tiny_harness, tmp_path):
    report = ablation_suite(tiny_train, tmp_path, tiny_harness, targets=[AblationTarget.SLOT_BALANCE])
    assert report.column('variant') == ['full', 'slot_balance']
    assert report.cells[0]['delta_grid_accuracy'] == 0.0
    assert report.summary['slots'] == tiny_train.model.T
    for name in ('full', 'slot_balance'):
        assert (tmp_path / name / 'checkpoint' / 'manifest.json').exists()
        assert (tmp_path / name / 'complexity_grid.json').exists()
