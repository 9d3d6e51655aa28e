from autograd import Tensor
from dataclass.loss_weights import LossBreakdown, LossWeights
from dataclass.model_config import GateOutputs, STATS_FEATURES
from losses.objective import (balance_losses, counterfactual_losses, coverage_loss, entropy_and_repulsion,
                              max_margin_loss, responsibilities, slot_usage, total_loss, usage_variance)
from model.batch import make_batch
from model.nri import NriModel
from util.exceptions import ConfigError
import numpy as np
import pytest


def test_coverage_at_one_half_is_ln2():
    y_hat = Tensor(np.full((2, 3), 0.5))
    y = np.array([[1, 0, 1], [0, 0, 1]])
    assert coverage_loss(y_hat, y, np.ones((2, 3), dtype=bool)).item() == pytest.approx(np.log(2.0))


def test_coverage_ignores_padded_rows():
    y_hat = Tensor(np.array([[0.5, 0.01]]))
    y = np.array([[1, 1]])
    loss = coverage_loss(y_hat, y, np.array([[True, False]]))
    assert loss.item() == pytest.approx(np.log(2.0))


def test_balance_on_one_hot_usage():
    w = np.zeros((1, 8))
    w[0, 0] = 1.0
    _, cv_norm, _ = balance_losses(Tensor(w))
    assert cv_norm.item() == pytest.approx(448.0, rel=1e-4)


def test_balance_on_uniform_gates():
    switch, cv_norm, cv_raw = balance_losses(Tensor(np.full((4, 4), 0.5)))
    assert switch.item() == pytest.approx(1.0)
    assert cv_norm.item() == pytest.approx(0.0, abs=1e-9)
    assert cv_raw.item() == pytest.approx(0.0, abs=1e-9)


def test_usage_variance():
    assert usage_variance(np.full(4, 0.3)) == 0.0
    assert usage_variance(np.zeros(4)) == 0.0
    assert usage_variance(np.array([1.0, 0.0])) == pytest.approx(1.0)
    np.testing.assert_allclose(slot_usage(np.array([[1.0, 0.0], [0.0, 0.0]])), [0.5, 0.0])


@pytest.mark.parametrize('C, expected', [
    ([[0.9, 0.2], [0.1, 0.05]], 0.0),
    ([[0.5, 0.4], [0.1, 0.05]], 0.2),
    ([[0.9, 0.2], [0.5, 0.05]], 0.2),
])
def test_max_margin(C, expected):
    loss = max_margin_loss(Tensor(np.array([C])), np.array([[1, 0]]), np.ones((1, 2), dtype=bool))
    assert loss.item() == pytest.approx(expected)


def test_max_margin_skips_dropped_slots():
    C = Tensor(np.array([[[0.9, 0.5]]]))
    loss = max_margin_loss(C, np.array([[1]]), np.ones((1, 1), dtype=bool), np.array([[False, True]]))
    assert loss.item() == pytest.approx(0.2)


def test_repulsion_extremes():
    lit_mask = np.ones((1, 4), dtype=bool)
    w = Tensor(np.ones((1, 2)))
    _, same = entropy_and_repulsion(Tensor(np.array([[[0.8, 0.0, 0.3, 0.0]] * 2])), w, lit_mask)
    assert same.item() == pytest.approx(1.0, abs=1e-5)
    _, apart = entropy_and_repulsion(Tensor(np.array([[[0.8, 0.0, 0.0, 0.0], [0.0, 0.0, 0.6, 0.0]]])), w, lit_mask)
    assert apart.item() == pytest.approx(0.0, abs=1e-9)


def test_entropy_vanishes_for_hard_gates():
    z = Tensor(np.array([[[1.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]]]))
    ent, _ = entropy_and_repulsion(z, Tensor(np.array([[1.0, 0.0]])), np.ones((1, 4), dtype=bool))
    assert ent.item() == 0.0


def test_responsibilities_exclude_dropped_slots():
    r = responsibilities(Tensor(np.array([[[1.0, 1.0, 1.0]]])), np.array([[True, False, True]])).data
    np.testing.assert_allclose(r[0, 0], [0.5, 0.0, 0.5])


def _hand_gates(batch, z_rows, w_row):
    z = np.array([z_rows])
    w = np.array([w_row])
    lits = batch.exec_lits
    C = np.prod(1.0 - z[:, None, :, :] * (1.0 - lits[:, :, None, :]), axis=-1)
    y_hat = 1.0 - np.prod(1.0 - w[:, None, :] * C, axis=-1)
    return GateOutputs(z=Tensor(z), w=Tensor(w), p=None, s=None, lit_mask=batch.lit_mask,
                       C=Tensor(C), y_hat=Tensor(y_hat))


def test_counterfactual_terms_for_duplicated_exact_clause(and_not_episode):
    batch = make_batch([and_not_episode])
    clause = [1.0, 0.0, 0.0, 1.0]
    nec, spur, ovl, cf_bal = counterfactual_losses(_hand_gates(batch, [clause, clause], [1.0, 1.0]), batch)
    assert nec.item() == pytest.approx(0.0)
    assert spur.item() == pytest.approx(0.0)
    assert ovl.item() == pytest.approx(1.0)
    assert cf_bal.item() == pytest.approx(-np.log(2.0))


def test_counterfactual_terms_need_positives(and_not_episode):
    episode = and_not_episode.subset(np.flatnonzero(~and_not_episode.y))
    # Single-class episodes have no statistics; zeros stand in for them
    batch = make_batch([episode], [np.zeros((4, STATS_FEATURES))])
    terms = counterfactual_losses(_hand_gates(batch, [[0.5] * 4, [0.5] * 4], [0.5, 0.5]), batch)
    assert all(term.item() == 0.0 for term in terms)


@pytest.mark.parametrize('weights', [LossWeights(), LossWeights(lambda_cf=0.0)])
def test_breakdown_recombines_to_total(tiny_model, tiny_store, small_episodes, weights):
    batch = make_batch(small_episodes)
    gates = NriModel(tiny_model, tiny_store).forward(batch, np.ones((batch.size, tiny_model.T), dtype=bool))
    loss, breakdown = total_loss(gates, batch, weights)
    assert breakdown.recombine(weights) == pytest.approx(loss.item(), rel=1e-5)
    assert breakdown.bal == pytest.approx(breakdown.bal_switch + breakdown.bal_cv_norm + breakdown.bal_cv_raw, rel=1e-5)
    if weights.lambda_cf == 0.0:
        assert breakdown.nec == breakdown.spur == breakdown.ovl == breakdown.cf_bal == 0.0

    loss.backward()
    assert np.any(tiny_store['gate.bias'].grad != 0.0)
    assert len(breakdown.as_row(3)) == len(LossBreakdown.columns())


def test_loss_weight_validation():
    with pytest.raises(ConfigError):
        LossWeights(lambda_b=-1.0)
    with pytest.raises(ConfigError):
        LossWeights(tau_pos=0.2, tau_neg=0.3)
