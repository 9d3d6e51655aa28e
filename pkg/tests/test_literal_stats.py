from dataclass.stats import FEATURE_INDEX, FEATURE_NAMES
from stats.literal_stats import compute_phi, compute_stats, cooccurrence, cooccurrence_matrix, dump_stats_csv
from util.exceptions import SingleClassEpisodeError
import numpy as np
import pandas as pd
import pytest


def test_known_rates(and_not_episode):
    stats = compute_stats(and_not_episode)
    assert stats.phi.shape == (4, len(FEATURE_NAMES))
    # x1 is true on every positive, NOT x2 likewise
    assert stats.feature('p_true_pos')[0] == 1.0
    assert stats.feature('p_true_pos')[3] == 1.0
    assert stats.feature('p_true_neg')[0] == pytest.approx(1 / 3)
    np.testing.assert_array_equal(stats.feature('sgn'), [1, 0, 1, 0])
    np.testing.assert_array_equal(stats.feature('reserved'), 0)
    assert stats.feature('entropy')[0] == pytest.approx(np.log(2))
    np.testing.assert_array_equal(stats.feature('obs'), 1.0)


def test_single_class_rejected(and_not_episode):
    with pytest.raises(SingleClassEpisodeError):
        compute_stats(and_not_episode.subset(np.flatnonzero(~and_not_episode.y)))


def test_unobserved_literal_defaults():
    X = np.array([[1.0, np.nan], [0.0, np.nan], [1.0, np.nan], [0.0, np.nan]])
    phi = compute_phi(X, np.array([True, False, True, False]))
    assert phi[2, FEATURE_INDEX['p_true_pos']] == 0.5
    assert phi[2, FEATURE_INDEX['obs']] == 0.0
    assert phi[2, FEATURE_INDEX['cbar']] == 0.0


def test_variable_permutation_permutes_rows():
    rng = np.random.default_rng(0)
    X = (rng.random((40, 7)) < 0.5).astype(np.float64)
    X[rng.random(X.shape) < 0.1] = np.nan
    y = rng.random(40) < 0.5
    perm = rng.permutation(7)
    literal_perm = np.stack([2 * perm, 2 * perm + 1], axis=1).reshape(-1)

    phi = compute_phi(X, y)
    phi_permuted = compute_phi(X[:, perm], y)
    np.testing.assert_array_equal(phi_permuted, phi[literal_perm])


def test_label_swap_exchanges_class_features():
    rng = np.random.default_rng(1)
    X = (rng.random((30, 5)) < 0.5).astype(np.float64)
    y = rng.random(30) < 0.4
    phi = compute_phi(X, y)
    swapped = compute_phi(X, ~y)
    for a, b in (('p_true_pos', 'p_true_neg'), ('obs_pos', 'obs_neg'), ('cbar_pos', 'cbar_neg'),
                 ('cbar_pos_abs', 'cbar_neg_abs')):
        np.testing.assert_array_equal(swapped[:, FEATURE_INDEX[a]], phi[:, FEATURE_INDEX[b]])
    np.testing.assert_array_equal(swapped[:, FEATURE_INDEX['delta_cbar']], -phi[:, FEATURE_INDEX['delta_cbar']])
    np.testing.assert_array_equal(swapped[:, FEATURE_INDEX['p_true']], phi[:, FEATURE_INDEX['p_true']])


def test_complementary_literals_are_anticorrelated():
    co = cooccurrence_matrix(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]))
    assert co.cov[0, 1] == pytest.approx(-0.25)
    assert co.mean[0] == pytest.approx(-0.25)


def test_wide_episode_uses_blas_path():
    rng = np.random.default_rng(2)
    X = (rng.random((16, 140)) < 0.5).astype(np.float64)
    y = rng.random(16) < 0.5
    phi = compute_phi(X, y)
    assert phi.shape == (280, 18)
    assert np.all(np.isfinite(phi))


def test_dump_csv(and_not_episode, tmp_path):
    path = tmp_path / 'stats.csv'
    dump_stats_csv(compute_stats(and_not_episode), path, names=['a', 'b'])
    frame = pd.read_csv(path)
    assert list(frame['literal']) == ['a', 'NOT a', 'b', 'NOT b']
    assert list(frame.columns[1:]) == FEATURE_NAMES


def test_class_conditional_cooccurrence(and_not_episode):
    everything, positives, negatives = cooccurrence(and_not_episode)
    assert everything.cov.shape == positives.cov.shape == negatives.cov.shape == (4, 4)
    # Every positive row is x1=1, x2=0, so nothing varies among them
    np.testing.assert_array_equal(positives.cov, 0.0)
    assert np.any(negatives.cov != 0.0)
