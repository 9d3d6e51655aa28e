from training.dropout import batch_dropout, clause_dropout
from util.exceptions import ConfigError
from util.rng import DROPOUT, stream
import numpy as np
import pytest


@pytest.mark.parametrize('rate', [0.0, 0.25, 0.9, 1.0])
def test_min_keep_is_respected(rate):
    masks = batch_dropout(stream(0, DROPOUT, 0), 200, 8, rate, min_keep=2)
    assert masks.shape == (200, 8)
    assert masks.sum(axis=1).min() >= 2
    if rate == 0.0:
        assert masks.all()
    if rate == 1.0:
        assert np.all(masks.sum(axis=1) == 2)


def test_drop_rate_is_close_to_target():
    masks = batch_dropout(stream(1, DROPOUT, 0), 2000, 8, 0.25)
    assert abs(1.0 - masks.mean() - 0.25) < 0.02


def test_masks_depend_only_on_stream():
    a = batch_dropout(stream(4, DROPOUT, 12), 16, 8, 0.5)
    b = batch_dropout(stream(4, DROPOUT, 12), 16, 8, 0.5)
    np.testing.assert_array_equal(a, b)


def test_min_keep_above_slots_fails():
    with pytest.raises(ConfigError):
        clause_dropout(np.random.default_rng(0), 2, 0.5, min_keep=3)
