from autograd.param_store import ParamStore
from clients.checkpoint_client import save_checkpoint
from dataclass.checkpoint import Checkpoint
from dataclass.episode import Episode, GenConfig
from dataclass.model_config import ModelConfig
from dataclass.report import HarnessConfig
from dataclass.rule import DnfRule
from dataclass.train_config import TrainConfig
from episodes.generator import generate_episodes
from model.nri import init_params
import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run slow acceptance tests')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_model() -> ModelConfig:
    return ModelConfig(d=16, T=4, n_train=8, heads=2, decoder_layers=1, example_key_bottleneck=8)


@pytest.fixture
def tiny_store(tiny_model) -> ParamStore:
    return init_params(tiny_model, seed=3)


@pytest.fixture
def tiny_checkpoint(tiny_model, tiny_store, tmp_path) -> Checkpoint:
    checkpoint = Checkpoint(store=tiny_store, model=tiny_model, seed=3, step=0)
    save_checkpoint(checkpoint, tmp_path / 'checkpoint')
    return checkpoint


@pytest.fixture
def small_gen() -> GenConfig:
    return GenConfig(n_range=(4, 6), m_range=(12, 20), k_max=2, l_max=2, s_spurious=2, seed=11)


@pytest.fixture
def small_episodes(small_gen):
    return generate_episodes(small_gen, 0, 4)


@pytest.fixture
def and_not_episode() -> Episode:
    # y = x1 AND NOT x2 over all four assignments of (x1, x2), twice
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 2, dtype=np.float64)
    rule = DnfRule.from_lists([[(1, True), (2, False)]], 2)
    return Episode(X=X, y=X[:, 0].astype(bool) & ~X[:, 1].astype(bool), rule=rule, n=2)


@pytest.fixture
def tiny_train(tiny_model) -> TrainConfig:
    gen = GenConfig(n_range=(4, 6), m_range=(12, 16), k_max=2, l_max=2, s_spurious=2, seed=5)
    return TrainConfig(steps=2, batch_episodes=3, checkpoint_every=0, seed=5, gen=gen, model=tiny_model)


@pytest.fixture
def tiny_harness() -> HarnessConfig:
    return HarnessConfig(
        episodes_per_cell=2, seeds=[0, 1], heldout_rows=32, m_range=(12, 16), grid_n=6,
        grid_k=[1, 2], grid_l=[1, 2], noise_rates=[0.0, 0.2], distractor_counts=[0, 4], distractor_rhos=[0.5, 0.9],
        scaling_n=[8, 16], scaling_m=[16, 32], scaling_fixed_n=8, scaling_fixed_m=16, scaling_repeats=2, scaling_warmup=1
    )
