from autograd.gradcheck import check_store, op_suite
from autograd.param_store import ParamStore
from dataclass.episode import GenConfig
from dataclass.grad_check import GradCheckResult
from dataclass.loss_weights import LossWeights
from dataclass.model_config import ModelConfig
from dataclasses import replace
from episodes.generator import generate_episodes
from losses.objective import total_loss
from model.batch import make_batch
from model.nri import NriModel, init_params
from typing import Dict, Tuple
from util.exceptions import GradientCheckError
import logging
import numpy as np


logger = logging.getLogger(__name__)

TINY_MODEL = ModelConfig(d=32, T=4, n_train=6, heads=4)
TINY_EPISODES = GenConfig(n_range=(6, 6), m_range=(16, 16), k_max=3, l_max=3, s_spurious=0)


def tiny_model_check(seed: int = 1, samples: int = 100, episodes: int = 2) -> GradCheckResult:
    """
    Finite differences against backward() through the whole model and every
    loss term, on a small model with clause dropout off
    """
    batch = make_batch(generate_episodes(replace(TINY_EPISODES, seed=seed), 0, episodes))
    slot_mask = np.ones((episodes, TINY_MODEL.T), dtype=bool)
    weights = LossWeights()

    def loss_fn(store: ParamStore):
        gates = NriModel(TINY_MODEL, store, seed).forward(batch, slot_mask)
        return total_loss(gates, batch, weights)[0]

    result = check_store(loss_fn, init_params(TINY_MODEL, seed), samples=samples, seed=seed)
    logger.info(f'Gradient check: {result.checked} entries, max relative error {result.max_error:.2e}, '
                f'median {result.median_error:.2e}')
    return result


def op_check(seed: int = 1) -> Dict[str, GradCheckResult]:
    results = op_suite(seed)
    for name, result in results.items():
        logger.debug(f'Op {name}: max relative error {result.max_error:.2e}')
    return results


def gradient_suite(seed: int = 1, samples: int = 100) -> Tuple[Dict[str, GradCheckResult], GradCheckResult]:
    """
    Every op on its own first, then the whole model; a broken op fails before the
    model check runs, under its own name
    """
    ops = op_check(seed)
    for name, result in ops.items():
        if not result.passed:
            raise GradientCheckError(result.max_error, result.median_error, f'op "{name}"')
    logger.info(f'Gradient check: all {len(ops)} ops pass')
    return ops, tiny_model_check(seed, samples)
