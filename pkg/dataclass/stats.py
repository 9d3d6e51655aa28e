from dataclasses import dataclass, field
from typing import Dict, List
import numpy as np


# Column order of the literal feature matrix
FEATURE_NAMES: List[str] = [
    'p_true_pos',       # P(l=1 | y=1)
    'p_false_pos',      # P(l=0 | y=1)
    'obs_pos',          # observation rate among positives
    'p_true_neg',       # P(l=1 | y=0)
    'p_false_neg',      # P(l=0 | y=0)
    'obs_neg',          # observation rate among negatives
    'p_true',           # P(l=1)
    'p_false',          # P(l=0)
    'obs',              # overall observation rate
    'entropy',          # H(l), natural log
    'sgn',              # 1 for x_i, 0 for NOT x_i
    'reserved',         # always 0
    'cbar',             # mean |c_jk|
    'cbar_pos_abs',     # mean |c_jk| among positives
    'cbar_pos',         # mean c_jk among positives
    'cbar_neg_abs',     # mean |c_jk| among negatives
    'cbar_neg',         # mean c_jk among negatives
    'delta_cbar',       # cbar_pos - cbar_neg
]
FEATURE_INDEX: Dict[str, int] = {name: i for i, name in enumerate(FEATURE_NAMES)}


@dataclass
class LiteralStatsMatrix:
    phi: np.ndarray
    feature_names: List[str] = field(default_factory=lambda: list(FEATURE_NAMES))

    @property
    def num_literals(self) -> int:
        return self.phi.shape[0]

    def feature(self, name: str) -> np.ndarray:
        return self.phi[:, FEATURE_INDEX[name]]


@dataclass
class Cooccurrence:
    # Pairwise c_jk over co-observed rows and the number of such rows
    cov: np.ndarray
    counts: np.ndarray
    mean_abs: np.ndarray
    mean: np.ndarray
