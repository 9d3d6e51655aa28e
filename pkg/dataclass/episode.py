from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple
from util.exceptions import ConfigError
from .rule import DnfRule
import numpy as np


@dataclass
class GenConfig:
    n_range: Tuple[int, int] = (6, 12)
    m_range: Tuple[int, int] = (24, 48)
    k_max: int = 6
    l_max: int = 4
    s_spurious: int = 3
    rho_flip: float = 0.3
    label_noise_rate: float = 0.0
    missing_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.n_range = tuple(int(v) for v in self.n_range)
        self.m_range = tuple(int(v) for v in self.m_range)
        if len(self.n_range) != 2 or self.n_range[0] < 1 or self.n_range[0] > self.n_range[1]:
            raise ConfigError(f'gen.n_range must be an ordered pair of positive counts, got {self.n_range}')
        if len(self.m_range) != 2 or self.m_range[0] < 2 or self.m_range[0] > self.m_range[1]:
            raise ConfigError(f'gen.m_range must be an ordered pair of counts >= 2, got {self.m_range}')
        if self.k_max < 1 or self.l_max < 1:
            raise ConfigError('gen.k_max and gen.l_max must be at least 1')
        if self.l_max > self.n_range[0]:
            raise ConfigError(f'gen.l_max ({self.l_max}) exceeds the smallest N ({self.n_range[0]})')
        if self.s_spurious < 0:
            raise ConfigError('gen.s_spurious must be non-negative')
        if self.s_spurious > 0 and not 0.0 < self.rho_flip < 0.5:
            raise ConfigError(f'gen.rho_flip must lie in (0, 0.5), got {self.rho_flip}')
        for name in ('label_noise_rate', 'missing_rate'):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ConfigError(f'gen.{name} must lie in [0, 1), got {rate}')

    @property
    def max_width(self) -> int:
        """
        Widest column count an episode from this config can carry
        """
        return self.n_range[1] + self.s_spurious

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['n_range'] = list(self.n_range)
        data['m_range'] = list(self.m_range)
        return data


@dataclass
class Episode:
    # X cells are 0.0 / 1.0, NaN marks an unknown cell
    X: np.ndarray
    y: np.ndarray
    rule: Optional[DnfRule]
    n: int
    s: int = 0
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=bool)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ConfigError(f'episode X {self.X.shape} and y {self.y.shape} disagree')

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def width(self) -> int:
        """
        N' = causal plus spurious columns
        """
        return self.X.shape[1]

    @property
    def positives(self) -> int:
        return int(self.y.sum())

    @property
    def has_both_classes(self) -> bool:
        return 0 < self.positives < self.m

    def subset(self, rows: np.ndarray) -> 'Episode':
        return Episode(
            X=self.X[rows],
            y=self.y[rows],
            rule=self.rule,
            n=self.n,
            s=self.s,
            meta=dict(self.meta)
        )
