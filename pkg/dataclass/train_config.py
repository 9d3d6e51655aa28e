from dataclasses import asdict, dataclass, field
from typing import Any, Dict
from util.exceptions import ConfigError
from .episode import GenConfig
from .loss_weights import LossWeights
from .model_config import ModelConfig


@dataclass
class TrainConfig:
    steps: int = 2000
    batch_episodes: int = 256
    lr: float = 6e-4
    weight_decay: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    grad_clip: float = 1.0
    clause_dropout: float = 0.25
    min_keep: int = 2
    seed: int = 0
    checkpoint_every: int = 500
    gen: GenConfig = field(default_factory=GenConfig)
    loss: LossWeights = field(default_factory=LossWeights)
    model: ModelConfig = field(default_factory=ModelConfig)

    def __post_init__(self):
        if self.batch_episodes < 1:
            raise ConfigError('train.batch_episodes must be at least 1')
        if self.steps < 0:
            raise ConfigError('train.steps must be non-negative')
        if not 0.0 <= self.clause_dropout <= 1.0:
            raise ConfigError('train.clause_dropout must lie in [0, 1]')
        if self.min_keep < 2 or self.min_keep > self.model.T:
            raise ConfigError(f'train.min_keep must lie in [2, T={self.model.T}]')

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['gen'] = self.gen.to_dict()
        return data
