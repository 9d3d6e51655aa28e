from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional
from util.exceptions import ConfigError
import numpy as np


STATS_FEATURES = 18


@dataclass
class ModelConfig:
    d: int = 128
    T: int = 8
    n_train: int = 12
    heads: int = 4
    decoder_layers: int = 3
    example_key_bottleneck: int = 64
    ffn_mult: int = 4
    tau_z: float = 0.5
    tau_w: float = 0.5

    def __post_init__(self):
        if self.T < 2:
            raise ConfigError(f'model.T must be at least 2, got {self.T}')
        if self.d < 1 or self.d % self.heads != 0:
            raise ConfigError(f'model.heads ({self.heads}) must divide model.d ({self.d})')
        if self.n_train < 1 or self.decoder_layers < 1 or self.example_key_bottleneck < 1:
            raise ConfigError('model.n_train, model.decoder_layers and model.example_key_bottleneck must be positive')
        for name in ('tau_z', 'tau_w'):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(f'model.{name} must lie in (0, 1)')

    @property
    def head_dim(self) -> int:
        return self.d // self.heads

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GateOutputs:
    """
    Decoder outputs for a batch of episodes (leading axis B).

    Arrays are autograd tensors during training and plain numpy arrays at inference.
    """
    z: Any                      # (B, T, 2N') literal gates after pruning
    w: Any                      # (B, T) clause gates
    p: Any                      # (B, T) non-null probabilities
    s: Any                      # (B, T, d) slot states
    lit_mask: np.ndarray        # (B, 2N') valid literal columns
    C: Optional[Any] = None     # (B, M, T) clause truths
    y_hat: Optional[Any] = None  # (B, M) predictions
    slot_mask: Optional[np.ndarray] = None  # (B, T) slots active this step (clause dropout)

    def numpy(self) -> 'GateOutputs':
        """
        Detached copy holding numpy arrays only
        """
        def grab(value):
            return getattr(value, 'data', value)

        return GateOutputs(
            z=grab(self.z),
            w=grab(self.w),
            p=grab(self.p),
            s=grab(self.s),
            lit_mask=self.lit_mask,
            C=grab(self.C) if self.C is not None else None,
            y_hat=grab(self.y_hat) if self.y_hat is not None else None,
            slot_mask=self.slot_mask
        )
