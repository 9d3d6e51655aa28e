from dataclasses import dataclass, field
from typing import Any, Dict, Optional
from .model_config import ModelConfig


@dataclass
class Checkpoint:
    store: Any                                  # autograd ParamStore, moments included
    model: ModelConfig = field(default_factory=ModelConfig)
    seed: int = 0
    step: int = 0
    train: Dict[str, Any] = field(default_factory=dict)
    sha256: Optional[str] = None
    path: Optional[str] = None

    @property
    def short_hash(self) -> str:
        return (self.sha256 or 'unsaved')[:12]
