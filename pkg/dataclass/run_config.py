from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional
from util.exceptions import ConfigError
from .report import HarnessConfig
from .train_config import TrainConfig


@dataclass
class UciConfig:
    manifests: List[str] = field(default_factory=list)
    folds: int = 5
    support_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError('uci.folds must be at least 2')
        if not 0.0 < self.support_fraction < 1.0:
            raise ConfigError('uci.support_fraction must lie in (0, 1)')


@dataclass
class CliConfig:
    subcommand: str
    out_dir: str
    config_path: Optional[str] = None
    overrides: Dict[str, Any] = field(default_factory=dict)
    verbosity: int = 1
    threads: int = 1
    train: TrainConfig = field(default_factory=TrainConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)
    uci: UciConfig = field(default_factory=UciConfig)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subcommand': self.subcommand,
            'out_dir': self.out_dir,
            'config_path': self.config_path,
            'overrides': dict(self.overrides),
            'verbosity': self.verbosity,
            'threads': self.threads,
            'train': self.train.to_dict(),
            'eval': self.harness.to_dict(),
            'uci': asdict(self.uci)
        }
