from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple
from util.exceptions import ConfigError


@dataclass
class HarnessConfig:
    episodes_per_cell: int = 50
    seeds: List[int] = field(default_factory=lambda: [0, 1, 2])
    heldout_rows: int = 256
    m_range: Tuple[int, int] = (24, 48)
    grid_n: int = 12
    grid_k: List[int] = field(default_factory=lambda: [1, 2, 3, 4])
    grid_l: List[int] = field(default_factory=lambda: [1, 2, 3])
    noise_rates: List[float] = field(default_factory=lambda: [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3])
    distractor_counts: List[int] = field(default_factory=lambda: [0, 4, 8, 16, 32])
    distractor_rhos: List[float] = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    scaling_n: List[int] = field(default_factory=lambda: [16, 32, 64, 128, 256, 512])
    scaling_m: List[int] = field(default_factory=lambda: [32, 64, 128, 256, 512])
    scaling_fixed_n: int = 64
    scaling_fixed_m: int = 128
    scaling_repeats: int = 5
    scaling_warmup: int = 2
    top_k: int = 0

    def __post_init__(self):
        self.m_range = tuple(int(v) for v in self.m_range)
        if self.episodes_per_cell < 1 or not self.seeds:
            raise ConfigError('eval.episodes_per_cell must be positive and eval.seeds non-empty')
        if self.heldout_rows < 1:
            raise ConfigError('eval.heldout_rows must be positive')

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['m_range'] = list(self.m_range)
        return data


@dataclass
class ExperimentReport:
    family: str
    axes: Dict[str, List[Any]]
    cells: List[Dict[str, Any]] = field(default_factory=list)
    checkpoint_hash: str = ''
    seeds: List[int] = field(default_factory=list)
    grid_spec: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)

    def add_cell(self, **values):
        for key in ('logical_match_rate', 'accuracy'):
            rate = values.get(key)
            if rate is not None and not 0.0 <= rate <= 1.0:
                raise ValueError(f'{key}={rate} is not a rate')
        self.cells.append(values)

    def column(self, name: str) -> List[Any]:
        return [cell.get(name) for cell in self.cells]

    def find(self, **where) -> List[Dict[str, Any]]:
        return [c for c in self.cells if all(c.get(k) == v for k, v in where.items())]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
