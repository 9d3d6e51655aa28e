from enum import Enum


class ColumnType(Enum):
    NUMERIC = 'numeric'
    CATEGORICAL = 'categorical'
    AUTO = 'auto'


class AblationTarget(Enum):
    CF = 'cf'
    MAX_MARGIN = 'max_margin'
    SLOT_BALANCE = 'slot_balance'


class ExperimentFamily(Enum):
    COMPLEXITY_GRID = 'complexity_grid'
    NOISE_SWEEP = 'noise_sweep'
    SPURIOUS_SWEEP = 'spurious_sweep'
    SCALING = 'scaling'
    ABLATION = 'ablation'
