from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List
from util.exceptions import ConfigError


@dataclass
class LossWeights:
    lambda_b: float = 0.01
    lambda_r: float = 0.01
    lambda_e: float = 0.001
    lambda_m: float = 0.5
    lambda_cf: float = 0.1
    lambda_o: float = 0.1
    lambda_c: float = 0.01
    tau_pos: float = 0.7
    tau_neg: float = 0.3
    flip_threshold: float = 0.5
    eps: float = 1e-7

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f'loss.{f.name} must be non-negative')
        if not 0.0 <= self.tau_neg < self.tau_pos <= 1.0:
            raise ConfigError('loss margins need 0 <= tau_neg < tau_pos <= 1')

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class LossBreakdown:
    cov: float = 0.0
    bal: float = 0.0
    rep: float = 0.0
    ent: float = 0.0
    mm: float = 0.0
    nec: float = 0.0
    spur: float = 0.0
    ovl: float = 0.0
    cf_bal: float = 0.0
    total: float = 0.0

    # Parts of bal, logged separately
    bal_switch: float = 0.0
    bal_cv_norm: float = 0.0
    bal_cv_raw: float = 0.0

    @staticmethod
    def columns() -> List[str]:
        return ['step'] + [f.name for f in fields(LossBreakdown)]

    def as_row(self, step: int) -> List[Any]:
        return [step] + [getattr(self, f.name) for f in fields(self)]

    def recombine(self, weights: LossWeights) -> float:
        """
        Total from the components, for checking the logged total
        """
        cf = self.nec + self.spur + weights.lambda_o * self.ovl + weights.lambda_c * self.cf_bal
        return (self.cov + weights.lambda_b * self.bal + weights.lambda_r * self.rep
                + weights.lambda_e * self.ent + weights.lambda_m * self.mm + weights.lambda_cf * cf)
