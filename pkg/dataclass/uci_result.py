from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional
import numpy as np


@dataclass
class FoldResult:
    fold: int
    support_rows: int
    eval_rows: int
    accuracy: Optional[float] = None
    majority_accuracy: Optional[float] = None
    rule: str = ''
    clauses: int = 0
    literals: int = 0
    skipped: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ClassResult:
    dataset: str
    target_class: str
    folds: List[FoldResult] = field(default_factory=list)

    @property
    def used(self) -> List[FoldResult]:
        return [f for f in self.folds if not f.skipped]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean([f.accuracy for f in self.used])) if self.used else float('nan')

    @property
    def std_accuracy(self) -> float:
        # Sample std over folds
        return float(np.std([f.accuracy for f in self.used], ddof=1)) if len(self.used) > 1 else 0.0

    @property
    def majority_accuracy(self) -> float:
        return float(np.mean([f.majority_accuracy for f in self.used])) if self.used else float('nan')

    @property
    def avg_clauses(self) -> float:
        return float(np.mean([f.clauses for f in self.used])) if self.used else 0.0

    @property
    def avg_literals(self) -> float:
        return float(np.mean([f.literals for f in self.used])) if self.used else 0.0

    def summary(self, headline: bool = False) -> Dict[str, Any]:
        return {
            'dataset': self.dataset,
            'class': self.target_class,
            'headline': headline,
            'mean_accuracy': self.mean_accuracy,
            'std_accuracy': self.std_accuracy,
            'majority_accuracy': self.majority_accuracy,
            'folds_used': len(self.used),
            'avg_clauses': self.avg_clauses,
            'avg_literals': self.avg_literals
        }


@dataclass
class DatasetResult:
    dataset: str
    headline_class: str
    num_features: int
    classes: Dict[str, ClassResult] = field(default_factory=dict)

    @property
    def headline(self) -> ClassResult:
        return self.classes[self.headline_class]
