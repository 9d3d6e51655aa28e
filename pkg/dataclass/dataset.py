from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union
from util.enums import ColumnType
import numpy as np


@dataclass
class DatasetManifest:
    name: str
    path: str
    label_column: str
    # A single value for binary tasks, a list of classes for one-vs-rest
    positive_label: Union[str, List[str]]
    columns: Dict[str, ColumnType] = field(default_factory=dict)
    expected_n: Optional[int] = None
    headline_class: Optional[str] = None
    # Identifier columns and the like, never binarized
    ignore_columns: List[str] = field(default_factory=list)

    @property
    def one_vs_rest(self) -> bool:
        return isinstance(self.positive_label, list)

    @property
    def classes(self) -> List[str]:
        if self.one_vs_rest:
            return [str(c) for c in self.positive_label]
        return [str(self.positive_label)]

    @property
    def headline(self) -> str:
        return self.headline_class if self.headline_class is not None else self.classes[0]


@dataclass
class BinarizedDataset:
    name: str
    feature_names: List[str]
    # 0.0 / 1.0, NaN for unknown
    X: np.ndarray
    # Raw label strings; binary targets come from target()
    labels: np.ndarray
    positive_label: str
    medians: Dict[str, float] = field(default_factory=dict)
    folds: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def y(self) -> np.ndarray:
        return self.target(self.positive_label)

    def target(self, positive_label: str) -> np.ndarray:
        return self.labels == positive_label
