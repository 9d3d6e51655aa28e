from dataclass.rule import DnfRule
from dataclasses import dataclass
from typing import Dict, Optional
from util.rng import HARNESS, stream
import numpy as np


EXACT_LIMIT = 20
SAMPLE_COUNT = 1 << 16


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    sampled: bool
    assignments_checked: int

    def __bool__(self) -> bool:
        return self.equivalent


def _evaluate(rule: DnfRule, table: np.ndarray, column_of: Dict[int, int]) -> np.ndarray:
    result = np.zeros(table.shape[0], dtype=bool)
    for clause in rule.clauses:
        satisfied = np.ones(table.shape[0], dtype=bool)
        for lit in clause.literals:
            column = table[:, column_of[lit.variable]]
            satisfied &= column if lit.positive else ~column
        result |= satisfied
    return result


def truth_table(num_variables: int) -> np.ndarray:
    """
    All 2^n assignments as a boolean matrix
    """
    rows = np.arange(1 << num_variables, dtype=np.int64)[:, None]
    return ((rows >> np.arange(num_variables, dtype=np.int64)) & 1).astype(bool)


def logically_equivalent(a: DnfRule, b: DnfRule, seed: Optional[int] = 0) -> EquivalenceResult:
    """
    Semantic equivalence over the variables mentioned by either rule.

    Exact truth-table check up to 20 variables, otherwise agreement on 2^16
    uniform random assignments (flagged as sampled).
    """
    variables = sorted(a.variables | b.variables)
    column_of = {v: i for i, v in enumerate(variables)}

    if len(variables) <= EXACT_LIMIT:
        table = truth_table(len(variables))
        sampled = False
    else:
        rng = stream(seed or 0, HARNESS)
        table = rng.random((SAMPLE_COUNT, len(variables))) < 0.5
        sampled = True

    agree = np.array_equal(_evaluate(a, table, column_of), _evaluate(b, table, column_of))
    return EquivalenceResult(equivalent=bool(agree), sampled=sampled, assignments_checked=table.shape[0])
