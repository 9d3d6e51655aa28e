from dataclass.rule import DnfRule
from typing import Optional, Set, Tuple
from util.exceptions import DimensionMismatchError, DomainError, VariableOutOfRangeError
import numpy as np


def check_range(rule: DnfRule, num_variables: int):
    for variable in rule.variables:
        if variable < 1 or variable > num_variables:
            raise VariableOutOfRangeError(variable, num_variables)


def rule_size(rule: DnfRule) -> Tuple[int, int]:
    """
    (clauses, literals) summary used by reports
    """
    return rule.size()


def mentioned_variables(rule: DnfRule) -> Set[int]:
    return set(rule.variables)


def eval_boolean(rule: DnfRule, assignment) -> bool:
    """
    True iff some clause has all of its literals satisfied
    """
    assignment = np.asarray(assignment, dtype=bool).reshape(-1)
    check_range(rule, assignment.shape[0])
    for clause in rule.clauses:
        if all(assignment[lit.variable - 1] == lit.positive for lit in clause.literals):
            return True
    return False


def eval_boolean_rows(rule: DnfRule, X: np.ndarray) -> np.ndarray:
    """
    Vectorized eval_boolean over the rows of a boolean matrix
    """
    X = np.asarray(X, dtype=bool)
    if X.ndim != 2:
        raise DimensionMismatchError('assignment matrix', 2, X.ndim)
    check_range(rule, X.shape[1])
    result = np.zeros(X.shape[0], dtype=bool)
    for clause in rule.clauses:
        satisfied = np.ones(X.shape[0], dtype=bool)
        for lit in clause.literals:
            column = X[:, lit.variable - 1]
            satisfied &= column if lit.positive else ~column
        result |= satisfied
    return result


def to_literals(X: np.ndarray, unknown: float = 0.5) -> np.ndarray:
    """
    Literal matrix (..., 2N) under the interleaved convention: column 2(i-1) is x_i,
    column 2(i-1)+1 is NOT x_i. Unknown (NaN) cells take the given value in both.
    """
    X = np.asarray(X, dtype=np.float64)
    lits = np.empty(X.shape[:-1] + (2 * X.shape[-1],), dtype=np.float64)
    lits[..., 0::2] = X
    lits[..., 1::2] = 1.0 - X
    missing = np.isnan(lits)
    if missing.any():
        lits[missing] = unknown
    return lits


def eval_soft(z: np.ndarray, w: np.ndarray, lits: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Product T-norm execution of a gated rule.

    z: (T, 2N) literal gates, w: (T,) clause gates, lits: (2N,) or (M, 2N).
    Returns clause truths (T,) or (M, T) and predictions () or (M,).
    """
    z = np.asarray(z, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    lits = np.asarray(lits, dtype=np.float64)
    if z.ndim != 2 or w.shape != (z.shape[0],):
        raise DimensionMismatchError('gates', f'z (T, 2N) with w (T,)', f'z {z.shape}, w {w.shape}')
    if lits.shape[-1] != z.shape[1]:
        raise DimensionMismatchError('literal values', z.shape[1], lits.shape[-1])
    for name, values in (('z', z), ('w', w), ('literal values', lits)):
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise DomainError('eval_soft', f'{name} outside [0, 1]')

    # (..., T, 2N) factors 1 - z (1 - l)
    factors = 1.0 - z * (1.0 - lits[..., None, :])
    clause_truths = np.prod(factors, axis=-1)
    prediction = 1.0 - np.prod(1.0 - w * clause_truths, axis=-1)
    return clause_truths, prediction


def rule_to_gates(rule: DnfRule, num_literals: int, slots: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Hard gates realizing a rule, one clause per slot
    """
    check_range(rule, num_literals // 2)
    clauses = rule.ordered
    slots = len(clauses) if slots is None else slots
    if slots < len(clauses):
        raise DimensionMismatchError('clause slots', f'>= {len(clauses)}', slots)
    z = np.zeros((slots, num_literals))
    w = np.zeros(slots)
    for k, clause in enumerate(clauses):
        w[k] = 1.0
        for lit in clause.literals:
            z[k, lit.column] = 1.0
    return z, w


def score_rows(rule: DnfRule, X: np.ndarray, threshold: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
    """
    Score rows with a hard rule; unknown cells count as 0.5.

    Returns soft predictions and hard labels (positive iff prediction > threshold).
    """
    X = np.asarray(X, dtype=np.float64)
    if rule.is_empty:
        soft = np.zeros(X.shape[0])
        return soft, soft > threshold
    z, w = rule_to_gates(rule, 2 * X.shape[1])
    _, soft = eval_soft(z, w, to_literals(X, unknown=0.5))
    return soft, soft > threshold
