from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Set, Tuple
from util.exceptions import ComplementaryLiteralError


@dataclass(frozen=True, order=True)
class Literal:
    # 1-based variable index; literal index 2i-1 for x_i, 2i for NOT x_i
    variable: int
    positive: bool = True

    @property
    def index(self) -> int:
        """
        Global 1-based literal index (2i-1 for x_i, 2i for NOT x_i)
        """
        return 2 * self.variable - (1 if self.positive else 0)

    @property
    def column(self) -> int:
        """
        Zero-based column in a literal matrix of width 2N
        """
        return self.index - 1

    @property
    def sort_key(self) -> Tuple[int, int]:
        return self.variable, 0 if self.positive else 1

    @classmethod
    def from_column(cls, column: int) -> 'Literal':
        return cls(column // 2 + 1, column % 2 == 0)


@dataclass(frozen=True)
class Clause:
    literals: FrozenSet[Literal] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'literals', frozenset(self.literals))

    @classmethod
    def of(cls, literals: Iterable[Literal], allow_complementary: bool = False) -> 'Clause':
        """
        Build a clause, rejecting x AND NOT x unless explicitly allowed
        """
        literals = frozenset(literals)
        if not allow_complementary:
            seen: Set[int] = set()
            for lit in literals:
                if lit.variable in seen:
                    raise ComplementaryLiteralError(lit.variable)
                seen.add(lit.variable)
        return cls(literals)

    @property
    def ordered(self) -> List[Literal]:
        return sorted(self.literals, key=lambda lit: lit.sort_key)

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return len(self.literals), tuple(lit.index for lit in self.ordered)

    @property
    def variables(self) -> Set[int]:
        return {lit.variable for lit in self.literals}

    def __len__(self) -> int:
        return len(self.literals)


@dataclass(frozen=True)
class DnfRule:
    clauses: FrozenSet[Clause] = field(default_factory=frozenset)
    num_variables: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'clauses', frozenset(self.clauses))
        highest = max((lit.variable for c in self.clauses for lit in c.literals), default=0)
        if self.num_variables < highest:
            object.__setattr__(self, 'num_variables', highest)

    @classmethod
    def from_lists(cls, clauses: Iterable[Iterable[Tuple[int, bool]]], num_variables: int = 0) -> 'DnfRule':
        """
        Build a rule from nested (variable, positive) pairs
        """
        return cls(
            frozenset(Clause.of(Literal(v, p) for v, p in clause) for clause in clauses),
            num_variables
        )

    @property
    def ordered(self) -> List[Clause]:
        """
        Canonical clause order: by size, then by literal indices
        """
        return sorted(self.clauses, key=lambda c: c.sort_key)

    @property
    def variables(self) -> Set[int]:
        return {lit.variable for c in self.clauses for lit in c.literals}

    @property
    def is_empty(self) -> bool:
        return len(self.clauses) == 0

    def size(self) -> Tuple[int, int]:
        """
        Number of clauses and total number of literals
        """
        return len(self.clauses), sum(len(c) for c in self.clauses)

    def with_num_variables(self, num_variables: int) -> 'DnfRule':
        return DnfRule(self.clauses, num_variables)

    def __len__(self) -> int:
        return len(self.clauses)
