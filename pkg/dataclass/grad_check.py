from dataclasses import dataclass, field
from typing import List


@dataclass
class GradCheckResult:
    errors: List[float] = field(default_factory=list)
    max_tolerance: float = 1e-2
    median_tolerance: float = 1e-3

    @property
    def checked(self) -> int:
        return len(self.errors)

    @property
    def max_error(self) -> float:
        return max(self.errors) if self.errors else 0.0

    @property
    def median_error(self) -> float:
        if not self.errors:
            return 0.0
        ordered = sorted(self.errors)
        mid = len(ordered) // 2
        return ordered[mid] if len(ordered) % 2 else 0.5 * (ordered[mid - 1] + ordered[mid])

    @property
    def passed(self) -> bool:
        return self.max_error < self.max_tolerance and self.median_error < self.median_tolerance
