"""Outcome record for one empirical check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    """Result of scanning one inequality over a range.

    ``violations`` holds ``(witness, lhs, rhs)`` triples for every point where
    the checked inequality failed.  ``worst_margin`` is the minimum margin seen
    (margin >= 0 means the inequality held at that point); a vacuous scan has
    margin +inf.  The report is valid only if ``violations`` is empty exactly
    when ``worst_margin >= 0``.
    """

    check_id: str
    range: tuple
    points_checked: int = 0
    violations: list = field(default_factory=list)
    worst_margin: float = math.inf
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, witness, lhs, rhs, margin: float) -> None:
        if margin < self.worst_margin:
            self.worst_margin = margin
        if margin < 0:
            self.violations.append((witness, lhs, rhs))
        self.points_checked += 1

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "range": list(self.range),
            "points_checked": self.points_checked,
            "violations": [
                [str(w), str(lhs), str(rhs)] for w, lhs, rhs in self.violations
            ],
            "worst_margin": (None if math.isinf(self.worst_margin)
                             else float(self.worst_margin)),
            "passed": self.passed,
            "notes": list(self.notes),
        }
