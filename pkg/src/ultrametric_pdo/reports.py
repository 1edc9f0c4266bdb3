from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of a verification check.

    ``worst_residual`` is the largest violation measure seen (0.0 when the
    check is exact) and ``witness`` locates the first or worst offender.
    """

    check: str
    passed: bool
    worst_residual: float = 0.0
    witness: Any = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.worst_residual = float(self.worst_residual)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        d = {
            "check": self.check,
            "pass": self.passed,
            "worst_residual": float(self.worst_residual),
            "witness": self.witness,
        }
        if self.notes:
            d["notes"] = list(self.notes)
        return d
