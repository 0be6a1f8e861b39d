"""Pass/fail record shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    passed: bool = True
    checked: int = 0
    counterexample: object = None
    details: dict = field(default_factory=dict)

    def fail(self, witness):
        if self.passed:
            self.passed = False
            self.counterexample = witness

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "details": self.details,
        }

    def __bool__(self):
        return self.passed
