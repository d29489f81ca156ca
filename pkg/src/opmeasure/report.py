"""Check/report records returned by validators and certifiers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays (complex included) into plain JSON data."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, "matrix"):
        return jsonable(value.matrix)
    return value


@dataclass
class Check:
    """One quantitative check.

    ``defect`` is compared against ``tol`` (``defect <= tol`` passes) unless
    ``passed`` is given explicitly. ``sound`` is False for verdicts that are
    only tolerance-qualified (e.g. a positivity PASS from sampling).
    """

    name: str
    defect: float
    tol: float
    passed: bool | None = None
    witness: Any = None
    sound: bool = True

    def __post_init__(self):
        self.defect = float(self.defect)
        if self.passed is None:
            self.passed = bool(self.defect <= self.tol)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "defect": self.defect,
            "tol": self.tol,
            "passed": self.passed,
            "sound": self.sound,
        }
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        return out


@dataclass
class Report:
    name: str
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def add(self, name, defect, tol, passed=None, witness=None, sound=True) -> Check:
        check = Check(name, defect, tol, passed, witness, sound)
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.defect, c.tol, c.passed, c.witness, c.sound))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def worst(self, prefix: str) -> float:
        values = [c.defect for c in self.checks if c.name.startswith(prefix)]
        return max(values) if values else 0.0

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "info": jsonable(self.info),
        }
