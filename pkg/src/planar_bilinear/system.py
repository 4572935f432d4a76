"""System data: the pair (A, B) and the admissible control range."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .mat2 import Mat2, as_mat2


@dataclass(frozen=True)
class ControlSet:
    """Closed interval ``[lo, hi]``; infinite ends mean the whole real line."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not self.lo < self.hi:
            raise ValueError(f"control set needs lo < hi, got [{self.lo}, {self.hi}]")
        if math.isinf(self.lo) != math.isinf(self.hi):
            raise ValueError("half-bounded control sets are not supported")

    @classmethod
    def reals(cls) -> "ControlSet":
        return cls()

    @classmethod
    def interval(cls, lo: float, hi: float) -> "ControlSet":
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("interval ends must be finite")
        return cls(float(lo), float(hi))

    @property
    def is_reals(self) -> bool:
        return math.isinf(self.lo)

    def __contains__(self, u: float) -> bool:
        return self.lo <= u <= self.hi

    def clip(self, u_max: float) -> tuple[float, float]:
        """Finite window used by numeric diagnostics."""
        return max(self.lo, -u_max), min(self.hi, u_max)

    def to_json(self):
        return "reals" if self.is_reals else [self.lo, self.hi]

    @classmethod
    def from_json(cls, value) -> "ControlSet":
        if value is None or value == "reals":
            return cls.reals()
        if isinstance(value, (list, tuple)) and len(value) == 2:
            lo, hi = (float(v) for v in value)
            return cls.interval(lo, hi)
        raise ValueError(f'control_set must be "reals" or [lo, hi], got {value!r}')


@dataclass(frozen=True)
class BilinearSystem:
    """``x' = (A + uB) x`` with ``u`` piecewise constant in ``control_set``."""

    A: Mat2
    B: Mat2
    control_set: ControlSet = field(default_factory=ControlSet.reals)
    label: str = ""

    @classmethod
    def of(cls, a, b, control_set: ControlSet | None = None, label: str = "") -> "BilinearSystem":
        return cls(as_mat2(a), as_mat2(b), control_set or ControlSet.reals(), label)

    def at(self, u: float) -> Mat2:
        return self.A + self.B * u
