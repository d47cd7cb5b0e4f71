from __future__ import annotations

import math
from dataclasses import dataclass, field


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class ComparisonReport:
    """Outcome of a numerical comparison (Sturm ordering, Hessian comparison).

    ``passed`` is None when the hypotheses were not met, in which case no
    verdict is asserted.
    """

    margin_min: float
    t_argmin: float
    passed: bool | None
    hypotheses_met: bool = True
    tolerance: float = 0.0
    blowup_time: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def max_violation(self) -> float:
        return max(0.0, -self.margin_min)

    def to_dict(self) -> dict:
        out = {
            "margin_min": _num(self.margin_min),
            "t_argmin": _num(self.t_argmin),
            "pass": self.passed,
        }
        if self.blowup_time is not None:
            out["blowup_time"] = _num(self.blowup_time)
        out["hypotheses_met"] = self.hypotheses_met
        out["tolerance"] = self.tolerance
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class PredicateReport:
    """Outcome of a pointwise predicate over samples; ``worst_margin`` < 0 marks failures."""

    holds: bool
    worst_margin: float
    worst_at: float | None
    checked: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self):
        return {"holds": self.holds, "worst_margin": _num(self.worst_margin),
                "worst_at": self.worst_at, "checked": self.checked, "notes": self.notes}
