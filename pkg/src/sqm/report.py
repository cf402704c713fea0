"""Verification report record and JSON serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class VerificationReport:
    """One named check: a metric, its tolerance and the resulting verdict.

    `passed` always equals metric <= tolerance; it is derived, never set.
    """

    check_name: str
    metric: float
    tolerance: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.metric <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "check": self.check_name,
            "metric": self.metric,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": _plain(self.details),
        }


def _plain(obj):
    """Recursively convert numpy scalars/arrays so json can emit them."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def reports_to_json(reports) -> str:
    """Stable JSON array of report objects."""
    return json.dumps([r.to_dict() for r in reports], indent=2)
