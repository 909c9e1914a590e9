"""Bounds certificates returned by every infimum search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .scalar import Ordering, PowerValue, cmp_power

__all__ = ["BoundsCertificate"]


@dataclass(frozen=True)
class BoundsCertificate:
    """``lower <= true value <= upper``; ``witness`` realises ``upper``.

    ``budget`` echoes the search limits actually used.
    """

    lower: PowerValue
    upper: PowerValue
    witness: Any = None
    budget: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if cmp_power(self.lower, self.upper) is Ordering.GREATER:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def meets(self) -> bool:
        """True when the bounds provably coincide."""
        return cmp_power(self.lower, self.upper) is Ordering.EQUAL

    @property
    def gap(self) -> bool:
        return not self.meets

    @property
    def value(self) -> PowerValue:
        if not self.meets:
            raise ValueError(f"bounds do not meet: [{self.lower}, {self.upper}]")
        return self.upper

    def to_json(self) -> dict:
        out = {
            "lower": _value_json(self.lower),
            "upper": _value_json(self.upper),
            "gap": self.gap,
            "budget": {k: str(v) for k, v in sorted(self.budget.items())},
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json() if hasattr(self.witness, "to_json") else str(self.witness)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _value_json(v: PowerValue):
    # rationals print as plain strings, everything else in the structured form
    return str(v.base) if v.is_rational else v.to_json()
