"""ℓ^p combinators on finite tuples, normed sets and the flow on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .scalar import PowerValue, as_fraction, pv, pv_max

__all__ = ["PExponent", "INF", "NormedSet", "lp_norm", "flow_normed_set"]


@dataclass(frozen=True)
class PExponent:
    """An exponent in (0, ∞]; ``value is None`` encodes ∞."""

    value: Fraction | None

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", as_fraction(self.value))
            if self.value <= 0:
                raise ValueError(f"exponent must be positive, got {self.value}")

    @classmethod
    def parse(cls, x) -> PExponent:
        if isinstance(x, PExponent):
            return x
        if x is None:
            return cls(None)
        if isinstance(x, str) and x.strip().lower() in {"inf", "infinity", "∞"}:
            return cls(None)
        if isinstance(x, float) and x == float("inf"):
            return cls(None)
        return cls(as_fraction(x))

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def scaled(self, t) -> PExponent:
        """p / t, with ∞ / t = ∞."""
        t = as_fraction(t)
        if t <= 0:
            raise ValueError("flow parameter must be positive")
        return self if self.is_inf else PExponent(self.value / t)

    def dual(self) -> PExponent:
        """Hölder conjugate for p >= 1."""
        if self.is_inf:
            return PExponent(Fraction(1))
        if self.value < 1:
            raise ValueError("conjugate exponent needs p >= 1")
        if self.value == 1:
            return PExponent(None)
        return PExponent(self.value / (self.value - 1))

    def leq(self, other: PExponent) -> bool:
        if other.is_inf:
            return True
        if self.is_inf:
            return False
        return self.value <= other.value

    def __str__(self):
        return "inf" if self.is_inf else str(self.value)


INF = PExponent(None)


def lp_norm(xs: Iterable, p, rel_bits: int = 64) -> PowerValue:
    """(Σ xᵢ^p)^(1/p), or max for p = ∞.

    Exact when every xᵢ^p is rational or all nonzero xᵢ coincide; otherwise
    a certified interval of relative width about ``2**-rel_bits``.
    """
    p = PExponent.parse(p)
    xs = [pv(x) for x in xs]
    if p.is_inf:
        return pv_max(xs)
    xs = [x for x in xs if not x.is_zero]
    if not xs:
        return PowerValue.of(0)
    if len(xs) == 1:
        return xs[0]
    if all(x.is_exact for x in xs):
        powered = [x**p.value for x in xs]
        if all(y.is_rational for y in powered):
            return PowerValue.of(sum(y.base for y in powered), 1 / p.value)
        if all(x == xs[0] for x in xs):
            return PowerValue.of(len(xs), 1 / p.value) * xs[0]
    lo = hi = Fraction(0)
    for x in xs:
        a, b = (x**p.value).bracket(rel_bits)
        lo, hi = lo + a, hi + b
    return PowerValue.interval(lo, hi) ** (1 / p.value)


@dataclass(frozen=True)
class NormedSet:
    """A finite set of element ids with a norm value for each."""

    norms: Mapping[Hashable, PowerValue] = field(default_factory=dict)

    @classmethod
    def from_function(cls, elements: Iterable[Hashable], norm) -> NormedSet:
        return cls({e: pv(norm(e)) for e in elements})

    @property
    def elements(self) -> list:
        return list(self.norms)

    def norm(self, e) -> PowerValue:
        return self.norms[e]


def flow_normed_set(X: NormedSet, t) -> NormedSet:
    """σ_t: raise every norm value to the power t > 0."""
    t = as_fraction(t)
    if t <= 0:
        raise ValueError("flow parameter must be positive")
    return NormedSet({e: v**t for e, v in X.norms.items()})
