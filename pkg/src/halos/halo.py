"""Halo descriptors: normed rings with an ℓ^p or Lipschitz triangle inequality.

A descriptor fixes the ring (ℤ, ℚ inside ℝ, or ℚ inside ℚ_p), the norm
(archimedean, trivial or p-adic, raised to a rational power) and the
constants of the relaxed triangle inequality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .certificate import BoundsCertificate
from .norms import PExponent, lp_norm
from .scalar import (
    Ordering,
    PAdicContext,
    PowerValue,
    as_fraction,
    cmp_power,
    padic_abs,
    pv,
    pv_max,
)

__all__ = [
    "HaloDescriptor",
    "AxiomViolation",
    "AxiomReport",
    "Decomposition",
    "RenormBudget",
    "check_halo_axioms",
    "lip_functor",
    "flow_halo",
    "renorm_infimum",
    "load_halo",
    "parse_samples",
]

RINGS = ("Z", "Q", "Qp")
NORMS = ("arch", "trivial", "padic")
FLAVORS = ("short", "lipschitz")


@dataclass(frozen=True)
class HaloDescriptor:
    ring: str = "Z"
    norm_kind: str = "arch"
    power: Fraction = Fraction(1)
    prime: int | None = None
    flavor: str = "short"
    p: PExponent | None = PExponent(Fraction(1))
    C: PowerValue | None = None
    D: PowerValue | None = None

    def __post_init__(self):
        if self.ring not in RINGS:
            raise ValueError(f"unknown ring {self.ring!r}")
        if self.norm_kind not in NORMS:
            raise ValueError(f"unknown norm {self.norm_kind!r}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        object.__setattr__(self, "power", as_fraction(self.power))
        if self.power <= 0:
            raise ValueError("norm power must be positive")
        if (self.ring == "Qp") != (self.norm_kind == "padic"):
            raise ValueError("the p-adic norm goes with ring Qp and only with it")
        if self.norm_kind == "padic":
            if self.prime is None:
                raise ValueError("p-adic norm needs a prime")
            PAdicContext(self.prime)
        if self.flavor == "short":
            if self.p is None:
                raise ValueError("short halo needs an exponent p")
            object.__setattr__(self, "p", PExponent.parse(self.p))
        else:
            if self.C is None or self.D is None:
                raise ValueError("Lipschitz halo needs constants C and D")
            object.__setattr__(self, "C", pv(self.C))
            object.__setattr__(self, "D", pv(self.D))
            object.__setattr__(self, "p", None)

    # standard contexts ------------------------------------------------------

    @classmethod
    def integers(cls, power=1, p=None) -> HaloDescriptor:
        """(ℤ, |·|_∞^power, 1/power)."""
        power = as_fraction(power)
        return cls("Z", "arch", power, flavor="short", p=PExponent.parse(p if p is not None else 1 / power))

    @classmethod
    def trivial(cls) -> HaloDescriptor:
        """(ℤ, |·|_0, ∞)."""
        return cls("Z", "trivial", flavor="short", p=PExponent(None))

    @classmethod
    def reals(cls) -> HaloDescriptor:
        """Rationals with |·|_∞ as a dense model of (ℝ, |·|_∞, 1)."""
        return cls("Q", "arch", flavor="short", p=PExponent(Fraction(1)))

    @classmethod
    def padic(cls, prime: int) -> HaloDescriptor:
        """Rationals with |·|_p as a dense model of (ℚ_p, |·|_p, ∞)."""
        return cls("Qp", "padic", prime=prime, flavor="short", p=PExponent(None))

    # evaluation -------------------------------------------------------------

    def coerce(self, x) -> Fraction:
        x = as_fraction(x)
        if self.ring == "Z" and x.denominator != 1:
            raise ValueError(f"{x} is not an integer")
        return x

    def norm(self, x) -> PowerValue:
        x = self.coerce(x)
        if x == 0:
            return PowerValue.of(0)
        if self.norm_kind == "trivial":
            return PowerValue.of(1)
        if self.norm_kind == "arch":
            return PowerValue.of(abs(x), self.power)
        return padic_abs(x, self.prime) ** self.power

    def combine(self, a: PowerValue, b: PowerValue) -> PowerValue:
        """Right-hand side of the triangle inequality for norms a, b."""
        if self.flavor == "short":
            return lp_norm([a, b], self.p)
        return self.C * pv_max([a, b])

    def product_bound(self, a: PowerValue, b: PowerValue) -> PowerValue:
        return a * b if self.flavor == "short" else self.D * a * b

    @property
    def is_discrete(self) -> bool:
        """Nonzero elements have norm >= 1 (true for ℤ with |·|_∞^t or |·|_0)."""
        return self.ring == "Z" and self.norm_kind in ("arch", "trivial")

    def to_config(self) -> dict:
        out = {"ring": self.ring, "norm": self.norm_kind, "power": str(self.power), "flavor": self.flavor}
        if self.prime is not None:
            out["prime"] = self.prime
        if self.flavor == "short":
            out["p"] = str(self.p)
        else:
            out["C"] = self.C.to_json()
            out["D"] = self.D.to_json()
        return out

    @classmethod
    def from_config(cls, cfg: dict) -> HaloDescriptor:
        cfg = dict(cfg)
        ring = cfg.get("ring", "Z")
        norm = cfg.get("norm", "padic" if ring == "Qp" else "arch")
        flavor = cfg.get("flavor", "short")
        kwargs = {
            "ring": ring,
            "norm_kind": norm,
            "power": as_fraction(cfg.get("power", "1")),
            "prime": int(cfg["prime"]) if "prime" in cfg else None,
            "flavor": flavor,
        }
        if flavor == "short":
            default_p = "inf" if norm in ("padic", "trivial") else "1"
            kwargs["p"] = PExponent.parse(cfg.get("p", default_p))
        else:
            kwargs["p"] = None
            kwargs["C"] = _parse_value(cfg["C"])
            kwargs["D"] = _parse_value(cfg.get("D", "1"))
        return cls(**kwargs)

    def __str__(self):
        ring = {"Z": "ℤ", "Q": "ℝ", "Qp": f"ℚ_{self.prime}"}[self.ring]
        norm = {"arch": "|·|_∞", "trivial": "|·|_0", "padic": f"|·|_{self.prime}"}[self.norm_kind]
        if self.power != 1:
            norm += f"^{self.power}"
        const = str(self.p) if self.flavor == "short" else f"({self.C}, {self.D})"
        return f"({ring}, {norm}, {const})"


def _parse_value(x) -> PowerValue:
    if isinstance(x, dict):
        return PowerValue.from_json(x)
    return PowerValue.of(x)


def load_halo(path) -> HaloDescriptor:
    return HaloDescriptor.from_config(json.loads(Path(path).read_text()))


def parse_samples(text: str) -> list[Fraction]:
    """``"-5..5"`` or a comma list such as ``"0,1,1/2"``."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        return [Fraction(k) for k in range(int(a), int(b) + 1)]
    return [as_fraction(s) for s in text.split(",") if s.strip()]


# axiom checks ---------------------------------------------------------------


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    pair: tuple
    detail: str

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "pair": [str(x) for x in self.pair], "detail": self.detail}


@dataclass
class AxiomReport:
    halo: HaloDescriptor
    violations: list[AxiomViolation] = field(default_factory=list)
    undecided: list[AxiomViolation] = field(default_factory=list)
    checks: int = 0
    notes: tuple[str, ...] = (
        "completeness is not checkable from samples; closure of sums and products was checked instead",
    )

    @property
    def passed(self) -> bool:
        return not self.violations and not self.undecided

    @property
    def first_violation(self) -> AxiomViolation | None:
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict:
        return {
            "halo": str(self.halo),
            "passed": self.passed,
            "checks": self.checks,
            "violations": [v.to_json() for v in self.violations],
            "undecided": [v.to_json() for v in self.undecided],
            "notes": list(self.notes),
        }


def _sample_order(x: Fraction):
    return (abs(x), x < 0)


def check_halo_axioms(H: HaloDescriptor, samples: Iterable) -> AxiomReport:
    """Check the halo axioms on every pair of samples.

    Pairs are visited with samples ordered by absolute value, positives
    first, so the reported witness is the smallest one.
    """
    xs = sorted({H.coerce(x) for x in samples}, key=_sample_order)
    report = AxiomReport(H)

    def record(axiom, pair, order, detail):
        report.checks += 1
        if order is Ordering.UNKNOWN:
            report.undecided.append(AxiomViolation(axiom, pair, "undecided: " + detail))
        elif order is Ordering.GREATER:
            report.violations.append(AxiomViolation(axiom, pair, detail))

    one = H.norm(1)
    if not one.equals(1):
        report.violations.append(AxiomViolation("unit", (Fraction(1),), f"|1| = {one}"))
    report.checks += 1
    for x in xs:
        report.checks += 1
        if H.norm(x).is_zero != (x == 0):
            report.violations.append(AxiomViolation("definite", (x,), f"|{x}| = {H.norm(x)}"))
    for f in xs:
        nf = H.norm(f)
        for g in xs:
            ng = H.norm(g)
            bound = H.combine(nf, ng)
            for name, value in (("triangle (sum)", f + g), ("triangle (difference)", f - g)):
                lhs = H.norm(value)
                record(name, (f, g), cmp_power(lhs, bound), f"|{value}| = {lhs} vs {bound}")
            lhs = H.norm(f * g)
            prod = H.product_bound(nf, ng)
            record("submultiplicative", (f, g), cmp_power(lhs, prod), f"|{f * g}| = {lhs} vs {prod}")
            report.checks += 1
            for value in (f + g, f - g, f * g):
                try:
                    H.coerce(value)
                except ValueError:
                    report.violations.append(AxiomViolation("closure", (f, g), f"{value} leaves the ring"))
    return report


# functors ---------------------------------------------------------------------


def lip_functor(H: HaloDescriptor) -> HaloDescriptor:
    """Short halo ↦ Lipschitz halo with constants (2^(1/p), 1)."""
    if H.flavor != "short":
        raise ValueError("the Lip functor takes a short halo")
    C = PowerValue.of(1) if H.p.is_inf else PowerValue.of(2, 1 / H.p.value)
    return replace(H, flavor="lipschitz", p=None, C=C, D=PowerValue.of(1))


def flow_halo(H: HaloDescriptor, t) -> HaloDescriptor:
    """σ_t: norm ↦ norm^t, p ↦ p/t, (C, D) ↦ (C^t, D^t)."""
    t = as_fraction(t)
    if t <= 0:
        raise ValueError("flow parameter must be positive")
    if H.flavor == "short":
        return replace(H, power=H.power * t, p=H.p.scaled(t))
    return replace(H, power=H.power * t, C=H.C**t, D=H.D**t)


# re-normalisation -----------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    parts: tuple[Fraction, ...]
    target: Fraction

    def __post_init__(self):
        if sum(self.parts, Fraction(0)) != self.target:
            raise ValueError("parts do not sum to the target")

    def to_json(self) -> dict:
        return {"parts": [str(x) for x in self.parts], "target": str(self.target)}


@dataclass(frozen=True)
class RenormBudget:
    max_parts: int | None = None
    max_magnitude: int | None = None

    def resolve(self, f: int) -> tuple[int, int]:
        k = self.max_parts if self.max_parts is not None else max(2, 2 * abs(f))
        m = self.max_magnitude if self.max_magnitude is not None else max(1, 2 * abs(f))
        return k, m


def renorm_infimum(H: HaloDescriptor, p, f, budget: RenormBudget | None = None) -> BoundsCertificate:
    """Bounds for inf ‖(|fᵢ|)‖_p over finite decompositions f = Σ fᵢ.

    Every nonzero part costs at least 1, so only parts of norm below the
    current best and at most k parts with k^(1/p) below it can help; both
    ranges are finite and are searched exhaustively unless the budget cuts
    them, in which case the lower bound accounts for the unexplored region.
    """
    p = PExponent.parse(p)
    budget = budget or RenormBudget()
    f = H.coerce(f)
    if not H.is_discrete:
        raise ValueError("re-normalisation search needs ℤ with a discrete norm")
    f = int(f)
    max_parts, max_mag = budget.resolve(f)
    used = {"max_parts": max_parts, "max_magnitude": max_mag}
    if f == 0:
        zero = PowerValue.of(0)
        return BoundsCertificate(zero, zero, Decomposition((), Fraction(0)), used)
    if H.flavor == "lipschitz":
        return _renorm_lipschitz(H, p, f, max_parts, max_mag, used)

    upper = H.norm(f)
    best = (Fraction(f),)
    # parts of norm >= upper cannot improve on the trivial decomposition
    natural_mag = 0
    while natural_mag < max_mag and H.norm(natural_mag + 1) < upper:
        natural_mag += 1
    mag = natural_mag
    mag_capped = natural_mag == max_mag and H.norm(max_mag + 1) < upper
    # k nonzero parts cost at least k^(1/p)
    if p.is_inf:
        natural_k, count_capped = max_parts, False
    else:
        natural_k = 1
        while natural_k < max_parts and PowerValue.of(natural_k + 1, 1 / p.value) < upper:
            natural_k += 1
        count_capped = natural_k == max_parts and PowerValue.of(max_parts + 1, 1 / p.value) < upper

    candidates = [x for k in range(1, mag + 1) for x in (k, -k)]
    norms = {x: H.norm(x) for x in candidates}
    if p.is_inf:
        costs = {x: float(norms[x]) for x in candidates}
    else:
        costs = {x: float(norms[x] ** p.value) for x in candidates}
    best_cost = float(upper) if p.is_inf else float(upper ** p.value)
    slack = 1e-9
    near: list[tuple[float, tuple[int, ...]]] = []

    def combine(acc, c):
        return max(acc, c) if p.is_inf else acc + c

    def dfs(start: int, remaining: int, slots: int, acc: float, chosen: list[int]):
        nonlocal best_cost
        if acc > best_cost * (1 + slack):
            return
        if remaining == 0 and len(chosen) >= 2:
            near.append((acc, tuple(chosen)))
            if acc < best_cost:
                best_cost = acc
        if slots == 0 or abs(remaining) > slots * mag:
            return
        for idx in range(start, len(candidates)):
            x = candidates[idx]
            chosen.append(x)
            dfs(idx, remaining - x, slots - 1, combine(acc, costs[x]), chosen)
            chosen.pop()

    if mag:
        dfs(0, f, natural_k, 0.0, [])
    for c, parts in near:
        if c > best_cost * (1 + slack):
            continue
        value = lp_norm([norms[x] for x in parts], p)
        if cmp_power(value, upper) is Ordering.LESS:
            upper, best = value, tuple(Fraction(x) for x in parts)

    lower = upper
    notes = []
    if mag_capped and H.norm(max_mag + 1) < upper:
        lower = _pv_min(lower, H.norm(max_mag + 1))
        notes.append("part magnitude capped by budget")
    if count_capped and PowerValue.of(max_parts + 1, 1 / p.value) < upper:
        lower = _pv_min(lower, PowerValue.of(max_parts + 1, 1 / p.value))
        notes.append("part count capped by budget")
    if p.is_inf:
        # extra parts are free under max; every nonzero part still costs >= 1
        lower = _pv_min(lower, PowerValue.of(1))
    return BoundsCertificate(lower, upper, Decomposition(best, Fraction(f)), used, tuple(notes))


def _pv_min(a: PowerValue, b: PowerValue) -> PowerValue:
    return b if cmp_power(b, a) is Ordering.LESS else a


def _renorm_lipschitz(H, p, f, max_parts, max_mag, used) -> BoundsCertificate:
    from .module import TreeBudget, coordinate_lattice, tree_norm

    C = PowerValue.of(1) if p.is_inf else PowerValue.of(2, 1 / p.value)
    lattice = coordinate_lattice(replace(H, flavor="short", p=PExponent(None), C=None, D=None), 1)
    cert = tree_norm([(lattice, (f,))], C, TreeBudget(max_leaves=max_parts, max_magnitude=max_mag))
    return BoundsCertificate(cert.lower, cert.upper, cert.witness, used, cert.notes)
