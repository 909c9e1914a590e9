"""Norms on scalar extensions and on quotient lattices.

The extension of a lattice M = ℤ^n to a context S is normed by the infimum,
over presentations t = Σ s_k f_k with f_k ∈ M and s_k ∈ S, of the Lipschitz
combination of the numbers |f_k|_M·|s_k|_S.  Searches return certified
bounds: the upper bound from the best presentation tried, the lower bound
from evaluating coordinate functionals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .certificate import BoundsCertificate
from .halo import HaloDescriptor, lip_functor
from .linalg import integer_solve, vec
from .module import Leaf, NormedLattice, greedy_tree
from .norms import lp_norm
from .scalar import Ordering, PowerValue, as_fraction, cmp_power, pv_max

__all__ = [
    "Presentation",
    "PresentationBudget",
    "QuotientBudget",
    "presentation_value",
    "presentation_norm",
    "quotient_norm",
]


@dataclass(frozen=True)
class Presentation:
    """Σ f_k ⊗ s_k with integer vectors f_k and scalars s_k."""

    terms: tuple  # ((f, s), ...)
    target: tuple

    def __post_init__(self):
        terms = tuple((tuple(int(x) for x in f), as_fraction(s)) for f, s in self.terms)
        target = vec(self.target)
        total = [sum((s * f[i] for f, s in terms), Fraction(0)) for i in range(len(target))]
        if tuple(total) != target:
            raise ValueError("presentation does not sum to the target")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "target", target)

    def to_json(self) -> dict:
        return {
            "terms": [{"element": list(f), "scalar": str(s)} for f, s in self.terms],
            "target": [str(x) for x in self.target],
        }


@dataclass(frozen=True)
class PresentationBudget:
    max_terms: int = 2
    radius: int = 1
    scalar_bound: int = 2
    valuation_range: int = 1


def presentation_value(pres: Presentation, base: NormedLattice, S: HaloDescriptor) -> PowerValue:
    """Best Lipschitz tree over the leaf values |f_k|·|s_k|."""
    C = lip_functor(S).C if S.flavor == "short" else S.C
    items = [(base.norm(f) * S.norm(s), Leaf(k, f)) for k, (f, s) in enumerate(pres.terms) if s != 0 and any(f)]
    if not items:
        return PowerValue.of(0)
    return greedy_tree(items, C)[0]


def _primitive(t: Sequence[Fraction]) -> tuple[tuple[int, ...], Fraction]:
    """t = s·f with f a primitive integer vector."""
    L = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in t), 1)
    ints = [int(x * L) for x in t]
    g = reduce(math.gcd, (abs(x) for x in ints), 0)
    return tuple(x // g for x in ints), Fraction(g, L)


def _scalars(S: HaloDescriptor, budget: PresentationBudget) -> list[Fraction]:
    B = budget.scalar_bound
    out = set()
    if S.norm_kind == "padic":
        V = budget.valuation_range
        for v in range(-V, V + 1):
            for c in range(1, B + 1):
                out.update({Fraction(S.prime) ** v * c, -Fraction(S.prime) ** v * c})
    else:
        for c in range(1, B + 1):
            for d in range(1, B + 1):
                out.update({Fraction(c, d), Fraction(-c, d)})
    return sorted(out)


def _lower_bound(target, base: NormedLattice, S: HaloDescriptor) -> tuple[PowerValue, str]:
    """Certified lower bound valid for every presentation.

    Integer vectors have entries of p-adic size <= 1, so |t_i|_p <= max_k |s_k|·|f_k| / m_min
    (ultrametric).  In the real context a tree with k leaves is worth at least k times its
    largest leaf (C = 2), hence at least Σ |s_k|·|f_k|; on an ℓ^q base this dominates ‖t‖_q.
    """
    coords = pv_max(S.norm(x) for x in target)
    best = base.min_nonzero * coords
    why = "coordinate functionals"
    q = base.real_q
    if S.norm_kind == "arch" and q is not None and (q.is_inf or q.value >= 1):
        lq = lp_norm([abs(x) for x in target], q)
        if cmp_power(lq, best) is Ordering.GREATER:
            best, why = lq, "real l^q norm of the target"
    return best, why


def presentation_norm(target, base: NormedLattice, S: HaloDescriptor, budget: PresentationBudget | None = None) -> BoundsCertificate:
    """Bounds for the norm of ``target`` in the scalar extension of ``base`` to S.

    S must be the real-rational context (ℝ, |·|_∞, 1) or a p-adic one.
    """
    budget = budget or PresentationBudget()
    target = vec(target)
    if len(target) != base.rank:
        raise ValueError("target has the wrong length")
    if not (S.norm_kind == "padic" or (S.ring == "Q" and S.norm_kind == "arch" and S.power == 1)):
        raise ValueError("presentation norms are implemented for real and p-adic contexts")
    if S.norm_kind == "padic" and S.power != 1:
        raise ValueError("flowed p-adic contexts are not supported")
    used = {k: v for k, v in budget.__dict__.items()}
    if not any(target):
        zero = PowerValue.of(0)
        return BoundsCertificate(zero, zero, Presentation((), target), used)
    n = base.rank

    candidates = []
    coordinate = tuple((tuple(int(k == i) for k in range(n)), target[i]) for i in range(n) if target[i])
    candidates.append(Presentation(coordinate, target))
    f, s = _primitive(target)
    candidates.append(Presentation(((f, s),), target))
    if budget.max_terms >= 2:
        for f1 in base.points(budget.radius):
            for s1 in _scalars(S, budget):
                rest = tuple(t - s1 * x for t, x in zip(target, f1))
                terms = [(f1, s1)]
                if any(rest):
                    terms.append(_primitive(rest))
                candidates.append(Presentation(tuple(terms), target))

    best, upper = None, None
    for pres in candidates:
        value = presentation_value(pres, base, S)
        if upper is None or cmp_power(value, upper) is Ordering.LESS:
            best, upper = pres, value
    lower, why = _lower_bound(target, base, S)
    if cmp_power(lower, upper) is Ordering.GREATER:
        raise ArithmeticError("lower bound exceeds a realised presentation")
    return BoundsCertificate(lower, upper, best, used, (f"lower bound: {why}",))


# quotients ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientBudget:
    kernel_radius: int = 4


@dataclass(frozen=True)
class Preimage:
    point: tuple

    def to_json(self):
        return {"preimage": list(self.point)}


def quotient_norm(c, projection, fiber: NormedLattice, budget: QuotientBudget | None = None) -> BoundsCertificate:
    """Bounds for inf |x| over integer x with P x = c.

    Preimages are x0 + K z for an integer kernel basis K.  If |x| < U then
    every |x_i| <= R = fiber.radius(U), and z = K⁺(x - x0) is confined to a
    box; the box is searched, capped by ``kernel_radius`` with the
    unexplored region bounded from below.
    """
    budget = budget or QuotientBudget()
    c = [int(x) for x in c]
    used = {"kernel_radius": budget.kernel_radius}
    sol = integer_solve(projection, c)
    x0 = sol.particular
    if not any(c):
        zero = PowerValue.of(0)
        return BoundsCertificate(zero, zero, Preimage(tuple(0 for _ in x0)), used)
    best_x, upper = x0, fiber.norm(x0)
    notes = []
    extra_lower = []
    if sol.kernel_rank:
        R = fiber.radius(upper)
        x0_inf = max(abs(x) for x in x0)
        ranges = []
        for row in sol.kernel_left_inverse:
            l1 = sum(abs(a) for a in row)
            natural = None if R is None else sum(abs(a) * (R + abs(xi)) for a, xi in zip(row, x0))
            cap = budget.kernel_radius
            if natural is None or natural > cap:
                # |z_j| > cap forces max|x_i| > cap/l1 - max|x0_i|
                t = math.floor(Fraction(cap, l1) - x0_inf) + 1
                extra_lower.append(fiber.linf_lower(max(t, 0)))
                notes.append("kernel search capped by budget")
                ranges.append(range(-cap, cap + 1))
            else:
                ranges.append(range(-natural, natural + 1))
        unknown_lows = []
        for z in itertools.product(*ranges):
            x = sol.point(z)
            value = fiber.norm(x)
            order = cmp_power(value, upper)
            if order is Ordering.LESS:
                best_x, upper = x, value
            elif order is Ordering.UNKNOWN:
                if value.bracket()[1] < upper.bracket()[1]:
                    unknown_lows.append(upper.bracket()[0])
                    best_x, upper = x, value
                else:
                    unknown_lows.append(value.bracket()[0])
        extra_lower.extend(PowerValue.of(lo) for lo in unknown_lows)
    lower = upper
    for b in extra_lower:
        if cmp_power(b, lower) is Ordering.LESS:
            lower = b
    return BoundsCertificate(lower, upper, Preimage(best_x), used, tuple(sorted(set(notes))))
