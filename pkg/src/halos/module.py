"""Finite-rank normed lattices and the norms built from them.

Direct sums come in two flavours: the ℓ^p combination of summand norms, and
the Lipschitz tree norm, an infimum over binary trees whose leaves split
each summand's component.  A tree is valued recursively by
``C * max(left, right)``, so its value equals ``max C^depth(leaf) * |leaf|``;
for a fixed multiset of leaf norms the best shape is found by repeatedly
merging the two smallest values (optimal for C >= 1).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Callable, Iterable, Sequence

from .certificate import BoundsCertificate
from .halo import HaloDescriptor
from .linalg import Matrix, gram, mat, transpose
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
    psd_leq_one,
)
from .spectral import spectral_norm

__all__ = [
    "NormedLattice",
    "coordinate_lattice",
    "operator_norm_lattice",
    "Leaf",
    "Node",
    "TreeBudget",
    "tree_valuation",
    "greedy_tree",
    "tree_norm",
    "direct_sum_short_norm",
    "free_module_norm",
    "operator_norm",
    "operator_norm_value",
    "operator_norm_leq_one",
    "parse_context",
    "boundedness_bound",
    "check_boundedness_hypothesis",
]


# lattices -------------------------------------------------------------------


class NormedLattice:
    """ℤ^rank with a norm.

    ``radius(U)`` must return an integer r such that every v with
    ``norm(v) < U`` satisfies max|vᵢ| <= r, or None when no such r exists;
    ``linf_lower(t)`` bounds norm(v) from below whenever max|vᵢ| >= t.
    """

    def __init__(
        self,
        rank: int,
        norm: Callable[[tuple], PowerValue],
        min_nonzero: PowerValue,
        radius: Callable[[PowerValue], int | None],
        linf_lower: Callable[[int], PowerValue],
        name: str = "lattice",
        p: PExponent | None = None,
        real_q: PExponent | None = None,
    ):
        self.rank = rank
        self._norm = norm
        self.min_nonzero = pv(min_nonzero)
        self._radius = radius
        self._linf_lower = linf_lower
        self.name = name
        self.p = p
        # set when the norm is the real ℓ^q norm of the coordinates
        self.real_q = real_q

    def norm(self, v: Sequence) -> PowerValue:
        v = tuple(int(x) for x in v)
        if len(v) != self.rank:
            raise ValueError(f"expected a vector of length {self.rank}")
        if not any(v):
            return PowerValue.of(0)
        return self._norm(v)

    def radius(self, U: PowerValue) -> int | None:
        return self._radius(pv(U))

    def linf_lower(self, t: int) -> PowerValue:
        return self._linf_lower(t)

    def points(self, r: int) -> Iterable[tuple[int, ...]]:
        """Nonzero points with max|vᵢ| <= r."""
        for v in itertools.product(range(-r, r + 1), repeat=self.rank):
            if any(v):
                yield v

    def __repr__(self):
        return f"NormedLattice({self.name}, rank={self.rank})"


def coordinate_lattice(halo: HaloDescriptor | None = None, rank: int = 1, q="inf") -> NormedLattice:
    """(ℤ^rank, ‖(|vᵢ|)‖_q) for a discrete integer halo (default |·|_∞)."""
    halo = halo or HaloDescriptor.integers()
    if not halo.is_discrete:
        raise ValueError("coordinate lattices need ℤ with a discrete norm")
    q = PExponent.parse(q)

    def norm(v):
        return lp_norm([halo.norm(x) for x in v], q)

    def radius(U):
        # ‖·‖_q >= ‖·‖_∞, so every coordinate has halo norm < U
        if halo.norm_kind == "trivial":
            return 0 if cmp_power(U, PowerValue.of(1)) is not Ordering.GREATER else None
        r = 0
        while cmp_power(halo.norm(r + 1), U) is Ordering.LESS:
            r += 1
        return r

    return NormedLattice(
        rank,
        norm,
        PowerValue.of(1),
        radius,
        lambda t: halo.norm(t) if t > 0 else PowerValue.of(0),
        name=f"Z^{rank} l^{q} over {halo}",
        p=q,
        real_q=q if halo.norm_kind == "arch" and halo.power == 1 else None,
    )


def operator_norm_lattice(n: int) -> NormedLattice:
    """M(n, ℤ) with the real ℓ² operator norm, coordinates row-major."""

    def radius(U):
        # entries are bounded by the operator norm
        hi = pv(U).bracket()[1]
        r = hi.numerator // hi.denominator
        return r - 1 if r == hi else r

    return NormedLattice(
        n * n,
        lambda v: spectral_norm(mat([v[r * n : (r + 1) * n] for r in range(n)])),
        PowerValue.of(1),
        radius,
        lambda t: PowerValue.of(t),
        name=f"M({n}, Z, 2)",
    )


# trees ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    index: int
    element: tuple

    def to_json(self):
        return {"summand": self.index, "element": [str(x) for x in self.element]}


@dataclass(frozen=True)
class Node:
    left: object
    right: object

    def to_json(self):
        return [_tree_json(self.left), _tree_json(self.right)]


def _tree_json(t):
    return t.to_json() if hasattr(t, "to_json") else str(t)


def tree_leaves(t) -> list:
    if isinstance(t, Node):
        return tree_leaves(t.left) + tree_leaves(t.right)
    if isinstance(t, (tuple, list)) and len(t) == 2 and not isinstance(t, Leaf):
        return tree_leaves(t[0]) + tree_leaves(t[1])
    return [t]


def tree_valuation(t, C, leaf_norm: Callable | None = None) -> PowerValue:
    """Value of a binary tree: a leaf is worth its norm, a node C·max(children).

    Trees are :class:`Node`/:class:`Leaf` objects or nested pairs of norm values.
    """
    C = pv(C)
    if cmp_power(C, PowerValue.of(0)) is not Ordering.GREATER:
        raise ValueError("C must be positive")
    if isinstance(t, Node):
        kids = (t.left, t.right)
    elif isinstance(t, (tuple, list)) and not isinstance(t, Leaf):
        if len(t) != 2:
            raise ValueError("tree nodes must have exactly two children")
        kids = tuple(t)
    else:
        return pv(leaf_norm(t)) if leaf_norm else pv(t)
    return C * pv_max(tree_valuation(k, C, leaf_norm) for k in kids)


def _cmp_key(a, b):
    order = cmp_power(a[0], b[0])
    if order is Ordering.UNKNOWN:
        return -1 if float(a[0]) < float(b[0]) else 1
    return order.value


def greedy_tree(items: Sequence[tuple[PowerValue, object]], C) -> tuple[PowerValue, object]:
    """Best tree over the given leaves: repeatedly merge the two smallest values."""
    C = pv(C)
    pool = [(pv(v), t) for v, t in items]
    if not pool:
        raise ValueError("no leaves")
    while len(pool) > 1:
        pool.sort(key=cmp_to_key(_cmp_key))
        (a, ta), (b, tb) = pool[0], pool[1]
        pool = pool[2:] + [(C * pv_max([a, b]), Node(ta, tb))]
    return pool[0]


@dataclass(frozen=True)
class TreeBudget:
    max_leaves: int = 8
    max_magnitude: int | None = None


def _multisets(cands, target, slots, radius):
    """Multisets of at most ``slots`` candidate points summing to target."""
    out = []
    rank = len(target)

    def dfs(start, remaining, left, chosen):
        if not any(remaining) and chosen:
            out.append(tuple(chosen))
        if left == 0:
            return
        if any(abs(x) > left * radius for x in remaining):
            return
        for idx in range(start, len(cands)):
            v = cands[idx]
            chosen.append(v)
            dfs(idx, tuple(remaining[j] - v[j] for j in range(rank)), left - 1, chosen)
            chosen.pop()

    dfs(0, tuple(target), slots, [])
    return out


def tree_norm(parts: Sequence[tuple[NormedLattice, Sequence]], C, budget: TreeBudget | None = None) -> BoundsCertificate:
    """Bounds for the tree-infimum norm of an element of a direct sum.

    ``parts`` lists (summand lattice, component) pairs.  The trivial tree
    (one leaf per nonzero component) gives the first upper bound U; any tree
    with two or more leaves is worth at least C times its largest leaf, so
    only leaves of norm below U/C are enumerated, and a tree with k leaves is
    worth at least C^ceil(log2 k) times the smallest nonzero norm.
    """
    C = pv(C)
    if cmp_power(C, PowerValue.of(1)) is Ordering.LESS:
        raise ValueError("tree norm search requires C >= 1")
    budget = budget or TreeBudget()
    K = budget.max_leaves
    used = {"max_leaves": K, "max_magnitude": budget.max_magnitude if budget.max_magnitude is not None else "auto"}
    comps = [(i, lat, tuple(int(x) for x in e)) for i, (lat, e) in enumerate(parts)]
    nonzero = [(i, lat, e) for i, lat, e in comps if any(e)]
    if not nonzero:
        zero = PowerValue.of(0)
        return BoundsCertificate(zero, zero, None, used)
    if len(nonzero) > K:
        raise ValueError("leaf budget smaller than the number of nonzero components")

    upper, witness = greedy_tree([(lat.norm(e), Leaf(i, e)) for i, lat, e in nonzero], C)
    m_min = min((lat.min_nonzero for _, lat, _ in nonzero), key=float)
    notes = []
    lower_extra = []
    Cf = float(C)

    def leaf_depth_bound(k: int) -> PowerValue:
        return C ** math.ceil(math.log2(k)) * m_min if k > 1 else m_min

    # leaves worth considering have C·|leaf| < U
    limit = upper / C
    per_comp = []
    others = len(nonzero) - 1
    for i, lat, e in nonzero:
        r = lat.radius(limit)
        if budget.max_magnitude is not None and (r is None or r > budget.max_magnitude):
            r = budget.max_magnitude
            lower_extra.append(C * lat.linf_lower(r + 1))
            notes.append(f"summand {i}: leaf magnitude capped at {r}")
        if r is None:
            raise ValueError(f"summand {i}: no finite leaf box; supply max_magnitude")
        cands = []
        for v in lat.points(r):
            nv = lat.norm(v)
            if cmp_power(nv, limit) is Ordering.LESS:
                cands.append((v, nv))
        cands.sort(key=lambda t: (float(t[1]), t[0]))
        vecs = [v for v, _ in cands]
        nmap = dict(cands)
        multis = _multisets(vecs, e, K - others, r)
        if (e,) not in multis:
            multis.append((e,))  # the component as a single leaf
        per_comp.append((i, nmap, multis, lat))

    # explore combinations; float screening then exact evaluation
    best_f = float(upper)
    shortlist = []
    for combo in itertools.product(*[ms for _, _, ms, _ in per_comp]):
        k = sum(len(m) for m in combo)
        if k > K or k < 2:
            continue
        vals = []
        for (i, nmap, _, lat), m in zip(per_comp, combo):
            for v in m:
                vals.append(float(nmap[v]) if v in nmap else float(lat.norm(v)))
        vals.sort()
        # greedy value in floats
        pool = vals[:]
        while len(pool) > 1:
            pool.sort()
            a, b = pool[0], pool[1]
            pool = pool[2:] + [Cf * max(a, b)]
        if pool[0] <= best_f * (1 + 1e-9):
            shortlist.append((pool[0], combo))
            best_f = min(best_f, pool[0])
    for val_f, combo in shortlist:
        if val_f > best_f * (1 + 1e-9):
            continue
        items = []
        for (i, nmap, _, lat), m in zip(per_comp, combo):
            for v in m:
                items.append((nmap[v] if v in nmap else lat.norm(v), Leaf(i, v)))
        value, tree = greedy_tree(items, C)
        if cmp_power(value, upper) is Ordering.LESS:
            upper, witness = value, tree

    lower = upper
    if leaf_depth_bound(K + 1) < upper:
        lower_extra.append(leaf_depth_bound(K + 1))
        notes.append("leaf count capped by budget")
    for b in lower_extra:
        if cmp_power(b, lower) is Ordering.LESS:
            lower = b
    return BoundsCertificate(lower, upper, witness, used, tuple(notes))


# short norms -------------------------------------------------------------------------


def direct_sum_short_norm(parts: Sequence[tuple[NormedLattice, Sequence]], p) -> PowerValue:
    """‖(|m_i|)‖_p over the summands."""
    return lp_norm([lat.norm(e) for lat, e in parts], p)


def free_module_norm(coeffs: Iterable[tuple], p, halo: HaloDescriptor | None = None) -> PowerValue:
    """‖(|a_x|·|x|)‖_p for coefficients a_x with basis weights |x|."""
    halo = halo or HaloDescriptor.integers()
    return lp_norm([halo.norm(a) * pv(w) for a, w in coeffs], p)


# operator norms ------------------------------------------------------------------


def parse_context(ctx) -> PAdicContext | None:
    """``"real"`` → None; ``"padic:P"``, a PAdicContext or a p-adic halo → PAdicContext."""
    if ctx is None or ctx == "real":
        return None
    if isinstance(ctx, PAdicContext):
        return ctx
    if isinstance(ctx, HaloDescriptor):
        return PAdicContext(ctx.prime) if ctx.norm_kind == "padic" else None
    if isinstance(ctx, str) and ctx.startswith("padic:"):
        return PAdicContext(int(ctx.split(":", 1)[1]))
    raise ValueError(f"unknown context {ctx!r}")


def operator_norm_value(A: Matrix, q="2", context="real") -> PowerValue:
    """Operator norm of A on ℓ^q (exact, or a certified interval for real q = 2)."""
    A = mat(A)
    q = PExponent.parse(q)
    ctx = parse_context(context)
    if not A:
        return PowerValue.of(0)
    if ctx is not None:
        if not q.is_inf:
            raise ValueError("p-adic operator norms are supported for q = inf only")
        return pv_max(padic_abs(x, ctx) for row in A for x in row)
    if q.is_inf:
        return PowerValue.of(max(sum(abs(x) for x in row) for row in A))
    if q.value == 1:
        return PowerValue.of(max(sum(abs(x) for x in col) for col in transpose(A)))
    if q.value == 2:
        return spectral_norm(A)
    raise ValueError(f"unsupported exponent q = {q}")


def operator_norm(A: Matrix, q="2", context="real") -> BoundsCertificate:
    value = operator_norm_value(A, q, context)
    lo, hi = value.bracket()
    if value.is_exact:
        return BoundsCertificate(value, value, None, {"q": str(PExponent.parse(q))})
    return BoundsCertificate(PowerValue.of(lo), PowerValue.of(hi), None, {"q": str(PExponent.parse(q))})


def operator_norm_leq_one(A: Matrix, q="2", context="real") -> bool:
    """Exact decision of ‖A‖ <= 1."""
    A = mat(A)
    q = PExponent.parse(q)
    if parse_context(context) is None and not q.is_inf and q.value == 2:
        return psd_leq_one(gram(A))
    return cmp_power(operator_norm_value(A, q, context), PowerValue.of(1)) is not Ordering.GREATER


# boundedness --------------------------------------------------------------------------


def boundedness_bound(basis_norms: Sequence, C, module_constants: tuple, image_norms: Sequence) -> PowerValue:
    """C_N^(n-1) · D_N · C_f · C with C_f the largest image norm."""
    n = len(basis_norms)
    if n == 0:
        raise ValueError("empty basis")
    C_N, D_N = (pv(x) for x in module_constants)
    C_f = pv_max(image_norms)
    return C_N ** (n - 1) * D_N * C_f * pv(C)


def check_boundedness_hypothesis(norm: Callable, basis: Sequence[Sequence], C, coefficient_samples, halo=None):
    """Return coefficient tuples violating ‖(s_j)‖_∞ <= C·|Σ s_j e_j|."""
    halo = halo or HaloDescriptor.integers()
    C = pv(C)
    bad = []
    for s in coefficient_samples:
        combo = [sum(as_fraction(sj) * as_fraction(ej[k]) for sj, ej in zip(s, basis)) for k in range(len(basis[0]))]
        lhs = pv_max(halo.norm(sj) for sj in s)
        rhs = C * pv(norm(tuple(combo)))
        if cmp_power(lhs, rhs) is Ordering.GREATER:
            bad.append(tuple(s))
    return bad
