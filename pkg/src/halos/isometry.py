"""Matrix pairs, the dual basis of the pair algebra, and short isometry groups.

A pair (U, W) holds an endomorphism U of V = S^n and an endomorphism W of
the dual space, written in the dual basis.  The involution sends (U, W) to
(Wᵀ, Uᵀ); a pair is a unit fixed by it exactly when W = (U⁻¹)ᵀ.  The short
isometries are the units whose two components both have operator norm at
most 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .certificate import BoundsCertificate
from .linalg import (
    Matrix,
    det,
    gram,
    inverse,
    is_identity,
    is_integral,
    mat,
    mat_scale,
    matmul,
    matrix_to_json,
    shape,
    transpose,
    unit_matrix,
    zeros,
)
from .module import NormedLattice, operator_norm_value, parse_context
from .norms import PExponent, lp_norm
from .scalar import (
    Ordering,
    PowerValue,
    as_fraction,
    cmp_power,
    padic_abs,
    padic_valuation,
    psd_leq_one,
    pv_max,
)
from .spectral import nuclear_norm, spectral_norm

__all__ = [
    "MatrixPair",
    "DualBasisElement",
    "MembershipCertificate",
    "Check",
    "involution",
    "pair_norm",
    "dual_basis_norm",
    "dual_basis_norm_bounds",
    "evaluate_functional",
    "ckn_norm",
    "ckn_lattice",
    "functional_norm",
    "siso_membership_real",
    "siso_membership_padic",
    "siso_membership_int",
    "pair_membership",
    "siso_phi_membership",
    "sigma_phi",
    "phi_projection",
    "enumerate_Kn_Z",
    "Polynomial",
    "generate_relations",
    "iota",
    "iota_bound",
]


# pairs ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixPair:
    U: Matrix
    W: Matrix

    def __post_init__(self):
        U, W = mat(self.U), mat(self.W)
        if shape(U)[0] != shape(U)[1] or shape(U) != shape(W):
            raise ValueError("a pair needs two square matrices of the same size")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return len(self.U)

    @classmethod
    def from_matrix(cls, U) -> MatrixPair:
        """(U, (U⁻¹)ᵀ), the pair a unit U acts by."""
        U = mat(U)
        return cls(U, transpose(inverse(U)))

    def __mul__(self, other: MatrixPair) -> MatrixPair:
        return MatrixPair(matmul(self.U, other.U), matmul(self.W, other.W))

    def to_json(self) -> dict:
        return {"U": matrix_to_json(self.U), "W": matrix_to_json(self.W)}


def involution(pair: MatrixPair) -> MatrixPair:
    return MatrixPair(transpose(pair.W), transpose(pair.U))


def pair_norm(pair: MatrixPair, context="real", q="2") -> PowerValue:
    """max(‖U‖ on ℓ^q, ‖W‖ on the dual ℓ^q*); p-adic contexts use ℓ^∞ for both."""
    q = PExponent.parse(q)
    if parse_context(context) is not None:
        return pv_max([operator_norm_value(pair.U, q, context), operator_norm_value(pair.W, q, context)])
    return pv_max([operator_norm_value(pair.U, q, context), operator_norm_value(pair.W, q.dual(), context)])


# the dual basis -----------------------------------------------------------------------


@dataclass(frozen=True)
class DualBasisElement:
    """The functional reading entry (i, j) of slot b; indices start at 1."""

    i: int
    j: int
    b: int

    def __post_init__(self):
        if self.b not in (0, 1) or self.i < 1 or self.j < 1:
            raise ValueError(f"bad index {(self.i, self.j, self.b)}")

    def check(self, n: int):
        if self.i > n or self.j > n:
            raise ValueError(f"index {(self.i, self.j)} out of range for n = {n}")

    def __call__(self, pair: MatrixPair) -> Fraction:
        self.check(pair.n)
        return (pair.U if self.b == 0 else pair.W)[self.i - 1][self.j - 1]

    def dual_pair(self, n: int) -> MatrixPair:
        """E_{i,j,b}: the pair with a single 1 at this position."""
        self.check(n)
        E = unit_matrix(n, self.i - 1, self.j - 1)
        return MatrixPair(E, zeros(n)) if self.b == 0 else MatrixPair(zeros(n), E)

    def coordinates(self, n: int) -> tuple[Matrix, Matrix]:
        """The functional as a coefficient pair (R0, R1)."""
        E = self.dual_pair(n)
        return E.U, E.W


def dual_basis_norm_bounds(e: DualBasisElement, n: int) -> BoundsCertificate:
    """Two independent bounds on the norm of e_{i,j,b} against the real ℓ² pair norm.

    Upper: |B_b[i,j]| = |δ_iᵀ B_b δ_j| <= ‖δ_i‖₂ ‖B_b‖ ‖δ_j‖₂ <= ‖δ_i‖₂ ‖δ_j‖₂ ‖(B₀, B₁)‖.
    Lower: the value at E_{i,j,b} divided by the norm of E_{i,j,b}.
    """
    e.check(n)
    delta_i = [int(k == e.i - 1) for k in range(n)]
    delta_j = [int(k == e.j - 1) for k in range(n)]
    upper = lp_norm(delta_i, 2) * lp_norm(delta_j, 2)
    E = e.dual_pair(n)
    lower = PowerValue.of(abs(e(E))) / pair_norm(E, "real", 2)
    return BoundsCertificate(lower, upper, E)


def dual_basis_norm(e: DualBasisElement, n: int) -> PowerValue:
    return dual_basis_norm_bounds(e, n).value


def evaluate_functional(c: tuple[Matrix, Matrix], pair: MatrixPair) -> Fraction:
    """⟨(R0, R1), (U, W)⟩ = Σ R0[i][j] U[i][j] + Σ R1[i][j] W[i][j]."""
    R0, R1 = mat(c[0]), mat(c[1])
    return sum(
        (r * u for A, B in ((R0, pair.U), (R1, pair.W)) for ra, ua in zip(A, B) for r, u in zip(ra, ua)),
        Fraction(0),
    )


def ckn_norm(c: tuple[Matrix, Matrix]) -> PowerValue:
    """Dual of the real ℓ² pair norm: ‖R0‖_nuclear + ‖R1‖_nuclear."""
    return nuclear_norm(mat(c[0])) + nuclear_norm(mat(c[1]))


def _unflatten(v: Sequence[int], n: int) -> tuple[Matrix, Matrix]:
    k = n * n
    R0 = mat([v[r * n : (r + 1) * n] for r in range(n)])
    R1 = mat([v[k + r * n : k + (r + 1) * n] for r in range(n)])
    return R0, R1


def ckn_lattice(n: int) -> NormedLattice:
    """Integer functionals on pairs, coordinates ordered (R0 row-major, R1 row-major)."""

    def radius(U: PowerValue):
        # every entry is bounded by the spectral norm, hence by the nuclear sum
        hi = U.bracket()[1]
        r = hi.numerator // hi.denominator
        return r - 1 if r == hi else r

    return NormedLattice(
        2 * n * n,
        lambda v: ckn_norm(_unflatten(v, n)),
        PowerValue.of(1),
        radius,
        lambda t: PowerValue.of(t),
        name=f"C(K_{n})",
    )


def functional_norm(F: tuple[Matrix, Matrix]) -> PowerValue:
    """Norm of an integer point (F0, F1) of the double dual: max of spectral norms."""
    return pv_max([spectral_norm(mat(F[0])), spectral_norm(mat(F[1]))])


def iota(F: tuple[Matrix, Matrix], s) -> MatrixPair:
    """f ⊗ s ↦ (s·F0, s·F1)."""
    s = as_fraction(s)
    return MatrixPair(mat_scale(s, mat(F[0])), mat_scale(s, mat(F[1])))


def iota_bound(F: tuple[Matrix, Matrix], s, q="2", context="real") -> PowerValue:
    """n^(1 + 1/q) · ‖f‖ · |s|."""
    q = PExponent.parse(q)
    n = len(F[0])
    ctx = parse_context(context)
    s_abs = PowerValue.of(abs(as_fraction(s))) if ctx is None else padic_abs(s, ctx)
    factor = PowerValue.of(n) if q.is_inf else PowerValue.of(n, 1 + 1 / q.value)
    return factor * functional_norm(F) * s_abs


# membership -------------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"condition": self.name, "passed": self.passed, "evidence": self.evidence}


@dataclass(frozen=True)
class MembershipCertificate:
    member: bool
    checks: tuple[Check, ...]
    context: str = "real"
    flow: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.member and not any(not c.passed for c in self.checks):
            raise ValueError("a non-member certificate needs a violated condition")

    @property
    def verdict(self) -> str:
        return "member" if self.member else "non-member"

    @property
    def violated(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "context": self.context,
            "flow": str(self.flow),
            "checks": [c.to_json() for c in self.checks],
        }


def _square(U) -> Matrix:
    U = mat(U)
    m, n = shape(U)
    if m != n or m == 0:
        raise ValueError("expected a nonempty square matrix")
    return U


def _value(v: PowerValue):
    return str(v.base) if v.is_rational else v.to_json()


def _flowed_leq_one(exact_leq: bool, value: PowerValue | None, t: Fraction) -> tuple[bool, dict]:
    """Decide value^t <= 1, preferring the flowed value and falling back on the exact test.

    The two must agree: x^t <= 1 iff x <= 1 for t > 0.
    """
    evidence = {"exact_leq_one": exact_leq}
    if value is None:
        return exact_leq, evidence
    flowed = value**t
    evidence["flowed_norm"] = _value(flowed)
    order = cmp_power(flowed, PowerValue.of(1))
    if order is Ordering.UNKNOWN:
        return exact_leq, evidence
    decided = order is not Ordering.GREATER
    if decided != exact_leq:
        raise ArithmeticError("flowed comparison disagrees with the exact test")
    return decided, evidence


def _real_norm_check(name: str, A: Matrix | None, t: Fraction) -> Check:
    if A is None:
        return Check(name, False, {"reason": "singular"})
    G = gram(A)
    exact = psd_leq_one(G)
    # orthogonal columns give exactly 1 without any eigenvalue work
    value = PowerValue.of(1) if is_identity(G) else spectral_norm(A)
    passed, evidence = _flowed_leq_one(exact, value, t)
    return Check(name, passed, evidence)


def _safe_inverse(U: Matrix) -> Matrix | None:
    try:
        return inverse(U)
    except ZeroDivisionError:
        return None


def siso_membership_real(U, flow=1) -> MembershipCertificate:
    """U ∈ O_n: UᵀU = I, certified alongside ‖U‖₂ <= 1 and ‖U⁻¹‖₂ <= 1.

    ``flow`` replaces every norm by its t-th power before comparing with 1.
    """
    U = _square(U)
    t = as_fraction(flow)
    G = gram(U)
    residual = [[G[i][j] - (i == j) for j in range(len(G))] for i in range(len(G))]
    orthogonal = all(x == 0 for row in residual for x in row)
    checks = [
        Check("orthogonal", orthogonal, {"gram_residual": matrix_to_json(residual)}),
        _real_norm_check("norm(U) <= 1", U, t),
        _real_norm_check("norm(U^-1) <= 1", _safe_inverse(U), t),
    ]
    norms_ok = checks[1].passed and checks[2].passed
    if norms_ok != orthogonal:
        raise ArithmeticError("orthogonality and the norm conditions disagree")
    return MembershipCertificate(orthogonal, tuple(checks), "real", t)


def _padic_norm_check(name: str, A: Matrix | None, p: int, t: Fraction) -> Check:
    if A is None:
        return Check(name, False, {"reason": "singular"})
    value = pv_max(padic_abs(x, p) for row in A for x in row)
    exact = cmp_power(value, PowerValue.of(1)) is not Ordering.GREATER
    passed, evidence = _flowed_leq_one(exact, value, t)
    return Check(name, passed, evidence)


def _val_json(v):
    return "inf" if v is None else v


def siso_membership_padic(U, p: int, flow=1) -> MembershipCertificate:
    """U ∈ GL_n(ℤ_p): integral entries and a unit determinant."""
    U = _square(U)
    t = as_fraction(flow)
    vals = [[padic_valuation(x, p) for x in row] for row in U]
    integral = all(v is None or v >= 0 for row in vals for v in row)
    d = det(U)
    dv = padic_valuation(d, p)
    checks = [
        Check("entries integral", integral, {"valuations": [[_val_json(v) for v in row] for row in vals]}),
        Check("det is a unit", dv == 0, {"det": str(d), "det_valuation": _val_json(dv)}),
        _padic_norm_check("norm(U) <= 1", U, p, t),
        _padic_norm_check("norm(U^-1) <= 1", _safe_inverse(U), p, t),
    ]
    member = integral and dv == 0
    if member != (checks[2].passed and checks[3].passed):
        raise ArithmeticError("valuation and norm conditions disagree")
    return MembershipCertificate(member, tuple(checks), f"padic:{p}", t)


def siso_membership_int(U, flow=1) -> MembershipCertificate:
    """U ∈ O_n(ℝ) ∩ GL_n(ℤ)."""
    U = _square(U)
    t = as_fraction(flow)
    integral = is_integral(U)
    d = det(U)
    checks = [
        Check("integer entries", integral, {}),
        Check("det = ±1", abs(d) == 1, {"det": str(d)}),
    ]
    real = siso_membership_real(U, t)
    checks.extend(real.checks)
    member = all(c.passed for c in checks)
    return MembershipCertificate(member, tuple(checks), "int", t)


def pair_membership(pair: MatrixPair, context="real", flow=1) -> MembershipCertificate:
    """Is (U, W) a short isometry: U·Wᵀ = I = Wᵀ·U and both components of norm <= 1?"""
    t = as_fraction(flow)
    rel1 = matmul(pair.U, transpose(pair.W))
    rel2 = matmul(transpose(pair.W), pair.U)
    checks = [
        Check("U W^T = I", is_identity(rel1), {"product": matrix_to_json(rel1)}),
        Check("W^T U = I", is_identity(rel2), {"product": matrix_to_json(rel2)}),
    ]
    if context == "int":
        checks.append(Check("integer entries", is_integral(pair.U) and is_integral(pair.W), {}))
        context_norm = "real"
    else:
        context_norm = context
    ctx = parse_context(context_norm)
    if ctx is None:
        checks.append(_real_norm_check("norm(U) <= 1", pair.U, t))
        checks.append(_real_norm_check("norm(W) <= 1", pair.W, t))
    else:
        checks.append(_padic_norm_check("norm(U) <= 1", pair.U, ctx.p, t))
        checks.append(_padic_norm_check("norm(W) <= 1", pair.W, ctx.p, t))
    return MembershipCertificate(all(c.passed for c in checks), tuple(checks), str(context), t)


def sigma_phi(U, Phi) -> Matrix:
    """Adjoint of U for the bilinear form Φ: Φ⁻¹ Uᵀ Φ."""
    U, Phi = mat(U), mat(Phi)
    return matmul(matmul(inverse(Phi), transpose(U)), Phi)


def siso_phi_membership(U, Phi, context="real", flow=1) -> MembershipCertificate:
    """U ∈ K_n(φ): U preserves Φ and (U, σ_φ(U)ᵀ) is a short isometry of the context."""
    U, Phi = _square(U), _square(Phi)
    if det(Phi) == 0:
        raise ValueError("the bilinear form is degenerate")
    t = as_fraction(flow)
    lhs = matmul(matmul(transpose(U), Phi), U)
    preserves = lhs == Phi
    checks = [Check("U^T Phi U = Phi", preserves, {"U^T Phi U": matrix_to_json(lhs)})]
    embedded = MatrixPair(U, transpose(sigma_phi(U, Phi)))
    inner = pair_membership(embedded, context, t)
    checks.extend(Check("embedded pair: " + c.name, c.passed, c.evidence) for c in inner.checks)
    return MembershipCertificate(preserves and inner.member, tuple(checks), f"{context} phi", t)


def phi_projection(Phi) -> list[list[int]]:
    """Integer matrix of (R0, R1) ↦ R0 + Φ R1 Φ⁻¹, dual to U ↦ (U, σ_φ(U)ᵀ).

    Needs a unimodular Φ so that integer functionals stay integral.
    """
    Phi = _square(Phi)
    if abs(det(Phi)) != 1 or not is_integral(Phi):
        raise ValueError("the quotient lattice needs a unimodular integer form")
    n = len(Phi)
    Pinv = inverse(Phi)
    cols = []
    for b in (0, 1):
        for i in range(n):
            for j in range(n):
                E = unit_matrix(n, i, j)
                img = E if b == 0 else matmul(matmul(Phi, E), Pinv)
                cols.append([int(x) for row in img for x in row])
    return [list(r) for r in zip(*cols)]


# integer points -------------------------------------------------------------------------------


def enumerate_Kn_Z(n: int) -> list[Matrix]:
    """All integer U with UᵀU = I, in lexicographic order of their flattened entries.

    Columns of such U have squared length 1, so every column lies in
    {-1, 0, 1}^n; the search runs over all such columns and keeps the
    orthonormal families.
    """
    if not 1 <= n <= 4:
        raise ValueError("n must be between 1 and 4")
    unit_cols = [c for c in itertools.product((-1, 0, 1), repeat=n) if sum(x * x for x in c) == 1]
    found = []

    def extend(cols):
        if len(cols) == n:
            found.append(tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)))
            return
        for c in unit_cols:
            if all(sum(a * b for a, b in zip(c, d)) == 0 for d in cols):
                extend(cols + [c])

    extend([])
    found = sorted(set(found), key=lambda U: [x for row in U for x in row])
    return [mat(U) for U in found]


# relations -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial in variables x_{i,j,b}; monomials are sorted variable tuples."""

    terms: tuple  # ((monomial, coeff), ...) sorted, nonzero coeffs

    @classmethod
    def from_dict(cls, d: dict) -> Polynomial:
        items = [(tuple(sorted(m)), c) for m, c in d.items() if c != 0]
        return cls(tuple(sorted(items, key=lambda mc: (-len(mc[0]), mc[0]))))

    def evaluate(self, values) -> Fraction:
        """``values`` maps (i, j, b) to a number, or is a MatrixPair."""
        if isinstance(values, MatrixPair):
            pair = values
            values = lambda v: (pair.U if v[2] == 0 else pair.W)[v[0] - 1][v[1] - 1]  # noqa: E731
        elif isinstance(values, dict):
            values = values.__getitem__
        total = Fraction(0)
        for mono, c in self.terms:
            term = Fraction(c)
            for v in mono:
                term *= values(v)
            total += term
        return total

    def __str__(self):
        pieces = []
        for mono, c in self.terms:
            body = "*".join(f"x_{i}_{j}_{b}" for i, j, b in mono)
            if not body:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(body)
            elif c == -1:
                pieces.append("-" + body)
            else:
                pieces.append(f"{c}*{body}")
        return " + ".join(pieces).replace("+ -", "- ") or "0"


def generate_relations(n: int) -> list[Polynomial]:
    """Quadratic relations cutting out a·σ(a) = σ(a)·a = 1 for a = (U, W).

    Entry (i, j) of U·Wᵀ - I and of Wᵀ·U - I, deduplicated.
    """
    if n < 1:
        raise ValueError("n must be positive")
    out, seen = [], set()
    for family in (0, 1):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                d: dict = {}
                for k in range(1, n + 1):
                    if family == 0:
                        mono = ((i, k, 0), (j, k, 1))
                    else:
                        mono = ((k, i, 1), (k, j, 0))
                    key = tuple(sorted(mono))
                    d[key] = d.get(key, 0) + 1
                if i == j:
                    d[()] = d.get((), 0) - 1
                poly = Polynomial.from_dict(d)
                if poly not in seen:
                    seen.add(poly)
                    out.append(poly)
    return out
