"""Certified eigenvalue bounds for symmetric rational matrices.

Characteristic polynomials and real-root isolation come from sympy; every
root is returned either exactly (rational roots, detected from the linear
factors over Q) or as a rational isolating interval refined to the requested
relative width.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy

from .linalg import Matrix, det, gram, mat, shape
from .scalar import DEFAULT_REL_BITS, PowerValue, is_psd

__all__ = [
    "eigenvalues",
    "lambda_max",
    "spectral_norm",
    "nuclear_norm",
    "lambda_max_geq",
]

_X = sympy.Symbol("x")


def _to_fraction(r) -> Fraction:
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def _charpoly(G: Matrix) -> sympy.Poly:
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in G])
    return sympy.Poly(M.charpoly(_X).as_expr(), _X, domain=sympy.QQ)


@lru_cache(maxsize=4096)
def _eigen_cached(G: Matrix, rel_bits: int):
    n = shape(G)[0]
    if n == 0:
        return ()
    bound = max(Fraction(1), max(sum(abs(x) for x in row) for row in G))
    eps = sympy.Rational(bound.numerator, bound.denominator) / sympy.Integer(2) ** rel_bits
    out = []
    _, factors = _charpoly(G).factor_list()
    for factor, mult in factors:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            r = _to_fraction(-b / a)
            out.append((r, r, mult))
            continue
        for lo, hi in factor.intervals(eps=eps, sqf=True):
            out.append((_to_fraction(lo), _to_fraction(hi), mult))
    out.sort(key=lambda t: (t[0], t[1]))
    return tuple(out)


def eigenvalues(G: Matrix, rel_bits: int = DEFAULT_REL_BITS) -> tuple[tuple[Fraction, Fraction, int], ...]:
    """Eigenvalues of symmetric G as ``(lo, hi, multiplicity)``, sorted.

    ``lo == hi`` marks an exact rational eigenvalue.
    """
    G = mat(G)
    if any(G[i][j] != G[j][i] for i in range(len(G)) for j in range(i)):
        raise ValueError("matrix must be symmetric")
    return _eigen_cached(G, rel_bits)


def lambda_max(G: Matrix, rel_bits: int = DEFAULT_REL_BITS) -> PowerValue:
    eig = eigenvalues(G, rel_bits)
    if not eig:
        return PowerValue.of(0)
    lo, hi, _ = eig[-1]
    return PowerValue.interval(max(lo, Fraction(0)), max(hi, Fraction(0)))


def spectral_norm(A: Matrix, rel_bits: int = DEFAULT_REL_BITS) -> PowerValue:
    """Largest singular value, sqrt(λ_max(AᵀA)), exact when λ_max is rational."""
    return lambda_max(gram(mat(A)), rel_bits) ** Fraction(1, 2)


def nuclear_norm(A: Matrix, rel_bits: int = DEFAULT_REL_BITS) -> PowerValue:
    """Sum of singular values."""
    total = PowerValue.of(0)
    for lo, hi, mult in eigenvalues(gram(mat(A)), rel_bits):
        s = PowerValue.interval(max(lo, Fraction(0)), max(hi, Fraction(0))) ** Fraction(1, 2)
        for _ in range(mult):
            total = total + s
    return total


def lambda_max_geq(G: Matrix, t) -> bool:
    """Exact test of λ_max(G) >= t: true iff tI - G is not positive definite."""
    G = mat(G)
    n = len(G)
    t = Fraction(t)
    H = tuple(tuple((t if i == j else 0) - G[i][j] for j in range(n)) for i in range(n))
    positive_definite = is_psd(H) and det(H) != 0
    return not positive_definite
