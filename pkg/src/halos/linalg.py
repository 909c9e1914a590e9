"""Exact matrices over the rationals, stored as tuples of tuples of Fractions."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

from .scalar import as_fraction

Matrix = tuple  # tuple[tuple[Fraction, ...], ...]
Vector = tuple  # tuple[Fraction, ...]

__all__ = [
    "Matrix",
    "mat",
    "vec",
    "shape",
    "identity",
    "zeros",
    "transpose",
    "matmul",
    "matvec",
    "mat_add",
    "mat_sub",
    "mat_scale",
    "gram",
    "det",
    "inverse",
    "is_identity",
    "is_integral",
    "unit_matrix",
    "parse_matrix",
    "parse_vector",
    "matrix_to_json",
    "integer_solve",
    "IntegerSolution",
]


def mat(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(as_fraction(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def vec(xs: Iterable) -> Vector:
    return tuple(as_fraction(x) for x in xs)


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(m: int, n: int | None = None) -> Matrix:
    n = m if n is None else n
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m))


def unit_matrix(n: int, i: int, j: int) -> Matrix:
    """E_{i,j} with zero-based indices."""
    return tuple(tuple(Fraction(int(r == i and c == j)) for c in range(n)) for r in range(n))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if shape(A)[1] != len(B):
        raise ValueError(f"shape mismatch {shape(A)} x {shape(B)}")
    Bt = transpose(B)
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def matvec(A: Matrix, v: Sequence) -> Vector:
    return tuple(sum((a * as_fraction(x) for a, x in zip(row, v)), Fraction(0)) for row in A)


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(A, B))


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(A, B))


def mat_scale(c, A: Matrix) -> Matrix:
    c = as_fraction(c)
    return tuple(tuple(c * a for a in row) for row in A)


def gram(A: Matrix) -> Matrix:
    """AᵀA."""
    return matmul(transpose(A), A)


def is_identity(A: Matrix) -> bool:
    return all(A[i][j] == (i == j) for i in range(len(A)) for j in range(len(A[i])))


def is_integral(A: Matrix) -> bool:
    return all(x.denominator == 1 for row in A for x in row)


def _require_square(A: Matrix) -> int:
    m, n = shape(A)
    if m != n:
        raise ValueError("matrix must be square")
    return n


def det(A: Matrix) -> Fraction:
    n = _require_square(A)
    M = [list(r) for r in A]
    sign, result = 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        result *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / M[c][c]
                for k in range(c, n):
                    M[r][k] -= f * M[c][k]
    return sign * result


def inverse(A: Matrix) -> Matrix:
    n = _require_square(A)
    M = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[n:]) for row in M)


# parsing ------------------------------------------------------------------


def parse_matrix(data) -> Matrix:
    """Accept a nested list (entries int or "num/den") or a JSON string of one."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValueError("matrix must be a list of rows")
    return mat(data)


def parse_vector(data) -> Vector:
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, list):
        raise ValueError("vector must be a list")
    return vec(data)


def matrix_to_json(A: Matrix) -> list:
    return [[str(x) for x in row] for row in A]


# integer linear systems ------------------------------------------------------


class IntegerSolution:
    """All integer solutions of P x = c: ``particular + kernel @ z``.

    ``kernel_left_inverse`` K⁺ satisfies K⁺·kernel = I, so the coordinates of
    a kernel vector k are recovered as z = K⁺ k.
    """

    def __init__(self, particular, kernel, kernel_left_inverse):
        self.particular: tuple[int, ...] = particular
        self.kernel: tuple[tuple[int, ...], ...] = kernel  # list of basis vectors
        self.kernel_left_inverse: tuple[tuple[int, ...], ...] = kernel_left_inverse

    @property
    def kernel_rank(self) -> int:
        return len(self.kernel)

    def point(self, z: Sequence[int]) -> tuple[int, ...]:
        x = list(self.particular)
        for zj, k in zip(z, self.kernel):
            if zj:
                for i, ki in enumerate(k):
                    x[i] += zj * ki
        return tuple(x)


def _col_op(M, V, dst, src, q):
    """column dst -= q * column src, on both M and V."""
    for row in M:
        row[dst] -= q * row[src]
    for row in V:
        row[dst] -= q * row[src]


def _col_swap(M, V, a, b):
    for row in M:
        row[a], row[b] = row[b], row[a]
    for row in V:
        row[a], row[b] = row[b], row[a]


def integer_solve(P: Sequence[Sequence[int]], c: Sequence[int]) -> IntegerSolution:
    """Integer solutions of P x = c via a column Hermite reduction.

    Finds a unimodular V with P·V in column echelon form; the trailing
    columns of V span the integer kernel.
    """
    rows = [[int(x) for x in r] for r in P]
    m = len(rows)
    N = len(rows[0]) if rows else 0
    if any(len(r) != N for r in rows) or len(c) != m:
        raise ValueError("shape mismatch")
    V = [[int(i == j) for j in range(N)] for i in range(N)]
    pivots: list[int] = []  # pivot row for each echelon column
    col = 0
    for i in range(m):
        if col == N:
            break
        while True:
            nz = [j for j in range(col, N) if rows[i][j] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(rows[i][j]))
            for j in nz:
                if j != j0:
                    _col_op(rows, V, j, j0, rows[i][j] // rows[i][j0])
        if not nz:
            continue
        _col_swap(rows, V, col, nz[0])
        pivots.append(i)
        col += 1
    r = col
    y = [0] * N
    for k, i in enumerate(pivots):
        rest = int(c[i]) - sum(rows[i][j] * y[j] for j in range(k))
        q, rem = divmod(rest, rows[i][k])
        if rem:
            raise ValueError("no integer solution")
        y[k] = q
    x = tuple(sum(V[i][j] * y[j] for j in range(N)) for i in range(N))
    check = [sum(int(a) * b for a, b in zip(row, x)) for row in P]
    if check != [int(ci) for ci in c]:
        raise ValueError("no solution")
    kernel = tuple(tuple(V[i][j] for i in range(N)) for j in range(r, N))
    Vinv = inverse(mat(V))
    left = tuple(tuple(int(v) for v in Vinv[j]) for j in range(r, N))
    return IntegerSolution(x, kernel, left)
