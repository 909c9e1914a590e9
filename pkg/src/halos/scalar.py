"""Exact arithmetic for norm values.

Every norm value in the package is a :class:`PowerValue`: either an exact
number ``base ** exp`` with rational base and exponent, or a rational interval
known to contain the true value.  Exact values are kept in a canonical form
``s ** (1/b)`` with ``b`` minimal, so two exact values are equal as numbers
iff they are equal as dataclasses.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

__all__ = [
    "Ordering",
    "UndecidedComparison",
    "PowerValue",
    "PAdicContext",
    "as_fraction",
    "cmp_power",
    "pv",
    "pv_max",
    "pv_min",
    "padic_valuation",
    "padic_abs",
    "is_psd",
    "psd_leq_one",
    "iroot",
    "root_bounds",
    "DEFAULT_REL_BITS",
]

# default relative width 2**-64 for certified intervals
DEFAULT_REL_BITS = 64
_MAX_REFINE_BITS = 4096


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNKNOWN = None


class UndecidedComparison(ArithmeticError):
    """Raised when an ordering between interval values cannot be decided."""


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer."""
    if n < 0:
        raise ValueError("iroot of negative integer")
    if k < 1:
        raise ValueError("root index must be positive")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def _exact_root(q: Fraction, k: int) -> Fraction | None:
    a, b = iroot(q.numerator, k), iroot(q.denominator, k)
    if a**k == q.numerator and b**k == q.denominator:
        return Fraction(a, b)
    return None


def _log2(q: Fraction) -> float:
    return math.log2(q.numerator) - math.log2(q.denominator)


def root_bounds(q: Fraction, k: int, rel_bits: int = DEFAULT_REL_BITS) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= q**(1/k) <= hi`` with relative width about ``2**-rel_bits``."""
    if q < 0:
        raise ValueError("root of negative rational")
    if q == 0:
        return Fraction(0), Fraction(0)
    exact = _exact_root(q, k)
    if exact is not None:
        return exact, exact
    scale_bits = max(0, rel_bits + 2 - math.floor(_log2(q) / k))
    a, b = q.numerator, q.denominator
    n = a * b ** (k - 1) << (k * scale_bits)
    r = iroot(n, k)
    denom = b << scale_bits
    return Fraction(r, denom), Fraction(r + 1, denom)


def _primes_dividing(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PowerValue:
    """A nonnegative real, exact (``base ** exp``) or a certified interval.

    Build instances with :meth:`of` or :meth:`interval`; direct construction
    skips canonicalisation.
    """

    base: Fraction | None = None
    exp: Fraction | None = None
    lo: Fraction | None = None
    hi: Fraction | None = None

    def __post_init__(self):
        if self.base is not None:
            if self.lo is not None or self.hi is not None or self.exp is None:
                raise ValueError("exact PowerValue needs base and exp only")
            if self.base < 0:
                raise ValueError("PowerValue base must be nonnegative")
            if self.base == 0 and self.exp <= 0:
                raise ValueError("0 ** t requires t > 0")
        else:
            if self.lo is None or self.hi is None or self.exp is not None:
                raise ValueError("interval PowerValue needs lo and hi")
            if not 0 <= self.lo <= self.hi:
                raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    # construction -------------------------------------------------------

    @classmethod
    def of(cls, base, exp=1) -> PowerValue:
        base, exp = as_fraction(base), as_fraction(exp)
        if base < 0:
            raise ValueError("PowerValue base must be nonnegative")
        if base == 0:
            if exp <= 0:
                raise ValueError("0 ** t requires t > 0")
            return cls(Fraction(0), Fraction(1))
        if base == 1 or exp == 0:
            return cls(Fraction(1), Fraction(1))
        a, b = exp.numerator, exp.denominator
        if a < 0:
            base, a = 1 / base, -a
        s = base**a
        for q in _primes_dividing(b):
            while b % q == 0:
                r = _exact_root(s, q)
                if r is None:
                    break
                s, b = r, b // q
        return cls(s, Fraction(1, b))

    @classmethod
    def interval(cls, lo, hi) -> PowerValue:
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo == hi:
            return cls.of(lo)
        return cls(lo=lo, hi=hi)

    # inspection ---------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.base is not None

    @property
    def is_rational(self) -> bool:
        return self.is_exact and self.exp == 1

    @property
    def is_zero(self) -> bool:
        return self.is_exact and self.base == 0

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.base

    def bracket(self, rel_bits: int = DEFAULT_REL_BITS) -> tuple[Fraction, Fraction]:
        if not self.is_exact:
            return self.lo, self.hi
        if self.exp == 1:
            return self.base, self.base
        return root_bounds(self.base, self.exp.denominator, rel_bits)

    def log2(self) -> float:
        """Approximate base-2 logarithm; ``-inf`` for zero."""
        if self.is_exact:
            if self.base == 0:
                return -math.inf
            return _log2(self.base) * float(self.exp)
        mid = (self.lo + self.hi) / 2
        return -math.inf if mid == 0 else _log2(mid)

    def __float__(self) -> float:
        if self.is_exact and self.base == 0:
            return 0.0
        return 2.0 ** self.log2()

    # arithmetic ---------------------------------------------------------

    def __mul__(self, other) -> PowerValue:
        other = pv(other)
        if self.is_zero or other.is_zero:
            return PowerValue.of(0)
        if self.is_exact and other.is_exact:
            b1, b2 = self.exp.denominator, other.exp.denominator
            lcm = b1 * b2 // math.gcd(b1, b2)
            return PowerValue.of(self.base ** (lcm // b1) * other.base ** (lcm // b2), Fraction(1, lcm))
        l1, h1 = self.bracket()
        l2, h2 = other.bracket()
        return PowerValue.interval(l1 * l2, h1 * h2)

    __rmul__ = __mul__

    def __pow__(self, t) -> PowerValue:
        t = as_fraction(t)
        if self.is_exact:
            if self.base == 0:
                return PowerValue.of(0, t)
            return PowerValue.of(self.base, self.exp * t)
        lo, hi = self.lo, self.hi
        if t == 0:
            return PowerValue.of(1)
        if t < 0:
            if lo == 0:
                raise ZeroDivisionError("negative power of an interval touching 0")
            lo, hi, t = 1 / hi, 1 / lo, -t
        a, b = t.numerator, t.denominator
        return PowerValue.interval(root_bounds(lo**a, b)[0], root_bounds(hi**a, b)[1])

    def __truediv__(self, other) -> PowerValue:
        return self * (pv(other) ** -1)

    def __add__(self, other) -> PowerValue:
        other = pv(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.is_exact and other.is_exact:
            if self.exp == 1 and other.exp == 1:
                return PowerValue.of(self.base + other.base)
            if self == other:
                return PowerValue.of(2) * self
        l1, h1 = self.bracket()
        l2, h2 = other.bracket()
        return PowerValue.interval(l1 + l2, h1 + h2)

    __radd__ = __add__

    # ordering -----------------------------------------------------------

    def cmp(self, other) -> Ordering:
        return cmp_power(self, pv(other))

    def _decided(self, other) -> Ordering:
        order = cmp_power(self, pv(other))
        if order is Ordering.UNKNOWN:
            raise UndecidedComparison(f"cannot order {self} and {other}")
        return order

    def __lt__(self, other):
        return self._decided(other) is Ordering.LESS

    def __le__(self, other):
        return self._decided(other) is not Ordering.GREATER

    def __gt__(self, other):
        return self._decided(other) is Ordering.GREATER

    def __ge__(self, other):
        return self._decided(other) is not Ordering.LESS

    def equals(self, other) -> bool:
        """Numeric equality; raises if undecidable."""
        return self._decided(other) is Ordering.EQUAL

    # serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        if self.is_exact:
            return {"base": str(self.base), "exp": str(self.exp)}
        return {"lo": str(self.lo), "hi": str(self.hi)}

    @classmethod
    def from_json(cls, data: dict) -> PowerValue:
        if "base" in data:
            return cls.of(data["base"], data.get("exp", "1"))
        return cls.interval(data["lo"], data["hi"])

    def __str__(self) -> str:
        if self.is_exact:
            if self.exp == 1:
                return str(self.base)
            return f"{self.base}^({self.exp})"
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def pv(x) -> PowerValue:
    """Coerce a rational (or PowerValue) to a PowerValue."""
    if isinstance(x, PowerValue):
        return x
    return PowerValue.of(x)


def _cmp_exact(a: PowerValue, b: PowerValue) -> Ordering:
    if a.base == 0 or b.base == 0:
        if a.base == b.base:
            return Ordering.EQUAL
        return Ordering.LESS if a.base == 0 else Ordering.GREATER
    la, lb = a.log2(), b.log2()
    if abs(la - lb) > 1e-9 * max(1.0, abs(la), abs(lb)):
        return Ordering.LESS if la < lb else Ordering.GREATER
    b1, b2 = a.exp.denominator, b.exp.denominator
    lcm = b1 * b2 // math.gcd(b1, b2)
    x, y = a.base ** (lcm // b1), b.base ** (lcm // b2)
    if x == y:
        return Ordering.EQUAL
    return Ordering.LESS if x < y else Ordering.GREATER


def _cmp_brackets(l1, h1, l2, h2) -> Ordering:
    if h1 < l2:
        return Ordering.LESS
    if l1 > h2:
        return Ordering.GREATER
    return Ordering.UNKNOWN


def cmp_power(a: PowerValue, b: PowerValue) -> Ordering:
    """Order two PowerValues; exact pairs are always decided."""
    a, b = pv(a), pv(b)
    if a.is_exact and b.is_exact:
        return _cmp_exact(a, b)
    if not a.is_exact and not b.is_exact:
        return _cmp_brackets(a.lo, a.hi, b.lo, b.hi)
    bits = DEFAULT_REL_BITS
    while True:
        l1, h1 = a.bracket(bits)
        l2, h2 = b.bracket(bits)
        order = _cmp_brackets(l1, h1, l2, h2)
        exact_side = a if a.is_exact else b
        if order is not Ordering.UNKNOWN or exact_side.is_rational or bits >= _MAX_REFINE_BITS:
            return order
        bits *= 4


def pv_max(values: Iterable) -> PowerValue:
    values = [pv(v) for v in values]
    if not values:
        return PowerValue.of(0)
    if all(v.is_exact for v in values):
        best = values[0]
        for v in values[1:]:
            if _cmp_exact(v, best) is Ordering.GREATER:
                best = v
        return best
    brackets = [v.bracket() for v in values]
    return PowerValue.interval(max(lo for lo, _ in brackets), max(hi for _, hi in brackets))


def pv_min(values: Iterable) -> PowerValue:
    values = [pv(v) for v in values]
    if not values:
        raise ValueError("min of empty sequence")
    if all(v.is_exact for v in values):
        best = values[0]
        for v in values[1:]:
            if _cmp_exact(v, best) is Ordering.LESS:
                best = v
        return best
    brackets = [v.bracket() for v in values]
    return PowerValue.interval(min(lo for lo, _ in brackets), min(hi for _, hi in brackets))


# p-adic ---------------------------------------------------------------------

_TRIAL_DIVISION_LIMIT = 10**6


@dataclass(frozen=True)
class PAdicContext:
    """The p-adic absolute value on rationals.

    Primality is verified by trial division for ``p < 10**6``; larger moduli
    are accepted unchecked with a warning.
    """

    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, int) or self.p < 2:
            raise ValueError(f"p must be an integer >= 2, got {self.p!r}")
        if self.p < _TRIAL_DIVISION_LIMIT:
            if any(self.p % d == 0 for d in range(2, math.isqrt(self.p) + 1)):
                raise ValueError(f"{self.p} is not prime")
        else:
            warnings.warn(f"primality of {self.p} not verified", stacklevel=2)

    def valuation(self, x) -> int | None:
        return padic_valuation(x, self.p)

    def abs(self, x) -> PowerValue:
        return padic_abs(x, self)

    def __str__(self):
        return f"padic:{self.p}"


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(x, p: int) -> int | None:
    """v_p(x) for rational x; ``None`` stands for +infinity (x = 0)."""
    x = as_fraction(x)
    if x == 0:
        return None
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def padic_abs(x, ctx) -> PowerValue:
    p = ctx.p if isinstance(ctx, PAdicContext) else int(ctx)
    v = padic_valuation(x, p)
    if v is None:
        return PowerValue.of(0)
    return PowerValue.of(Fraction(p) ** -v)


# positive semidefiniteness ---------------------------------------------------


def _check_symmetric(G: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(G)
    rows = [[as_fraction(x) for x in row] for row in G]
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise ValueError("matrix must be symmetric")
    return rows


def is_psd(M: Sequence[Sequence]) -> bool:
    """Exact PSD test by symmetric Gaussian elimination on positive pivots."""
    A = _check_symmetric(M)
    remaining = list(range(len(A)))
    while remaining:
        if any(A[i][i] < 0 for i in remaining):
            return False
        k = next((i for i in remaining if A[i][i] > 0), None)
        if k is None:
            # all remaining diagonals vanish: PSD iff the block is zero
            return all(A[i][j] == 0 for i in remaining for j in remaining)
        remaining.remove(k)
        pivot = A[k][k]
        for i in remaining:
            if A[i][k] == 0:
                continue
            factor = A[i][k] / pivot
            for j in remaining:
                A[i][j] -= factor * A[k][j]
    return True


def psd_leq_one(G: Sequence[Sequence]) -> bool:
    """True iff the largest eigenvalue of the symmetric matrix G is <= 1."""
    A = _check_symmetric(G)
    n = len(A)
    return is_psd([[(1 if i == j else 0) - A[i][j] for j in range(n)] for i in range(n)])


def lcm_all(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)
