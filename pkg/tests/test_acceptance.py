"""Acceptance criteria 1-12, one marked test group per criterion.

Run directly (``python3 tests/test_acceptance.py``) for a plain PASS/FAIL
listing, or through pytest where the summary hook prints the same lines.
"""

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from halos.halo import HaloDescriptor, RenormBudget, check_halo_axioms, parse_samples, renorm_infimum
from halos.isometry import (
    DualBasisElement,
    MatrixPair,
    dual_basis_norm,
    dual_basis_norm_bounds,
    enumerate_Kn_Z,
    generate_relations,
    iota,
    iota_bound,
    pair_norm,
    siso_membership_int,
    siso_membership_padic,
    siso_membership_real,
)
from halos.linalg import det, gram, inverse, is_identity, mat
from halos.module import TreeBudget, coordinate_lattice, tree_leaves, tree_norm
from halos.norms import lp_norm
from halos.scalar import Ordering, PowerValue, cmp_power, padic_abs, pv_max
from halos.tensor import presentation_norm

from oracles import rational_inverse, rational_matmul, valuation

TABLES = json.loads((Path(__file__).parent / "data" / "oracle_tables.json").read_text())
FLOWS = [Fraction(1, 2), Fraction(2), Fraction(3)]
PRIMES = [2, 3, 5, 7]


def rand_fraction(rng, num=9, den=9):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_matrix(rng, n, num=9, den=9):
    return [[rand_fraction(rng, num, den) for _ in range(n)] for _ in range(n)]


def rand_invertible(rng, n):
    while True:
        U = rand_matrix(rng, n)
        if det(mat(U)) != 0:
            return U


# shared sample sets for the membership criteria and their flowed reruns


def real_cases():
    rng = random.Random(5)
    accept = [
        [[0, -1], [1, 0]],
        [["3/5", "-4/5"], ["4/5", "3/5"]],
        *enumerate_Kn_Z(2),
    ]
    reject = [[[2, 0], [0, 1]], [[1, 1], [0, 1]]]
    while len(reject) < 22:
        U = rand_matrix(rng, rng.choice([2, 3]), 4, 4)
        if not is_identity(gram(mat(U))):
            reject.append(U)
    return accept, reject


def unit_mod_p(rng, p, bound=9):
    while True:
        x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if x and valuation(x, p) == 0:
            return x


def padic_cases(p):
    rng = random.Random(100 + p)
    accept, reject = [], []
    for _ in range(10):
        n = rng.choice([2, 3])
        U = [[rng.randint(-20, 20) if j > i else int(i == j) for j in range(n)] for i in range(n)]
        accept.append(U)
    while len(accept) < 25:
        n = rng.choice([2, 3])
        # entries with denominators prime to p
        U = [[unit_mod_p(rng, p) * rng.randint(0, 3) for _ in range(n)] for _ in range(n)]
        d = det(mat(U))
        if d and valuation(d, p) == 0:
            accept.append(U)
    for _ in range(10):
        n = rng.choice([2, 3])
        U = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        i, j = rng.randrange(n), rng.randrange(n)
        U[i][j] = unit_mod_p(rng, p) / Fraction(p) ** rng.randint(1, 2)
        reject.append(U)
    while len(reject) < 20:
        n = rng.choice([2, 3])
        U = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
        U[rng.randrange(n)] = [x * p for x in U[rng.randrange(n)]]
        if det(mat(U)) != 0 and valuation(det(mat(U)), p) != 0:
            reject.append(U)
    rotation = [["3/5", "-4/5"], ["4/5", "3/5"]]
    (accept if p != 5 else reject).append(rotation)
    return accept, reject


def real_verdicts(flow):
    accept, reject = real_cases()
    return [siso_membership_real(U, flow).verdict for U in accept + reject]


def padic_verdicts(flow):
    out = []
    for p in PRIMES:
        accept, reject = padic_cases(p)
        out.extend(siso_membership_padic(U, p, flow).verdict for U in accept + reject)
    return out


def int_verdicts(flow, nmax=3):
    out = []
    for n in range(1, nmax + 1):
        for U in enumerate_Kn_Z(n):
            out.append(
                (
                    siso_membership_int(U, flow).verdict,
                    siso_membership_real(U, flow).verdict,
                    siso_membership_padic(U, 3, flow).verdict,
                )
            )
    return out


def assert_exact_decisions(cert):
    for check in cert.checks:
        if "exact_leq_one" in check.evidence:
            assert check.evidence["exact_leq_one"] == check.passed


# 1 -------------------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_c1_worked_direct_sum_example():
    Z = coordinate_lattice()
    start = time.perf_counter()
    cert = tree_norm([(Z, (2,)), (Z, (2,))], 2)
    elapsed = time.perf_counter() - start
    assert cert.lower == PowerValue.of(4) and cert.upper == PowerValue.of(4)
    assert cert.meets
    assert len(tree_leaves(cert.witness)) == 2
    assert elapsed < 1.0


# 2 -------------------------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize(
    "halo",
    [
        HaloDescriptor.integers(1, 1),
        HaloDescriptor.integers(2, Fraction(1, 2)),
        HaloDescriptor.trivial(),
        HaloDescriptor.padic(2),
        HaloDescriptor.padic(3),
        HaloDescriptor.padic(5),
    ],
    ids=str,
)
def test_c2_halo_axioms_pass(halo):
    report = check_halo_axioms(halo, parse_samples("-5..5"))
    assert report.passed
    assert report.undecided == []


@pytest.mark.criterion(2)
def test_c2_squared_norm_with_exponent_one_fails():
    report = check_halo_axioms(HaloDescriptor.integers(2, 1), parse_samples("-5..5"))
    assert not report.passed and report.undecided == []
    witness = report.first_violation
    assert witness.pair == (1, 1)
    assert witness.axiom.startswith("triangle")
    # |2| = 4 against |1| + |1| = 2
    assert HaloDescriptor.integers(2, 1).norm(2) == PowerValue.of(4)


# 3 -------------------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_c3_lp_monotonicity():
    rng = random.Random(3)
    exponents = [Fraction(1, 2), 1, 2, "inf"]
    order = {Fraction(1, 2): 0, 1: 1, 2: 2, "inf": 3}
    violations = 0
    for _ in range(1000):
        xs = [abs(rand_fraction(rng, 20, 7)) for _ in range(rng.randint(1, 6))]
        norms = {q: lp_norm(xs, q) for q in exponents}
        for q in exponents:
            for p in exponents:
                if order[q] < order[p]:
                    c = cmp_power(norms[p], norms[q])
                    if c not in (Ordering.LESS, Ordering.EQUAL):
                        violations += 1
    assert violations == 0


# 4 -------------------------------------------------------------------------------------


@pytest.mark.criterion(4)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_c4_dual_basis_norms(n):
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for b in (0, 1):
                e = DualBasisElement(i, j, b)
                cert = dual_basis_norm_bounds(e, n)
                assert cert.lower == PowerValue.of(1)
                assert cert.upper == PowerValue.of(1)
                assert dual_basis_norm(e, n) == PowerValue.of(1)


# 5 -------------------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_c5_real_points():
    accept, reject = real_cases()
    assert len(enumerate_Kn_Z(2)) == 8 and len(reject) == 22
    for U in accept:
        cert = siso_membership_real(U)
        assert cert.verdict == "member", U
        assert_exact_decisions(cert)
    for U in reject:
        cert = siso_membership_real(U)
        assert cert.verdict == "non-member", U
        assert cert.checks[0].name == "orthogonal" and not cert.checks[0].passed
        assert_exact_decisions(cert)


# 6 -------------------------------------------------------------------------------------


@pytest.mark.criterion(6)
@pytest.mark.parametrize("p", PRIMES)
def test_c6_padic_points(p):
    accept, reject = padic_cases(p)
    for U in accept:
        assert siso_membership_padic(U, p).verdict == "member", U
    for U in reject:
        cert = siso_membership_padic(U, p)
        assert cert.verdict == "non-member", U
        assert {c.name for c in cert.violated} & {"entries integral", "det is a unit"}


@pytest.mark.criterion(6)
def test_c6_rational_rotation_by_prime():
    R = [["3/5", "-4/5"], ["4/5", "3/5"]]
    for p in (3, 7, 11, 13):
        assert siso_membership_padic(R, p).member
    assert not siso_membership_padic(R, 5).member
    # at p = 2 the entries 3/5 and 4/5 are 2-adic integers and det = 1
    assert siso_membership_padic(R, 2).member


# 7 -------------------------------------------------------------------------------------


def _int_matmul(A, B):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n))


@pytest.mark.criterion(7)
@pytest.mark.parametrize("n,count", [(1, 2), (2, 8), (3, 48), (4, 384)])
def test_c7_integer_points(n, count):
    start = time.perf_counter()
    Ks = enumerate_Kn_Z(n)
    for U in Ks:
        assert siso_membership_int(U).member
        assert siso_membership_real(U).member
        assert siso_membership_padic(U, 3).member
    elapsed = time.perf_counter() - start
    assert len(Ks) == count
    assert elapsed < 10.0
    group = {tuple(tuple(int(x) for x in row) for row in U) for U in Ks}
    assert len(group) == count
    for U in Ks:
        Uinv = inverse(U)
        assert tuple(tuple(int(x) for x in row) for row in Uinv) in group
    elems = list(group)
    for A in elems:
        for B in elems:
            assert _int_matmul(A, B) in group


# 8 -------------------------------------------------------------------------------------


@pytest.mark.criterion(8)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_c8_relations(n):
    rng = random.Random(80 + n)
    rels = generate_relations(n)
    for _ in range(50):
        U = rand_invertible(rng, n)
        W = [list(r) for r in zip(*rational_inverse(U))]
        pair = MatrixPair(U, W)
        assert all(r.evaluate(pair) == 0 for r in rels)
    found = 0
    while found < 50:
        U, W = rand_matrix(rng, n), rand_matrix(rng, n)
        prod = rational_matmul(U, [list(r) for r in zip(*W)])
        if prod == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]:
            continue
        found += 1
        assert any(r.evaluate(MatrixPair(U, W)) != 0 for r in rels)


# 9 -------------------------------------------------------------------------------------


@pytest.mark.criterion(9)
@pytest.mark.parametrize("p", [2, 5])
def test_c9_scalar_extension(p):
    rng = random.Random(90 + p)
    base = coordinate_lattice(rank=2, q=1)
    S = HaloDescriptor.padic(p)
    gaps = 0
    for _ in range(100):
        target = [unit_mod_p(rng, p, 12) * Fraction(p) ** rng.randint(-2, 2) for _ in range(2)]
        cert = presentation_norm(target, base, S)
        expected = pv_max(padic_abs(x, p) for x in target)
        if not cert.meets:
            gaps += 1
            continue
        assert cert.value == expected, target
    assert gaps == 0


# 10 ------------------------------------------------------------------------------------


@pytest.mark.criterion(10)
@pytest.mark.parametrize("n", [2, 3])
def test_c10_boundedness_bound(n):
    rng = random.Random(100 + n)
    for _ in range(200):
        F = ([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)], [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        if not any(x for M in F for row in M for x in row):
            F[0][0][0] = 1
        s = rand_fraction(rng) or Fraction(1)
        image = iota(F, s)
        for q in ("2", "inf"):
            bound = iota_bound(F, s, q)
            order = cmp_power(pair_norm(image, "real", q), bound)
            assert order in (Ordering.LESS, Ordering.EQUAL), (F, s, q)


# 11 ------------------------------------------------------------------------------------


@pytest.mark.criterion(11)
@pytest.mark.parametrize("t", FLOWS, ids=str)
def test_c11_flow_invariance(t):
    assert real_verdicts(t) == real_verdicts(1)
    assert padic_verdicts(t) == padic_verdicts(1)
    assert int_verdicts(t) == int_verdicts(1)


# 12 ------------------------------------------------------------------------------------


@pytest.mark.criterion(12)
def test_c12_renorm_matches_brute_force():
    mismatches = []
    for key, v in TABLES["renorm"].items():
        power, p, f = key.split(",")
        H = HaloDescriptor.integers(int(power), Fraction(p) if p != "inf" else "inf")
        cert = renorm_infimum(H, H.p, int(f), RenormBudget(max_parts=6, max_magnitude=8))
        expected = PowerValue.of(v) if p == "inf" else PowerValue.of(v, 1 / Fraction(p))
        if not (cert.meets and cert.value == expected):
            mismatches.append((key, cert.lower, cert.upper, expected))
    assert mismatches == []


@pytest.mark.criterion(12)
def test_c12_tree_norm_matches_brute_force():
    Z = coordinate_lattice()
    mismatches = []
    for key, v in TABLES["tree"].items():
        a, b, C = (int(x) for x in key.split(","))
        cert = tree_norm([(Z, (a,)), (Z, (b,))], C, TreeBudget(max_leaves=6))
        if not (cert.meets and cert.value == PowerValue.of(v)):
            mismatches.append((key, cert.lower, cert.upper, v))
    assert mismatches == []


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
