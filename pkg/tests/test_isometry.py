import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from halos.isometry import (
    DualBasisElement,
    MatrixPair,
    ckn_norm,
    dual_basis_norm,
    enumerate_Kn_Z,
    evaluate_functional,
    generate_relations,
    involution,
    iota,
    iota_bound,
    pair_membership,
    pair_norm,
    phi_projection,
    sigma_phi,
    siso_membership_int,
    siso_membership_padic,
    siso_membership_real,
    siso_phi_membership,
)
from halos.linalg import det, identity, inverse, mat, matmul, transpose
from halos.scalar import Ordering, PowerValue, cmp_power

from oracles import rational_inverse

ROT90 = [[0, -1], [1, 0]]
ROT345 = [["3/5", "-4/5"], ["4/5", "3/5"]]
PRIMES = [2, 3, 5, 7]


def rand_matrix(rng, n, num=6, den=6):
    return [[Fraction(rng.randint(-num, num), rng.randint(1, den)) for _ in range(n)] for _ in range(n)]


def rational_orthogonal(rng):
    """Cayley transform (I - A)(I + A)⁻¹ of a random skew matrix."""
    n = rng.choice([2, 3])
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            A[i][j] = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
            A[j][i] = -A[i][j]
    I = identity(n)
    return matmul([[I[i][j] - A[i][j] for j in range(n)] for i in range(n)], inverse([[I[i][j] + A[i][j] for j in range(n)] for i in range(n)]))


class TestPairs:
    def test_involution(self):
        I = identity(2)
        assert involution(MatrixPair(I, I)) == MatrixPair(I, I)
        pair = MatrixPair([[1, 2], [0, 1]], [[3, 0], [1, 1]])
        assert involution(involution(pair)) == pair

    def test_involution_of_unit(self):
        U = [[1, 1], [0, 1]]
        pair = MatrixPair.from_matrix(U)
        image = involution(pair)
        # (Wᵀ, Uᵀ) = (U⁻¹, Uᵀ) is the pair of U⁻¹
        assert image == MatrixPair.from_matrix(inverse(mat(U)))

    def test_pair_norms(self):
        I = identity(3)
        assert pair_norm(MatrixPair(I, I)) == PowerValue.of(1)
        E = [[0, 1], [0, 0]]
        assert pair_norm(MatrixPair(E, [[0, 0], [0, 0]])) == PowerValue.of(1)
        assert pair_norm(MatrixPair([[2, 0], [0, 2]], identity(2))) == PowerValue.of(2)
        assert pair_norm(MatrixPair([[1, 1], [0, 0]], identity(2)), "real", "inf") == PowerValue.of(2)
        assert pair_norm(MatrixPair([[Fraction(1, 3), 0], [0, 1]], identity(2)), "padic:3", "inf") == PowerValue.of(3)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            MatrixPair([[1]], identity(2))


class TestDualBasis:
    @pytest.mark.parametrize("n", [1, 2])
    def test_norm_is_one(self, n):
        for i, j, b in itertools.product(range(1, n + 1), range(1, n + 1), (0, 1)):
            assert dual_basis_norm(DualBasisElement(i, j, b), n) == PowerValue.of(1)

    def test_orthogonality(self):
        e = DualBasisElement(1, 2, 0)
        assert e(DualBasisElement(1, 1, 0).dual_pair(2)) == 0
        assert e(e.dual_pair(2)) == 1

    def test_bad_index(self):
        with pytest.raises(ValueError):
            DualBasisElement(0, 1, 0)
        with pytest.raises(ValueError):
            dual_basis_norm(DualBasisElement(3, 1, 0), 2)

    def test_functional_norm_is_dual(self):
        # ⟨c, a⟩ <= ‖c‖ · pair_norm(a) on random data
        rng = random.Random(7)
        for _ in range(30):
            c = (rand_matrix(rng, 2, 3, 1), rand_matrix(rng, 2, 3, 1))
            a = MatrixPair(rand_matrix(rng, 2), rand_matrix(rng, 2))
            lhs = PowerValue.of(abs(evaluate_functional(c, a)))
            assert cmp_power(lhs, ckn_norm(c) * pair_norm(a)) is not Ordering.GREATER


class TestRealMembership:
    def test_examples(self):
        assert siso_membership_real(ROT90).member
        assert siso_membership_real(ROT345).member
        cert = siso_membership_real([[2, 0], [0, 1]])
        assert not cert.member
        assert "norm(U) <= 1" in {c.name for c in cert.violated}

    def test_singular(self):
        cert = siso_membership_real([[1, 0], [0, 0]])
        assert not cert.member

    def test_certificate_json(self):
        data = siso_membership_real(ROT345).to_json()
        assert data["verdict"] == "member" and data["context"] == "real"
        assert [c["condition"] for c in data["checks"]] == ["orthogonal", "norm(U) <= 1", "norm(U^-1) <= 1"]

    def test_rational_orthogonal_group_closure(self):
        rng = random.Random(11)
        samples = [rational_orthogonal(rng) for _ in range(15)]
        for U in samples:
            assert siso_membership_real(U).member
        for U, V in zip(samples, samples[1:]):
            if len(U) == len(V):
                assert siso_membership_real(matmul(U, V)).member
            assert siso_membership_real(inverse(U)).member

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_random_rational_agrees_with_orthogonality(self, seed):
        rng = random.Random(seed)
        U = rand_matrix(rng, rng.choice([1, 2, 3]), 2, 2)
        G = matmul(transpose(mat(U)), mat(U))
        assert siso_membership_real(U).member == (G == identity(len(U)))


class TestPadicMembership:
    @pytest.mark.parametrize("p", PRIMES)
    def test_examples(self, p):
        assert siso_membership_padic([[1, p], [0, 1]], p).member
        cert = siso_membership_padic([[Fraction(1, p), 0], [0, p]], p)
        assert not cert.member
        assert "entries integral" in {c.name for c in cert.violated}

    def test_rotation_at_seven(self):
        assert siso_membership_padic(ROT345, 7).member

    @pytest.mark.parametrize("p", PRIMES)
    def test_group_closure(self, p):
        rng = random.Random(p)
        members = []
        while len(members) < 8:
            U = [[Fraction(rng.randint(-6, 6), rng.choice([1, 1, 2, 3, 5, 7])) for _ in range(2)] for _ in range(2)]
            if siso_membership_padic(U, p).member:
                members.append(U)
        for U, V in zip(members, members[1:]):
            assert siso_membership_padic(matmul(U, V), p).member
            assert siso_membership_padic(inverse(U), p).member


class TestIntegerPoints:
    def test_examples(self):
        assert siso_membership_int([[1, 0], [0, -1]]).member
        assert siso_membership_int([[0, 1], [1, 0]]).member
        assert not siso_membership_int([[1, 1], [0, 1]]).member
        assert not siso_membership_int(ROT345).member

    @pytest.mark.parametrize("n,count", [(1, 2), (2, 8), (3, 48)])
    def test_enumeration_counts_and_order(self, n, count):
        Ks = enumerate_Kn_Z(n)
        assert len(Ks) == count
        flat = [[x for row in U for x in row] for U in Ks]
        assert flat == sorted(flat)

    def test_signed_permutations(self):
        # each element has exactly one ±1 per row and column
        for U in enumerate_Kn_Z(3):
            assert all(sorted(abs(x) for x in row) == [0, 0, 1] for row in U)

    def test_matches_brute_force_n2(self):
        found = []
        for entries in itertools.product((-1, 0, 1), repeat=4):
            U = [list(entries[:2]), list(entries[2:])]
            if matmul(transpose(mat(U)), mat(U)) == identity(2):
                found.append(entries)
        assert sorted(found) == [tuple(x for row in U for x in row) for U in enumerate_Kn_Z(2)]

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_inclusion_chain(self, n):
        for U in enumerate_Kn_Z(n):
            assert siso_membership_real(U).member
            for p in PRIMES:
                assert siso_membership_padic(U, p).member

    def test_range(self):
        with pytest.raises(ValueError):
            enumerate_Kn_Z(5)


class TestRelations:
    def test_n1(self):
        rels = generate_relations(1)
        assert [str(r) for r in rels] == ["x_1_1_0*x_1_1_1 - 1"]

    def test_count(self):
        assert len(generate_relations(2)) == 8
        assert len(generate_relations(3)) == 18

    def test_rotation_vanishes(self):
        pair = MatrixPair.from_matrix(ROT90)
        assert all(r.evaluate(pair) == 0 for r in generate_relations(2))

    def test_non_inverse_pair(self):
        pair = MatrixPair([[1, 1], [0, 1]], identity(2))
        assert any(r.evaluate(pair) != 0 for r in generate_relations(2))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_vanish_iff_inverse_pair(self, n):
        rng = random.Random(n)
        rels = generate_relations(n)
        for k in range(50):
            U = rand_matrix(rng, n)
            if det(mat(U)) == 0:
                continue
            W = transpose(mat(rational_inverse(U))) if k % 2 == 0 else rand_matrix(rng, n)
            pair = MatrixPair(U, W)
            is_inverse = matmul(pair.U, transpose(pair.W)) == identity(n) and matmul(transpose(pair.W), pair.U) == identity(n)
            assert all(r.evaluate(pair) == 0 for r in rels) == is_inverse

    def test_dict_evaluation(self):
        (r,) = generate_relations(1)
        assert r.evaluate({(1, 1, 0): 2, (1, 1, 1): Fraction(1, 2)}) == 0


class TestPhi:
    def test_identity_is_member(self):
        for Phi in ([[1, 0], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 3]]):
            assert siso_phi_membership(identity(2), Phi).member

    def test_dot_product_rotation(self):
        assert siso_phi_membership(ROT90, identity(2)).member

    def test_hyperbolic_stretch(self):
        U = [[2, 0], [0, Fraction(1, 2)]]
        Phi = [[0, 1], [1, 0]]
        cert = siso_phi_membership(U, Phi)
        assert cert.checks[0].passed  # preserves the form
        assert not cert.member

    def test_hyperbolic_stretch_padic(self):
        U = [[2, 0], [0, Fraction(1, 2)]]
        Phi = [[0, 1], [1, 0]]
        assert siso_phi_membership(U, Phi, "padic:3").member
        assert not siso_phi_membership(U, Phi, "padic:2").member

    def test_sigma_phi(self):
        U = [[1, 2], [3, 4]]
        assert sigma_phi(U, identity(2)) == transpose(mat(U))

    def test_degenerate_form(self):
        with pytest.raises(ValueError):
            siso_phi_membership(identity(2), [[1, 1], [1, 1]])

    def test_projection_dual_to_embedding(self):
        Phi = [[0, 1], [1, 0]]
        P = phi_projection(Phi)
        rng = random.Random(3)
        for _ in range(10):
            U = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
            R = [rng.randint(-3, 3) for _ in range(8)]
            R0, R1 = [R[0:2], R[2:4]], [R[4:6], R[6:8]]
            embedded = MatrixPair(U, transpose(sigma_phi(U, Phi)))
            # ⟨(R0, R1), embedded U⟩ = ⟨P(R0, R1), U⟩
            image = [sum(P[k][m] * R[m] for m in range(8)) for k in range(4)]
            lhs = evaluate_functional((R0, R1), embedded)
            rhs = sum(image[2 * i + j] * U[i][j] for i in range(2) for j in range(2))
            assert lhs == rhs

    def test_projection_needs_unimodular(self):
        with pytest.raises(ValueError):
            phi_projection([[2, 0], [0, 1]])


class TestFlowAndBounds:
    @pytest.mark.parametrize("t", [Fraction(1, 2), 2, 3])
    def test_flow_invariance(self, t):
        samples = [ROT90, ROT345, [[2, 0], [0, 1]], [[1, 1], [0, 1]], [[Fraction(1, 2), 0], [0, 1]]]
        for U in samples:
            assert siso_membership_real(U, t).verdict == siso_membership_real(U, 1).verdict
            for p in PRIMES:
                assert siso_membership_padic(U, p, t).verdict == siso_membership_padic(U, p).verdict
            assert siso_membership_int(U, t).verdict == siso_membership_int(U).verdict
            assert pair_membership(MatrixPair.from_matrix(U), "real", t).verdict == siso_membership_real(U).verdict

    def test_flow_evidence(self):
        cert = siso_membership_real([[2, 0], [0, 1]], 2)
        assert cert.checks[1].evidence["flowed_norm"] == "4"

    @pytest.mark.parametrize("n", [2, 3])
    def test_iota_bound(self, n):
        rng = random.Random(n)
        for _ in range(20):
            F = ([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
            F[0][0][0] = 1
            s = Fraction(rng.randint(1, 9), rng.randint(1, 9))
            for q in ("2", "inf"):
                order = cmp_power(pair_norm(iota(F, s), "real", q), iota_bound(F, s, q))
                assert order in (Ordering.LESS, Ordering.EQUAL)
            ctx_bound = iota_bound(F, s, "inf", "padic:3")
            assert cmp_power(pair_norm(iota(F, s), "padic:3", "inf"), ctx_bound) is not Ordering.GREATER

    def test_siso_product_bound(self):
        # |a(c_0)···a(c_k)| <= ‖c_0‖···‖c_k‖ for short isometries a
        rng = random.Random(17)
        members = [MatrixPair.from_matrix(U) for U in enumerate_Kn_Z(2)] + [MatrixPair.from_matrix(ROT345)]
        for a in members:
            for _ in range(5):
                k = rng.randint(1, 4)
                cs = [([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)], [[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)]) for _ in range(k)]
                lhs = PowerValue.of(1)
                rhs = PowerValue.of(1)
                for c in cs:
                    lhs = lhs * PowerValue.of(abs(evaluate_functional(c, a)))
                    rhs = rhs * ckn_norm(c)
                assert cmp_power(lhs, rhs) is not Ordering.GREATER
