# Short isometries of matrices
#
# A unit U acts on the pair space through (U, U^-T).  Asking both parts to
# have operator norm at most 1 cuts out the orthogonal group over R, the
# group GL_n(Z_p) over Q_p and the signed permutation matrices over Z.

from fractions import Fraction

from halos.isometry import (
    MatrixPair,
    enumerate_Kn_Z,
    generate_relations,
    siso_membership_int,
    siso_membership_padic,
    siso_membership_real,
    siso_phi_membership,
)

rotation = [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]
stretch = [[2, 0], [0, 1]]

print(siso_membership_real(rotation).verdict, siso_membership_real(stretch).verdict)

# The same rotation over the p-adics: 5 sits in the denominators.

for p in (2, 3, 5, 7):
    print(p, siso_membership_padic(rotation, p).verdict)

# Integer points: 2, 8, 48, 384 signed permutation matrices.

print([len(enumerate_Kn_Z(n)) for n in range(1, 5)])
print(siso_membership_int(enumerate_Kn_Z(2)[3]).to_json()["verdict"])

# Flowing the base norm by t changes norms but never a verdict against 1.

for t in (Fraction(1, 2), 2, 3):
    print(t, siso_membership_real(stretch, t).verdict, siso_membership_real(rotation, t).verdict)

# The group is cut out by quadratic relations U W^T = I = W^T U.

for rel in generate_relations(2):
    print(rel)
pair = MatrixPair.from_matrix([[0, -1], [1, 0]])
print([str(r.evaluate(pair)) for r in generate_relations(2)])

# With a bilinear form phi the group becomes the phi-isometries of norm <= 1.

print(siso_phi_membership([[2, 0], [0, Fraction(1, 2)]], [[0, 1], [1, 0]]).verdict)
