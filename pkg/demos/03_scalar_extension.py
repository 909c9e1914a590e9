# Scalar extension to the p-adic numbers
#
# The norm on Z^n extends to Q_p^n as an infimum over presentations
# t = sum s_k f_k.  Over Q_p the Lipschitz constant is 1, and the result is
# the entrywise p-adic sup norm regardless of which l^q norm sat on Z^n.

from fractions import Fraction

from halos.halo import HaloDescriptor
from halos.module import coordinate_lattice, operator_norm_lattice
from halos.scalar import padic_abs, pv_max
from halos.tensor import presentation_norm, quotient_norm
from halos.isometry import ckn_lattice, phi_projection

p = 5
S = HaloDescriptor.padic(p)
base = coordinate_lattice(rank=2, q=1)

for target in [(1, 0), (p, 1), (Fraction(1, p), 0), (Fraction(3, 25), Fraction(10, 7))]:
    cert = presentation_norm(target, base, S)
    expected = pv_max(padic_abs(x, p) for x in target)
    print(target, cert.lower, cert.upper, "sup norm:", expected)

# The spectral norm on 2x2 integer matrices extends the same way.

L = operator_norm_lattice(2)
target = [Fraction(1, 5), 3, 0, Fraction(2, 25)]
print(presentation_norm(target, L, S).to_json())

# In the real context the l^1 norm of the target bounds every presentation from below.

print(presentation_norm((Fraction(1, 3), Fraction(1, 2)), base, HaloDescriptor.reals()).to_json())

# Quotient norms: the one-dimensional form phi = (1) collapses the pair space onto Z.

print(quotient_norm([1], phi_projection([[1]]), ckn_lattice(1)).to_json())
