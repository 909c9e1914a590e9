# Flows and halos
#
# A halo is a ring with a norm that satisfies a relaxed triangle inequality.
# Raising every norm to a power t rescales the exponent of that inequality,
# so the integers with the squared absolute value are a halo for p = 1/2 but
# not for p = 1.

from fractions import Fraction

from halos.halo import HaloDescriptor, check_halo_axioms, flow_halo, lip_functor, parse_samples, renorm_infimum

Z = HaloDescriptor.integers()
print(Z)

# Flow by t = 2: |x| becomes |x|^2 and the exponent halves.

Z2 = flow_halo(Z, 2)
print(Z2, [str(Z2.norm(x)) for x in range(4)])

# The axioms hold on a sample window ...

report = check_halo_axioms(Z2, parse_samples("-5..5"))
print("passed:", report.passed, "after", report.checks, "comparisons")

# ... but keep the squared norm and insist on the ordinary triangle inequality and it breaks at once.

bad = check_halo_axioms(HaloDescriptor.integers(2, 1), parse_samples("-5..5"))
print(bad.first_violation)

# Re-normalisation repairs it: split f into parts and take the cheapest sum.
# 3 = 1 + 1 + 1 costs 3, far below |3|^2 = 9.

for f in range(1, 6):
    cert = renorm_infimum(HaloDescriptor.integers(2, 1), 1, f)
    print(f, cert.upper, cert.witness.parts, "exact" if cert.meets else "gap")

# The Lip functor turns an exponent p into the constant C = 2^(1/p).

for H in (Z, Z2, HaloDescriptor.padic(3)):
    print(H, "->", lip_functor(H))

# Flows compose: sigma_(1/2) undoes sigma_2.

print(flow_halo(Z2, Fraction(1, 2)) == Z)
