# Lipschitz direct sums
#
# On M1 + M2 the norm of an element is an infimum over binary trees whose
# leaves split the components.  Each internal node multiplies by C, so a tree
# costs max over leaves of C^depth * |leaf|.

from halos.module import TreeBudget, coordinate_lattice, greedy_tree, tree_norm, tree_valuation

Z = coordinate_lattice()

# Two leaves of norm 2 under one node: 2 * max(2, 2) = 4.

print(tree_valuation((2, 2), 2))
cert = tree_norm([(Z, (2,)), (Z, (2,))], 2)
print(cert.to_json())

# A lone component costs just its own norm.

print(tree_norm([(Z, (5,)), (Z, (0,))], 2).value)

# Three equal leaves: one of them must sit at depth 2.

print(tree_valuation(((1, 1), 1), 2), tree_valuation((1, (1, 1)), 2))

# For a fixed multiset of leaf norms, merging the two smallest first is optimal.

value, tree = greedy_tree([(n, f"leaf{n}") for n in (1, 1, 2, 5)], 2)
print(value, tree)

# A small table of the norm on Z + Z with C = 2.

for a in range(0, 4):
    row = [str(tree_norm([(Z, (a,)), (Z, (b,))], 2, TreeBudget(max_leaves=6)).value) for b in range(0, 4)]
    print(a, row)
