"""
Weight filtrations of nilpotent operators
=========================================

Monodromy filtrations, their relative version, and a cone whose weight
filtration jumps.  Everything here is exact rational arithmetic.
"""

from siegelhodge.exactlin import ExactMatrix, Filtration, Subspace
from siegelhodge.weightfilt import (ConeSpec, brute_force_monodromy_filtrations, cone_constancy_check,
                                    jordan_block, monodromy_filtration, relative_weight_filtration)

# A single Jordan block of size 3: the weights are -2, 0, 2 around the center
N = jordan_block(3)
W = monodromy_filtration(N, 0)
print("W(J3):", [(l, W[l].dim) for l in range(-3, 3)])

# The lattice search knows nothing about the closed formula, and finds the same filtration
print("brute force agrees:", brute_force_monodromy_filtrations(N, 0) == [W])

# Two commuting blocks: N1 acts on (e1, e2), N2 on (e3, e4)
Z = ExactMatrix.zeros(2)
N1 = ExactMatrix.block_diag(jordan_block(2), Z)
N2 = ExactMatrix.block_diag(Z, jordan_block(2))

# W(N2) centered at 1, then the filtration of N1 relative to it
W2 = monodromy_filtration(N2, 1)
M = relative_weight_filtration(N1, W2)
print("relative M equals W(N1 + N2):", M == monodromy_filtration(N1 + N2, 1))

# Relative filtrations can fail to exist: N e2 = e1 across adjacent weights
W_bad = Filtration(2, {0: Subspace(2, [[1, 0]]), 1: Subspace.full(2)}, "inc")
print("across weights 0 and 1:", relative_weight_filtration(jordan_block(2), W_bad))

# On the open cone spanned by N1 and N2 the filtration is constant
print("cone of N1, N2 constant:", cone_constancy_check(ConeSpec([N1, N2]), 1).constant)

# a = E12 + E34, b = -E12: on the ray a + b the first block cancels
a = ExactMatrix([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
b = ExactMatrix([[0, -1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
check = cone_constancy_check(ConeSpec([a, b], [(2, 1)]), 0)
(ca, wa), (cb, wb) = check.counterexample
print("jumping cone:", [str(c) for c in ca], "vs", [str(c) for c in cb])
