"""
Reduction theory for SL(2, Z)
=============================

Fundamental domains, which translates of a Siegel set meet it, Hecke
cosets, and covering an embedded Siegel set by finitely many translates.
"""

import numpy as np

from siegelhodge.reduction import (SiegelSet, hecke_correspondence, iwasawa, orr_cover_check, reduce_sl2z,
                                   siegel_intersection_enumerate)

# Reduce a point near the real axis into the fundamental domain
z0, gamma = reduce_sl2z(0.1 + 0.1j)
print("0.1 + 0.1i reduces to", z0, "by", gamma)

# Iwasawa coordinates g = n a k
c = iwasawa([[1.0, 1.0], [1.0, 2.0]])
print("a =", c.a_part, " n_12 =", c.n_part[0, 1])

# Above height 1.1 only translations move the Siegel set onto itself;
# at height 1 the inversion S touches it at the corners
for t in (1.1, 1.0):
    s = SiegelSet.upper_half(0.5, t)
    print(f"y > {t}:", sorted(siegel_intersection_enumerate(s, s, 20).gammas()))

# diag(1, p) has p + 1 cosets
for p in (2, 3, 5, 7):
    print(f"T_{p} degree:", hecke_correspondence([[1, 0], [0, p]]).degree)

# Sym^2 sends a Siegel set of SL(2) into finitely many translates of one in SL(3)
res = orr_cover_check("sym2", SiegelSet.upper_half(0.5, 1.0), samples=1000)
print("Sym^2 covered fraction:", res.covered_fraction, "with C =", [ci.tolist() for ci in res.c_set])
small = orr_cover_check("diagonal", SiegelSet.upper_half(0.5, 1.0), samples=500, c_set=[np.eye(4)],
                        g_siegel=SiegelSet(3.0, [(-0.5, 0.5)] * 2, blocks=(2, 2)))
print("diagonal with t = 3 (too high):", small.covered_fraction)
