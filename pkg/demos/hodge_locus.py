"""
Isogenous Legendre curves
=========================

Pairs (λ1, λ2) in (0, 1)^2 whose curves are isogenous of degree at most 4,
found by matching periods, with algebraic curves fitted through each
component.
"""

from siegelhodge.period.hodgelocus import hodge_locus_demo, is_flagged

res = hodge_locus_demo(grid=200, bound=4)
for comp in res.components:
    if comp.coefficients is None:
        eq = "no curve of degree <= 4"
    else:
        eq = " + ".join(f"({c})·λ1^{i}λ2^{j}" for (i, j), c in sorted(comp.coefficients.items()))
    print(comp.relation, f"{len(comp.points):4d} pts:", eq)

# λ1 + λ2 = 1 swaps the two periods; a generic pair is not related
print(is_flagged(0.3, 0.7), is_flagged(0.3, 0.4123))
