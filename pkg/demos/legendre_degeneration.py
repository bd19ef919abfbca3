"""
The Legendre family near its cusp
=================================

Periods of y^2 = x(x-1)(x-λ), the nilpotent orbit that approximates them,
the exponential rate at which they converge, and one Siegel set containing
the whole lifted image above height 2.
"""

import numpy as np

from siegelhodge.mhs import deligne_splitting, polarized_mhs_check
from siegelhodge.period.containment import siegel_containment_check
from siegelhodge.period.decay import schmid_decay_check
from siegelhodge.period.families import get_family
from siegelhodge.period.legendre import legendre_tau, lift_tau, monodromy_by_continuation
from siegelhodge.period.parabolic import build_limit_parabolic, horospherical_factorization_track

fam = get_family("legendre")

# τ(1/2) = i: the square lattice
print("tau(1/2) =", legendre_tau(0.5))

# Continuing the periods once around λ = 0 gives the unipotent monodromy exp(N)
print("monodromy:\n", np.round(monodromy_by_continuation(), 10))

# The limit mixed Hodge structure is polarized by N and the symplectic form
m = fam.orbit.limit_mhs()
print("polarized:", bool(polarized_mhs_check(m, fam.orbit.ns[0], fam.orbit.polarization, 1)))
print("Hodge numbers of the limit:", deligne_splitting(m).hodge_numbers())

# The lift Φ̃(z) = 2z + O(q) against the orbit θ(z) = 2z
for y in (1.0, 2.0, 4.0):
    z = 0.1 + 1j * y
    print(f"y={y}: |Φ̃ - θ| = {abs(lift_tau(z) - 2 * z):.3e}")

# log d ≈ log K + β log y - rate y on y ∈ [2, 8]
fit, = schmid_decay_check("legendre")
print(f"rate {fit.rate:.5f} (2π = {2 * np.pi:.5f}), β = {fit.beta:.3f}, K = {fit.K:.4f}")

# Along the imaginary axis the torus part grows like sqrt(y)
p = build_limit_parabolic(fam.orbit)
ys = np.geomspace(5, 50, 6)
track = horospherical_factorization_track(fam.orbit, [[y] for y in ys], p, period=fam.lift)
print("a_1 / sqrt(y):", np.round([c.a_part[0] / np.sqrt(y) for c, y in zip(track.coords, ys)], 6))

# One Siegel set holds every Φ̃(z) with |x| <= 1/2, 2 <= y <= 50
res = siegel_containment_check("legendre", grid=2500)
w = res.witnesses[0]
print(f"witness: |x| <= {w.u_bounds[0][1]:.3f}, y > {w.t[0]:.3f}; uncovered: {len(res.uncovered)}")
