"""Built-in one- and two-parameter degenerations.

* ``legendre``: the Legendre family near ``λ = 0`` in the coordinate
  ``q = λ/16 = exp(2πi z)``.
* ``product``: two independent Legendre families on ``Q^2 ⊕ Q^2``.
* ``constant``: a constant variation with ``N = 0`` and ``τ = i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath as mp
import numpy as np
from gmpy2 import mpq

from ..exactlin import I, ExactMatrix, Filtration, Subspace
from ..mhs import PolarizationForm
from .legendre import LIFT_Y_MIN, lift_tau, lift_tau_mp
from .orbit import NilpotentOrbitData

__all__ = ["Family", "get_family", "FAMILIES", "sl2_basis"]


@dataclass(frozen=True)
class Family:
    name: str
    orbit: NilpotentOrbitData
    monodromy: tuple
    lie_algebra: tuple
    y_min: float
    _lift: Callable
    _lift_mp: Callable

    @property
    def factors(self) -> int:
        return len(self.orbit.ns)

    def lift(self, z) -> np.ndarray:
        """``Φ̃(z)`` per factor; ``z`` has shape ``(..., factors)``."""
        z = np.asarray(z, dtype=complex)
        if self.factors == 1 and (z.ndim == 0 or z.shape[-1] != 1):
            z = z[..., None]
        if z.shape[-1] != self.factors:
            raise ValueError(f"expected {self.factors} coordinates per point")
        if np.any(z.imag < self.y_min):
            raise ValueError(f"Im z below the validity threshold {self.y_min:.4f}")
        return self._lift(z)

    def lift_mp(self, z, dps: int = 50):
        """``(Φ̃(z), θ(z) - Φ̃(z))`` per factor in mpmath."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(z.imag < self.y_min):
            raise ValueError(f"Im z below the validity threshold {self.y_min:.4f}")
        return self._lift_mp(z, dps)

    def theta(self, z) -> np.ndarray:
        """Nilpotent orbit in the ``τ`` coordinate of each factor."""
        z = np.asarray(z, dtype=complex)
        return self._theta(z)

    def _theta(self, z):
        if self.name == "constant":
            return np.full(z.shape, 1j)
        return 2 * z


def sl2_basis(blocks: int = 1) -> tuple:
    """Basis of ``sl2 ⊕ ... ⊕ sl2`` acting block-diagonally on ``Q^{2 blocks}``."""
    out = []
    n = 2 * blocks
    for b in range(blocks):
        for entries in (((0, 1), 1), ((1, 0), 1)):
            rows = [[mpq(0)] * n for _ in range(n)]
            (i, j), v = entries
            rows[2 * b + i][2 * b + j] = mpq(v)
            out.append(ExactMatrix(rows, n))
        rows = [[mpq(0)] * n for _ in range(n)]
        rows[2 * b][2 * b] = mpq(1)
        rows[2 * b + 1][2 * b + 1] = mpq(-1)
        out.append(ExactMatrix(rows, n))
    return tuple(out)


_N = ExactMatrix([[0, 2], [0, 0]])
_Q = ExactMatrix([[0, -1], [1, 0]])
_Z2 = ExactMatrix.zeros(2)


def _legendre() -> Family:
    f = Filtration(2, {0: Subspace.full(2), 1: Subspace(2, [[0, 1]])}, "dec")
    orbit = NilpotentOrbitData((_N,), f, 1, PolarizationForm(_Q, -1), (2,))

    def lift_mp(z, dps):
        tau, corr = lift_tau_mp(complex(z[0]), dps)
        return (tau,), (corr,)

    return Family("legendre", orbit, (_N.exp_nilpotent(),), sl2_basis(1), LIFT_Y_MIN,
                  lambda z: lift_tau(z), lift_mp)


def _product() -> Family:
    n1 = ExactMatrix.block_diag(_N, _Z2)
    n2 = ExactMatrix.block_diag(_Z2, _N)
    f = Filtration(4, {0: Subspace.full(4), 1: Subspace(4, [[0, 1, 0, 0], [0, 0, 0, 1]])}, "dec")
    q = ExactMatrix.block_diag(_Q, _Q)
    orbit = NilpotentOrbitData((n1, n2), f, 1, PolarizationForm(q, -1), (2, 2))

    def lift_mp(z, dps):
        a = lift_tau_mp(complex(z[0]), dps)
        b = lift_tau_mp(complex(z[1]), dps)
        return (a[0], b[0]), (a[1], b[1])

    return Family("product", orbit, (n1.exp_nilpotent(), n2.exp_nilpotent()), sl2_basis(2), LIFT_Y_MIN,
                  lambda z: lift_tau(z), lift_mp)


def _constant() -> Family:
    f = Filtration(2, {0: Subspace.full(2), 1: Subspace(2, [[I, 1]])}, "dec")
    orbit = NilpotentOrbitData((_Z2,), f, 1, PolarizationForm(_Q, -1), (2,))

    def lift_mp(z, dps):
        with mp.workdps(dps):
            return (mp.mpc(0, 1),), (mp.mpc(0),)

    return Family("constant", orbit, (ExactMatrix.identity(2),), sl2_basis(1), 0.0,
                  lambda z: np.full(np.shape(z), 1j), lift_mp)


FAMILIES = {"legendre": _legendre, "product": _product, "constant": _constant}


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]()
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
