"""Nilpotent orbits, Hodge frames on products of upper half-planes, distances, sectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import mpmath as mp
import numpy as np

from ..exactlin import ExactMatrix, Filtration, commutator
from ..mhs import MixedHodge, PolarizationForm, polarized_mhs_check
from ..weightfilt import NilpotentOperator, monodromy_filtration

__all__ = [
    "NilpotentOrbitData",
    "HodgeFrame",
    "nilpotent_orbit_eval",
    "invariant_distance",
    "hyperbolic_distance",
    "SectorSpec",
    "sector_decompose",
]


@dataclass(frozen=True)
class NilpotentOrbitData:
    """``(N_1, ..., N_n; F)`` for a weight-``k`` variation polarized by ``Q``.

    ``blocks`` records the splitting of ``V`` into rank-2 pieces, one per
    upper half-plane factor of the period domain.
    """

    ns: tuple
    limit_f: Filtration
    weight: int
    polarization: PolarizationForm
    blocks: tuple = (2,)

    def __post_init__(self):
        ops = tuple(n if isinstance(n, NilpotentOperator) else NilpotentOperator(n) for n in self.ns)
        object.__setattr__(self, "ns", ops)
        for a in ops:
            if not a.matrix.is_real():
                raise ValueError("monodromy logarithms must be rational")
            for b in ops:
                if not commutator(a.matrix, b.matrix).is_zero():
                    raise ValueError("monodromy logarithms must commute")
        if self.limit_f.direction != "dec":
            raise ValueError("limit Hodge filtration must be decreasing")

    @property
    def dim(self) -> int:
        return self.limit_f.dim

    def n_sum(self, indices: Sequence[int]) -> NilpotentOperator:
        out = ExactMatrix.zeros(self.dim)
        for i in indices:
            out = out + self.ns[i].matrix
        return NilpotentOperator(out)

    def limit_mhs(self, indices: Sequence[int] | None = None) -> MixedHodge:
        """``(W(N_{i1} + ...), F)`` centered at the weight."""
        idx = range(len(self.ns)) if indices is None else indices
        return MixedHodge(monodromy_filtration(self.n_sum(idx), self.weight), self.limit_f)

    def polarized_by_cone(self, coefficient_samples: Sequence[Sequence[int]] | None = None) -> bool:
        """Every sampled ``N = sum a_j N_j`` (``a_j > 0``) polarizes ``(W(C), F)``."""
        m = self.limit_mhs()
        k = len(self.ns)
        samples = coefficient_samples or [(1,) * k] + [tuple(2 if i == j else 1 for i in range(k)) for j in range(k)]
        for coeffs in samples:
            n = ExactMatrix.zeros(self.dim)
            for a, op in zip(coeffs, self.ns):
                n = n + op.matrix * a
            if not polarized_mhs_check(m, n, self.polarization, self.weight):
                return False
        return True


@dataclass(frozen=True)
class HodgeFrame:
    """Basis (columns) of ``F^1`` for a product of weight-one rank-two pieces.

    Block ``j`` spans a line ``(τ_j, 1)`` in its own ``C^2``.
    """

    matrix: np.ndarray
    blocks: tuple = (2,)

    def taus(self) -> tuple:
        out = []
        pos = 0
        for b in self.blocks:
            if b != 2:
                raise ValueError("only rank-two blocks have an upper half-plane coordinate")
            sub = self.matrix[pos:pos + 2]
            col = sub[:, np.argmax(np.abs(sub).sum(axis=0))]
            out.append(complex(col[0] / col[1]))
            pos += 2
        return tuple(out)

    @classmethod
    def from_taus(cls, taus: Sequence[complex]) -> "HodgeFrame":
        n = len(taus)
        m = np.zeros((2 * n, n), dtype=complex)
        for j, t in enumerate(taus):
            m[2 * j, j] = t
            m[2 * j + 1, j] = 1.0
        return cls(m, (2,) * n)


def nilpotent_orbit_eval(d: NilpotentOrbitData, z: Sequence[complex]) -> HodgeFrame:
    """``θ(z) = exp(sum z_j N_j) F`` as a frame of ``F^1``.

    The exponential is the finite sum ``sum_k X^k / k!``, so ``θ`` is a
    polynomial in ``z``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(z) != len(d.ns):
        raise ValueError("need one coordinate per monodromy logarithm")
    x = np.zeros((d.dim, d.dim), dtype=complex)
    for zj, n in zip(z, d.ns):
        x = x + zj * n.matrix.to_numpy()
    e = np.eye(d.dim, dtype=complex)
    term = np.eye(d.dim, dtype=complex)
    for k in range(1, d.dim + 1):
        term = term @ x / k
        e = e + term
    return HodgeFrame(e @ d.limit_f[1].matrix().to_numpy(), d.blocks)


def hyperbolic_distance(a, b, dps: int | None = None):
    """Poincaré distance ``2 asinh(|a-b| / (2 sqrt(Im a Im b)))`` on the upper half-plane."""
    if dps is None:
        a, b = complex(a), complex(b)
        if a.imag <= 0 or b.imag <= 0:
            raise ValueError("point outside the upper half-plane")
        return float(2 * np.arcsinh(abs(a - b) / (2 * np.sqrt(a.imag * b.imag))))
    with mp.workdps(dps):
        a, b = mp.mpc(a), mp.mpc(b)
        if a.imag <= 0 or b.imag <= 0:
            raise ValueError("point outside the upper half-plane")
        return 2 * mp.asinh(abs(a - b) / (2 * mp.sqrt(a.imag * b.imag)))


def _taus(p) -> tuple:
    if isinstance(p, HodgeFrame):
        return p.taus()
    if hasattr(p, "z"):
        return p.z
    if np.iscomplexobj(p) or isinstance(p, (complex, float, int, mp.mpc)):
        return tuple(np.atleast_1d(p)) if not isinstance(p, mp.mpc) else (p,)
    return tuple(p)


def invariant_distance(a, b, dps: int | None = None):
    """Max over factors of the hyperbolic distance on ``H^n``.

    ``a`` and ``b`` may be Hodge frames, upper-half-plane points, complex
    numbers or tuples of them.

    Examples
    --------
    >>> round(invariant_distance(1j, 2j), 12) == round(float(np.log(2)), 12)
    True
    """
    ta, tb = _taus(a), _taus(b)
    if len(ta) != len(tb):
        raise ValueError("points live on different numbers of factors")
    return max(hyperbolic_distance(x, y, dps) for x, y in zip(ta, tb))


@dataclass(frozen=True)
class SectorSpec:
    """``C_{σ,η,ε}``: ``y_{σ1} >= ε y_{σ2} >= ... >= ε^{n-1} y_{σn}``, ``y_{σn} >= η``.

    The chain is read as ``y_{σ(i)} >= ε y_{σ(i+1)}``, so ``ε = 1`` gives the
    ordered chamber.  ``sigma`` is 0-based.
    """

    sigma: tuple
    eta: float
    epsilon: float = 1.0

    def __post_init__(self):
        if self.eta <= 0 or not (0 < self.epsilon <= 1):
            raise ValueError("need η > 0 and ε in (0, 1]")
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ValueError("sigma must be a permutation")

    def contains(self, ys: Sequence[float]) -> bool:
        ys = [ys[i] for i in self.sigma]
        if ys[-1] < self.eta:
            return False
        return all(ys[i] >= self.epsilon * ys[i + 1] for i in range(len(ys) - 1))

    @staticmethod
    def all_orderings(n: int, eta: float, epsilon: float = 1.0) -> list["SectorSpec"]:
        return [SectorSpec(p, eta, epsilon) for p in permutations(range(n))]


def sector_decompose(points: Sequence[Sequence[complex]], eta: float) -> list[SectorSpec]:
    """Assign each point of ``H^n`` the sector of its descending ``Im`` order.

    Ties are broken by index.  Raises ``ValueError`` if some ``Im z_j < η``.
    """
    out = []
    for p in points:
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        ys = p.imag
        if np.any(ys < eta):
            raise ValueError(f"point {p} lies below η = {eta}")
        sigma = tuple(sorted(range(len(ys)), key=lambda i: (-ys[i], i)))
        s = SectorSpec(sigma, eta, 1.0)
        if not s.contains(ys):
            raise ArithmeticError("sector assignment failed its own membership test")
        out.append(s)
    return out
