"""Covering the image of a lifted period map by finitely many Siegel sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian

import numpy as np

from ..reduction.siegel import SiegelSet, UpperHalfPoint, siegel_membership
from .families import Family, get_family
from .orbit import SectorSpec, sector_decompose

__all__ = ["ContainmentResult", "containment_grid", "siegel_containment_check"]


@dataclass
class ContainmentResult:
    witnesses: list
    """One :class:`SiegelSet` per ordering that occurs on the grid."""
    orderings: list
    uncovered: list
    n_points: int
    holdout_uncovered: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.uncovered and not self.holdout_uncovered

    def to_json(self) -> dict:
        return {"witnesses": [w.to_json() for w in self.witnesses],
                "orderings": [list(o) for o in self.orderings],
                "uncovered": [[[z.real, z.imag] for z in p] for p in self.uncovered],
                "holdout_uncovered": [[[z.real, z.imag] for z in p] for p in self.holdout_uncovered],
                "n_points": self.n_points}


def containment_grid(factors: int, R: float, eta: float, y_max: float, total: int) -> np.ndarray:
    """About ``total`` points on ``([-R, R] × [η, y_max])^factors``, as rows of ``factors`` complex numbers.

    Each real coordinate gets ``round(total^(1/(2 factors)))`` evenly spaced values.
    """
    per_axis = max(2, int(round(total ** (1.0 / (2 * factors)))))
    xs = np.linspace(-R, R, per_axis)
    ys = np.linspace(eta, y_max, per_axis)
    one = [complex(x, y) for x in xs for y in ys]
    return np.array(list(cartesian(one, repeat=factors)), dtype=complex)


def _fit(points: np.ndarray, margin: float, factors: int) -> SiegelSet:
    # points are Φ̃ values, shape (m, factors)
    u = np.abs(points.real).max(axis=0) * (1 + margin)
    t = points.imag.min(axis=0) * (1 - margin)
    return SiegelSet(t, [(-b, b) for b in u], blocks=(2,) * factors)


def siegel_containment_check(family="legendre", R: float = 0.5, eta: float = 2.0, grid: int = 10_000,
                             y_max: float = 50.0, margin: float = 0.1, holdout: int = 0,
                             seed: int = 0) -> ContainmentResult:
    """Fit one Siegel set per ordering so that every ``Φ̃(z)`` on the grid lies in one of them.

    The grid covers ``|Re z_j| <= R``, ``η <= Im z_j <= y_max``.  Points are
    split by :func:`sector_decompose`; for each ordering the witness has ``t``
    equal to ``(1 - margin)`` times the smallest ``Im Φ̃`` and ``U`` equal to
    ``(1 + margin)`` times the largest ``|Re Φ̃|`` over the closed sector,
    per factor.
    Every point is then re-tested with :func:`siegel_membership` against the
    witness of its sector; failures are returned, never absorbed by refitting.
    ``holdout`` extra random points (seeded) are tested the same way.

    Raises
    ------
    ValueError
        If ``η`` lies below the family's validity threshold or the window is empty.
    """
    fam = family if isinstance(family, Family) else get_family(family)
    if eta < fam.y_min:
        raise ValueError(f"η = {eta} is below the validity threshold {fam.y_min:.4f}")
    if R < 0 or y_max <= eta:
        raise ValueError("empty window")
    k = fam.factors
    zs = containment_grid(k, R, eta, y_max, grid)
    phis = np.asarray(fam.lift(zs)).reshape(len(zs), k)
    sectors = [s.sigma for s in sector_decompose(zs, eta)]
    orderings = sorted(set(sectors))
    witnesses = {}
    for o in orderings:
        # fit on the closed sector so that ties count towards every ordering they touch
        closed = SectorSpec(o, eta)
        mask = np.array([closed.contains(z.imag) for z in zs])
        witnesses[o] = _fit(phis[mask], margin, k)

    def untested(points, phi_vals, secs):
        bad = []
        for z, p, s in zip(points, phi_vals, secs):
            if not siegel_membership(UpperHalfPoint.from_complex(*p), witnesses[s]):
                bad.append(tuple(z))
        return bad

    uncovered = untested(zs, phis, sectors)
    hold_bad = []
    if holdout:
        rng = np.random.default_rng(seed)
        hz = rng.uniform(-R, R, (holdout, k)) + 1j * rng.uniform(eta, y_max, (holdout, k))
        hphi = np.asarray(fam.lift(hz)).reshape(holdout, k)
        hsec = [s.sigma for s in sector_decompose(hz, eta)]
        hold_bad = [tuple(z) for z, p, s in zip(hz, hphi, hsec)
                    if s not in witnesses or not siegel_membership(UpperHalfPoint.from_complex(*p), witnesses[s])]
    return ContainmentResult([witnesses[o] for o in orderings], orderings, uncovered, len(zs), hold_bad)
