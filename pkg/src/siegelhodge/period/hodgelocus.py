"""Isogeny loci in the square of the Legendre family.

A pair ``(λ1, λ2)`` is flagged when the periods satisfy
``τ(λ2) = (a τ(λ1) + b) / (c τ(λ1) + d)`` for a primitive integer matrix
with ``1 <= det <= bound``.  On a real grid in ``(0, 1)^2`` both periods lie
on the positive imaginary axis, so locus points are found by bracketing sign
changes of ``Im γτ(λ1) - Im τ(λ2)`` along each row, refining with ``brentq``
and confirming in mpmath.  Flagged points are grouped by relation and each
group gets the lowest-degree rational polynomial ``P(λ1, λ2)`` vanishing on it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from itertools import product as cartesian

import mpmath as mp
import numpy as np
from scipy.optimize import brentq

from .legendre import legendre_tau

__all__ = ["LocusComponent", "HodgeLocusResult", "isogeny_relations", "tau_real", "is_flagged",
           "hodge_locus_demo", "fit_algebraic_curve"]

TOL = 1e-6
MIN_CURVE_POINTS = 20


def isogeny_relations(bound: int, entry_bound: int | None = None) -> list[tuple]:
    """Primitive ``(a, b, c, d)`` with ``1 <= ad - bc <= bound`` and ``|entries| <= entry_bound``.

    ``γ`` and ``-γ`` act identically, so only the representative whose first
    nonzero entry is positive is kept.  ``entry_bound`` defaults to ``bound``.
    """
    e = bound if entry_bound is None else entry_bound
    out = []
    for a, b, c, d in cartesian(range(-e, e + 1), repeat=4):
        det = a * d - b * c
        if not 1 <= det <= bound:
            continue
        if math.gcd(math.gcd(a, b), math.gcd(c, d)) != 1:
            continue
        first = next(v for v in (a, b, c, d) if v)
        if first < 0:
            continue
        out.append((a, b, c, d))
    return out


def tau_real(lam):
    """``Im τ(λ) = K(1-λ)/K(λ)`` for real ``λ ∈ (0, 1)`` (vectorised, via the AGM)."""
    lam = np.asarray(lam, dtype=float)
    if np.any((lam <= 0) | (lam >= 1)):
        raise ValueError("real periods need 0 < λ < 1")
    return np.vectorize(lambda v: legendre_tau(complex(v)).imag)(lam)


def _mobius(g, tau):
    a, b, c, d = g
    return (a * tau + b) / (c * tau + d)


def is_flagged(lam1, lam2, bound: int = 4, tol: float = TOL, relations=None):
    """The first relation ``γ`` with ``|γτ(λ1) - τ(λ2)| < tol``, or ``None``.

    Works for complex ``λ`` off the cuts as well as for real ``λ ∈ (0, 1)``.
    """
    t1 = legendre_tau(complex(lam1))
    t2 = legendre_tau(complex(lam2))
    for g in relations if relations is not None else isogeny_relations(bound):
        den = g[2] * t1 + g[3]
        if den != 0 and abs(_mobius(g, t1) - t2) < tol:
            return g
    return None


@dataclass
class LocusComponent:
    relation: tuple
    points: np.ndarray = field(repr=False)
    degree: int | None = None
    """Total degree of the fitted curve, ``None`` if none of degree <= 4 fits."""
    coefficients: dict | None = None
    """Monomial ``(i, j) -> Fraction`` coefficient of ``λ1^i λ2^j``."""

    @property
    def is_diagonal(self) -> bool:
        return self.relation == (1, 0, 0, 1)

    def to_json(self) -> dict:
        coeffs = None if self.coefficients is None else {f"{i},{j}": str(c) for (i, j), c in self.coefficients.items()}
        return {"relation": list(self.relation), "n_points": len(self.points), "degree": self.degree,
                "coefficients": coeffs}


@dataclass
class HodgeLocusResult:
    components: list
    grid: np.ndarray = field(repr=False)
    n_relations: int = 0

    def component(self, relation) -> LocusComponent | None:
        return next((c for c in self.components if c.relation == tuple(relation)), None)

    def rows(self):
        """``(λ1, λ2, a, b, c, d)`` for every flagged point, component by component."""
        for c in self.components:
            for l1, l2 in c.points:
                yield (float(l1), float(l2), *c.relation)


def fit_algebraic_curve(points, max_degree: int = 4, tol: float = 1e-11, max_den: int = 64):
    """Lowest-degree rational ``P`` with ``P(λ1, λ2) = 0`` on ``points``.

    For each degree the candidate is the smallest right singular vector of the
    column-scaled monomial matrix, scaled so its largest entry is 1.  Its
    entries are rounded to fractions with denominator ``<= max_den`` and the
    rounded polynomial is accepted when ``|P| / |∇P|`` (first-order distance
    to the curve) is below ``tol`` at every point.  Rounding rejects the
    spurious near-solutions that an ill-conditioned monomial fit produces
    on a short arc.  Returns ``(degree, {(i, j): Fraction})`` or ``(None, None)``.
    """
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    for deg in range(1, max_degree + 1):
        mons = [(i, tot - i) for tot in range(deg + 1) for i in range(tot + 1)]
        if len(pts) < len(mons) + 5:
            break
        a = np.column_stack([x ** i * y ** j for i, j in mons])
        norms = np.linalg.norm(a, axis=0)
        _, _, vt = np.linalg.svd(a / norms, full_matrices=False)
        v = vt[-1] / norms
        v = v / v[np.argmax(np.abs(v))]
        coeffs = {m: Fraction(float(c)).limit_denominator(max_den) for m, c in zip(mons, v)}
        coeffs = {m: c for m, c in coeffs.items() if c}
        val = sum(float(c) * x ** i * y ** j for (i, j), c in coeffs.items())
        dx = sum(float(c) * i * x ** (i - 1) * y ** j for (i, j), c in coeffs.items() if i)
        dy = sum(float(c) * j * x ** i * y ** (j - 1) for (i, j), c in coeffs.items() if j)
        grad = np.hypot(dx, dy)
        if np.all(grad > 0) and np.max(np.abs(val) / grad) < tol:
            return deg, coeffs
    return None, None


def _confirm(g, l1, l2, dps=30) -> bool:
    with mp.workdps(dps):
        t1 = 1j * mp.ellipk(1 - mp.mpf(l1)) / mp.ellipk(mp.mpf(l1))
        t2 = 1j * mp.ellipk(1 - mp.mpf(l2)) / mp.ellipk(mp.mpf(l2))
        a, b, c, d = g
        return abs((a * t1 + b) / (c * t1 + d) - t2) < TOL


def hodge_locus_demo(grid: int = 200, bound: int = 4, lam_range=(0.01, 0.99), tol: float = TOL,
                     max_degree: int = 4) -> HodgeLocusResult:
    """Detect isogeny components on a ``grid × grid`` real grid of ``(λ1, λ2)``.

    Only relations that keep ``τ(λ1)`` on the imaginary axis (up to ``tol``)
    can meet the real slice along a curve; for each such relation and each
    grid row, the crossing in ``λ2`` is bracketed between grid columns, refined
    and confirmed at 30 digits.
    """
    lo, hi = lam_range
    if not (0 < lo < hi < 1):
        raise ValueError("the grid must avoid λ = 0 and λ = 1")
    lams = np.linspace(lo, hi, grid)
    t = tau_real(lams)
    # t decreases with λ; invert on the grid interval with brentq
    relations = isogeny_relations(bound)
    comps = []
    for g in relations:
        a, b, c, d = g
        w = _mobius(g, 1j * t)
        on_axis = (np.abs(w.real) <= tol * np.maximum(1.0, np.abs(w))) & (w.imag > 0)
        if not on_axis.any():
            continue
        pts = []
        for i in np.nonzero(on_axis)[0]:
            target = w[i].imag
            diff = target - t
            s = np.sign(diff)
            hits = np.nonzero(diff == 0)[0].tolist()
            hits_between = np.nonzero(s[:-1] * s[1:] < 0)[0]
            for j in hits:
                pts.append((lams[i], lams[j]))
            for j in hits_between:
                l2 = brentq(lambda x: target - legendre_tau(complex(x)).imag, lams[j], lams[j + 1], xtol=1e-15)
                pts.append((lams[i], l2))
        pts = [p for p in pts if _confirm(g, *p)]
        if not pts:
            continue
        arr = np.array(sorted(pts))
        deg, coeffs = fit_algebraic_curve(arr, max_degree) if len(arr) >= MIN_CURVE_POINTS else (None, None)
        comps.append(LocusComponent(g, arr, deg, coeffs))
    comps.sort(key=lambda c: (not c.is_diagonal, c.degree if c.degree is not None else 99, c.relation))
    return HodgeLocusResult(comps, lams, len(relations))
