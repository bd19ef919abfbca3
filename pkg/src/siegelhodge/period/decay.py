"""Distance between the lifted period map and its nilpotent orbit.

Along a vertical ray ``z = x + iy`` the distance ``d(Φ̃(z), θ(z))`` is
expected to behave like ``K y^β exp(-2π y)``.  The fit is a least-squares
line in ``(1, log y, -y)`` for ``log d``.  Distances are computed in mpmath
because they drop far below double precision on ``y ∈ [2, 8]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath as mp
import numpy as np

from .families import Family, get_family
from .legendre import lambda_of_z, legendre_tau
from .orbit import hyperbolic_distance

__all__ = ["DecayFit", "PeriodSample", "local_lift", "schmid_decay_check", "validity_threshold"]

MIN_SAMPLES = 8


@dataclass
class DecayFit:
    """Fit ``log d ≈ log K + β log y - rate·y`` for one factor."""

    K: float
    beta: float
    rate: float
    residual: float
    """Largest absolute residual of ``log d`` against the fit."""
    monotone: bool
    """Distance strictly decreasing along the ray ``x = 0``."""
    identically_zero: bool = False
    factor: int = 0
    y: np.ndarray = field(default=None, repr=False)
    distance: np.ndarray = field(default=None, repr=False)

    def rate_ok(self, rel: float = 0.05) -> bool:
        return self.identically_zero or abs(self.rate - 2 * np.pi) <= rel * 2 * np.pi

    def to_json(self) -> dict:
        return {"factor": self.factor, "K": self.K, "beta": self.beta, "rate": self.rate,
                "residual": self.residual, "monotone": self.monotone,
                "identically_zero": self.identically_zero}


@dataclass
class PeriodSample:
    z: tuple
    q: tuple
    phi: tuple
    orbit: tuple
    distance: float


def _family(f) -> Family:
    return f if isinstance(f, Family) else get_family(f)


def local_lift(family, z, dps: int = 40) -> PeriodSample:
    """Lifted period, nilpotent orbit and their distance at one point."""
    fam = _family(family)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    phi, corr = fam.lift_mp(z, dps)
    theta = fam.theta(z)
    with mp.workdps(dps):
        dist = max((hyperbolic_distance(p + c, p, dps) for p, c in zip(phi, corr)), default=mp.mpf(0))
    q = tuple(complex(v) for v in np.exp(2j * np.pi * z))
    return PeriodSample(tuple(z), q, tuple(complex(p) for p in phi), tuple(np.atleast_1d(theta)), float(dist))


def _factor_distances(fam: Family, factor: int, zs: Sequence[complex], other_y: float, dps: int):
    out = []
    for z in zs:
        pt = [complex(0, other_y)] * fam.factors
        pt[factor] = z
        phi, corr = fam.lift_mp(pt, dps)
        with mp.workdps(dps):
            # θ = Φ̃ + corr, so d(Φ̃, θ) only needs Φ̃ and the correction
            out.append(hyperbolic_distance(phi[factor], phi[factor] + corr[factor], dps))
    return out


def schmid_decay_check(family="legendre", x_window: float = 0.0, y_range=(2.0, 8.0), samples: int = 60,
                       seed: int = 0, dps: int = 50) -> list[DecayFit]:
    """Fit the decay rate of ``d(Φ̃(z), θ(z))`` for each factor of a family.

    Points have ``y`` evenly spaced in ``y_range`` and ``x`` drawn uniformly
    from ``[-x_window, x_window]``; monotonicity is tested separately on
    ``x = 0``.  For a product family each factor is varied with the others
    held at the top of ``y_range``.

    Raises
    ------
    ValueError
        If ``samples < 8`` or the range dips below the family's validity threshold.
    """
    fam = _family(family)
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples for a three-parameter fit")
    y0, y1 = map(float, y_range)
    if not (y1 > y0):
        raise ValueError("empty y range")
    if y0 < fam.y_min:
        raise ValueError(f"y range starts below the validity threshold {fam.y_min:.4f}")
    rng = np.random.default_rng(seed)
    ys = np.linspace(y0, y1, samples)
    xs = rng.uniform(-x_window, x_window, samples) if x_window > 0 else np.zeros(samples)
    fits = []
    for j in range(fam.factors):
        d_ray = _factor_distances(fam, j, [complex(0, y) for y in ys], y1, dps)
        d = _factor_distances(fam, j, [complex(x, y) for x, y in zip(xs, ys)], y1, dps) if x_window > 0 else d_ray
        monotone = all(a > b for a, b in zip(d_ray, d_ray[1:]))
        if all(v == 0 for v in d):
            fits.append(DecayFit(0.0, 0.0, float("inf"), 0.0, True, True, j, ys, np.zeros(samples)))
            continue
        if any(v == 0 for v in d):
            raise ArithmeticError("distance vanished at some but not all sample points")
        logd = np.array([float(mp.log(v)) for v in d])
        a = np.column_stack([np.ones_like(ys), np.log(ys), -ys])
        coef, *_ = np.linalg.lstsq(a, logd, rcond=None)
        resid = float(np.abs(a @ coef - logd).max())
        fits.append(DecayFit(float(np.exp(coef[0])), float(coef[1]), float(coef[2]), resid, monotone,
                             False, j, ys, np.array([float(v) for v in d])))
    return fits


def validity_threshold(family="legendre", y_grid=None, x: float = 0.0, tol: float = 1e-3) -> float:
    """Smallest grid ``y`` above which the series lift matches the AGM period to ``tol``.

    The two routes are the ``q``-series ``Φ̃(z)`` and ``τ(λ(z))`` from the
    arithmetic-geometric mean; they agree up to a translation by ``2Z`` (the
    monodromy ``τ -> τ + 2``).  Returns ``inf`` if no grid point qualifies.
    """
    fam = _family(family)
    if fam.name == "constant":
        return 0.0
    grid = np.linspace(0.05, 2.0, 80) if y_grid is None else np.asarray(y_grid, dtype=float)
    good = []
    for y in grid:
        z = complex(x, y)
        try:
            a = complex(fam._lift(np.array([[z] * fam.factors]))[0, 0])
            lam = complex(lambda_of_z(z))
            b = legendre_tau(lam, branch="upper" if abs(lam.imag) < 1e-300 and lam.real >= 1 else None)
        except (ValueError, ZeroDivisionError, OverflowError):
            good.append(False)
            continue
        k = round((a - b).real / 2)
        good.append(bool(np.isfinite(a)) and abs(a - b - 2 * k) < tol)
    for i in range(len(grid)):
        if all(good[i:]):
            return float(grid[i])
    return float("inf")
