"""Periods of the Legendre family ``y^2 = x(x-1)(x-λ)``.

The holomorphic period is ``F(λ) = 2F1(1/2, 1/2; 1; λ)`` and the period point
is ``τ(λ) = i F(1-λ) / F(λ)`` in the upper half-plane.  Near ``λ = 0`` with
``λ = 16 exp(2πi z)`` the lift to the universal cover of the punctured disk is

    Φ̃(z) = 2z + (i/π) E(λ) / F(λ),

where ``E(λ) = sum c_n^2 e_n λ^n``, ``c_n = (1/2)_n / n!`` and
``e_n = -4 sum_{k<=n} 1/(2k(2k-1))``.  The nilpotent orbit is ``θ(z) = 2z``
and the local monodromy is ``τ -> τ + 2``.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "series_coefficients",
    "hypergeometric_period",
    "hypergeometric_period_agm",
    "legendre_tau",
    "lift_tau",
    "lift_tau_mp",
    "lambda_of_z",
    "monodromy_by_continuation",
    "LIFT_Y_MIN",
]

# |λ| = 16 exp(-2π y) <= 0.4 keeps the series geometric with ratio <= 0.4
LIFT_Y_MIN = math.log(40.0) / (2 * math.pi)
_N_TERMS = 80


@lru_cache(maxsize=None)
def series_coefficients(nterms: int = _N_TERMS, dps: int = 50):
    """Tuples ``(c_n^2, c_n^2 e_n)`` as mpmath numbers at ``dps`` digits."""
    with mp.workdps(dps):
        c2 = [mp.mpf(1)]
        ce = [mp.mpf(0)]
        c = mp.mpf(1)
        s = mp.mpf(0)
        for n in range(1, nterms):
            c = c * (mp.mpf(2 * n - 1) / (2 * n))
            s += mp.mpf(1) / (2 * n * (2 * n - 1))
            c2.append(c * c)
            ce.append(-4 * s * c * c)
    return tuple(c2), tuple(ce)


@lru_cache(maxsize=None)
def _float_coefficients(nterms: int = _N_TERMS):
    c2, ce = series_coefficients(nterms)
    return np.array([float(x) for x in c2]), np.array([float(x) for x in ce])


def _horner(coeffs, x):
    out = np.zeros_like(x, dtype=complex)
    for a in coeffs[::-1]:
        out = out * x + a
    return out


def _series_F(lam, nterms=_N_TERMS):
    c2, _ = _float_coefficients(nterms)
    return _horner(c2, np.asarray(lam, dtype=complex))


def _on_cut(lam: complex) -> bool:
    return lam.imag == 0 and lam.real >= 1


def hypergeometric_period_agm(lam: complex, branch: str | None = None) -> complex:
    """``1 / AGM(1, sqrt(1-λ))`` on the principal branch (cut ``[1, ∞)``)."""
    lam = complex(lam)
    if _on_cut(lam):
        lam = _side(lam, branch)
        with mp.workdps(40):
            return complex(1 / mp.agm(1, mp.sqrt(1 - mp.mpc(lam.real, lam.imag))))
    return complex(1 / mp.agm(1, cmath.sqrt(1 - lam)))


def _side(lam: complex, branch: str | None) -> complex:
    if branch not in ("upper", "lower"):
        raise ValueError("λ lies on the branch cut [1, ∞); pass branch='upper' or 'lower'")
    return complex(lam.real, 1e-30 if branch == "upper" else -1e-30)


def hypergeometric_period(lam: complex, method: str = "auto", branch: str | None = None) -> complex:
    """``2F1(1/2, 1/2; 1; λ)``.

    Parameters
    ----------
    lam : complex
    method : {"auto", "series", "agm"}
        ``"series"`` sums the power series (requires ``|λ| < 1``); ``"agm"``
        uses ``1 / AGM(1, sqrt(1-λ))``.  ``"auto"`` picks the series for
        ``|λ| <= 0.5`` and the AGM otherwise.
    branch : {"upper", "lower"}, optional
        Side of the cut ``[1, ∞)`` to use for real ``λ >= 1``.

    Examples
    --------
    >>> hypergeometric_period(0)
    (1+0j)
    """
    lam = complex(lam)
    if _on_cut(lam) and method != "agm":
        return hypergeometric_period_agm(lam, branch)
    if method == "auto":
        method = "series" if abs(lam) <= 0.5 else "agm"
    if method == "series":
        if abs(lam) >= 1:
            raise ValueError("series needs |λ| < 1")
        nterms = _terms_for(abs(lam))
        return complex(_series_F(lam, nterms))
    if method == "agm":
        return hypergeometric_period_agm(lam, branch)
    raise ValueError(f"unknown method {method!r}")


def _terms_for(r: float) -> int:
    if r == 0:
        return 1
    # c_n^2 <= 1, so r^n below 1e-18 relative suffices
    return min(4000, max(8, int(math.ceil(math.log(1e-18 * (1 - r)) / math.log(r))) + 2))


def legendre_tau(lam: complex, branch: str | None = None) -> complex:
    """``τ(λ) = i F(1-λ) / F(λ)`` on the principal branch.

    Raises
    ------
    ValueError
        At the singular points ``0`` and ``1``, or on the cuts
        ``(-∞, 0]``, ``[1, ∞)`` without a ``branch`` directive.

    Examples
    --------
    >>> abs(legendre_tau(0.5) - 1j) < 1e-12
    True
    """
    lam = complex(lam)
    if lam in (0, 1):
        raise ValueError("λ = 0 and λ = 1 are singular fibres")
    if lam.imag == 0 and (lam.real <= 0 or lam.real >= 1):
        lam = _side(lam, branch)
        with mp.workdps(40):
            m = mp.mpc(lam.real, lam.imag)
            return complex(1j * mp.agm(1, mp.sqrt(1 - m)) / mp.agm(1, mp.sqrt(m)))
    # 1/F(λ) = AGM(1, sqrt(1-λ)) and 1/F(1-λ) = AGM(1, sqrt(λ))
    return complex(1j * mp.agm(1, cmath.sqrt(1 - lam)) / mp.agm(1, cmath.sqrt(lam)))


def lambda_of_z(z):
    """``λ = 16 exp(2πi z)``."""
    return 16 * np.exp(2j * np.pi * np.asarray(z, dtype=complex))


def lift_tau(z, y_min: float = LIFT_Y_MIN):
    """Lifted period map ``Φ̃(z)`` in double precision (vectorised).

    Raises
    ------
    ValueError
        If ``Im z < y_min`` anywhere (outside the series' validity region).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag < y_min):
        raise ValueError(f"Im z must be at least {y_min:.4f} for the lift")
    lam = lambda_of_z(z)
    c2, ce = _float_coefficients()
    F = _horner(c2, lam)
    E = _horner(ce, lam)
    return 2 * z + (1j / np.pi) * E / F


def lift_tau_mp(z, dps: int = 50, y_min: float = LIFT_Y_MIN):
    """``Φ̃(z)`` and ``θ(z) - Φ̃(z)`` in mpmath at ``dps`` digits."""
    with mp.workdps(dps + 10):
        z = mp.mpc(z)
        if z.imag < y_min:
            raise ValueError(f"Im z must be at least {y_min:.4f} for the lift")
        lam = 16 * mp.exp(2j * mp.pi * z)
        c2, ce = series_coefficients(_N_TERMS, dps + 10)
        F = mp.polyval(list(reversed(c2)), lam)
        E = mp.polyval(list(reversed(ce)), lam)
        corr = (1j / mp.pi) * E / F
        return 2 * z + corr, -corr


def _dF(lam):
    return mp.hyp2f1(1.5, 1.5, 2, lam) / 4


def monodromy_by_continuation(radius: float = 0.5, rtol: float = 1e-12) -> np.ndarray:
    """Monodromy of the period vector ``(i F(1-λ), F(λ))`` around ``λ = 0``.

    Both components are continued along ``λ = r e^{iφ}``, ``φ ∈ [0, 2π]``, by
    integrating the Picard–Fuchs equation
    ``λ(1-λ) F'' + (1-2λ) F' - F/4 = 0`` numerically.  The result ``T``
    satisfies ``ω_end = T ω_start``; it should be ``[[1, 2], [0, 1]]``.
    """
    lam0 = radius

    def rhs(phi, y):
        lam = radius * np.exp(1j * phi)
        dl = 1j * lam
        out = np.empty(4, dtype=complex)
        for k in (0, 2):
            f, fp = y[k], y[k + 1]
            fpp = (f / 4 - (1 - 2 * lam) * fp) / (lam * (1 - lam))
            out[k] = fp * dl
            out[k + 1] = fpp * dl
        return out

    with mp.workdps(30):
        f1 = complex(mp.hyp2f1(0.5, 0.5, 1, lam0))
        d1 = complex(_dF(lam0))
        f2 = complex(mp.hyp2f1(0.5, 0.5, 1, 1 - lam0))
        d2 = complex(-_dF(1 - lam0))
    # ω1 = i F(1-λ), ω2 = F(λ)
    y0 = np.array([1j * f2, 1j * d2, f1, d1], dtype=complex)
    sol = solve_ivp(rhs, (0.0, 2 * np.pi), y0, method="DOP853", rtol=rtol, atol=1e-14)
    if not sol.success:
        raise RuntimeError(sol.message)
    y1 = sol.y[:, -1]
    start = np.array([[y0[0], y0[2]], [y0[1], y0[3]]])
    end = np.array([[y1[0], y1[2]], [y1[1], y1[3]]])
    # columns are solutions: end = start @ T^T
    return np.real_if_close(np.linalg.solve(start, end).T, tol=1e6)
