"""Iwasawa (horospherical) coordinates for SL(n, R) and products of SL(2, R).

We write ``g = n a m`` with ``n`` unipotent upper triangular, ``a`` positive
diagonal and ``m`` orthogonal.  This is the horospherical decomposition for
the standard upper-triangular minimal parabolic, read on ``G`` rather than on
``G/K``: the image of ``g`` in ``G/K`` is ``n a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import rq

__all__ = [
    "DET_TOL",
    "RECON_TOL",
    "GroupElement",
    "HorosphericalCoords",
    "iwasawa",
    "iwasawa_blocks",
    "simple_roots",
    "ep_chart",
    "sl2_section",
    "mobius",
]

DET_TOL = 1e-9
RECON_TOL = 1e-10


@dataclass(frozen=True)
class GroupElement:
    """Element of ``SL(n, R)``; integer entries mark an arithmetic element.

    Parameters
    ----------
    matrix : array_like
        Square real matrix with ``|det - 1| <= DET_TOL`` (exact for integers).
    """

    matrix: np.ndarray

    def __init__(self, matrix, tol: float = DET_TOL):
        arr = np.array(matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("group element must be a square matrix")
        if np.issubdtype(arr.dtype, np.integer):
            if _exact_det(arr.tolist()) != 1:
                raise ValueError("integer element must have determinant exactly 1")
        else:
            arr = arr.astype(float)
            if abs(np.linalg.det(arr) - 1.0) > tol:
                raise ValueError("determinant is not 1")
        object.__setattr__(self, "matrix", arr)

    @property
    def is_integral(self) -> bool:
        return np.issubdtype(self.matrix.dtype, np.integer)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _exact_det(rows: list[list[int]]) -> int:
    from fractions import Fraction

    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return int(det)


@dataclass(frozen=True)
class HorosphericalCoords:
    """``g = n_part @ diag(a_part) @ m_part``."""

    n_part: np.ndarray
    a_part: np.ndarray
    m_part: np.ndarray
    parabolic: str = "B"

    def reconstruct(self) -> np.ndarray:
        return self.n_part @ np.diag(self.a_part) @ self.m_part


def iwasawa(g) -> HorosphericalCoords:
    """Horospherical coordinates of ``g`` for the upper-triangular Borel.

    ``g = R Q`` (RQ factorisation); signs are moved so that ``R`` has a positive
    diagonal, then ``a = diag(R)``, ``n = R a^{-1}``, ``m = Q``.

    Raises
    ------
    ValueError
        If ``g`` is numerically singular.

    Examples
    --------
    >>> c = iwasawa([[2.0, 0.0], [0.0, 0.5]])
    >>> c.a_part.tolist()
    [2.0, 0.5]
    """
    g = np.asarray(g.matrix if isinstance(g, GroupElement) else g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("need a square matrix")
    scale = max(np.abs(g).max(), 1.0)
    if abs(np.linalg.det(g)) < 1e-12 * scale ** g.shape[0]:
        raise ValueError("matrix is (numerically) singular")
    r, q = rq(g)
    s = np.sign(np.diag(r))
    s[s == 0] = 1.0
    r = r * s[np.newaxis, :]
    q = s[:, np.newaxis] * q
    a = np.diag(r).copy()
    n = r / a[np.newaxis, :]
    np.fill_diagonal(n, 1.0)
    return HorosphericalCoords(np.triu(n), a, q)


def iwasawa_blocks(g, blocks: Sequence[int]) -> list[HorosphericalCoords]:
    """Iwasawa coordinates of each diagonal block of a block-diagonal ``g``."""
    g = np.asarray(g, dtype=float)
    out = []
    pos = 0
    for b in blocks:
        out.append(iwasawa(g[pos:pos + b, pos:pos + b]))
        pos += b
    if pos != g.shape[0]:
        raise ValueError("block sizes do not add up to the matrix size")
    return out


def simple_roots(a_part, blocks: Sequence[int] | None = None) -> np.ndarray:
    """Values ``a^{α_i} = a_i / a_{i+1}`` of the simple roots, block by block."""
    a = np.asarray(a_part, dtype=float)
    blocks = [len(a)] if blocks is None else list(blocks)
    vals = []
    pos = 0
    for b in blocks:
        blk = a[pos:pos + b]
        vals.extend(blk[:-1] / blk[1:])
        pos += b
    return np.array(vals)


def ep_chart(a_part, blocks: Sequence[int] | None = None) -> np.ndarray:
    """Boundary chart coordinates ``(a^{-α_1}, ..., a^{-α_r})``.

    They tend to zero exactly when ``a`` goes to infinity inside the positive
    chamber.
    """
    a = np.asarray(a_part, dtype=float)
    if np.any(a <= 0):
        raise ValueError("a must be strictly positive")
    return 1.0 / simple_roots(a, blocks)


def sl2_section(z: complex) -> np.ndarray:
    """``n(x) a(sqrt(y))``, the standard lift of ``z = x + iy`` to SL(2, R)."""
    x, y = z.real, z.imag
    if y <= 0:
        raise ValueError("point is not in the upper half-plane")
    r = np.sqrt(y)
    return np.array([[r, x / r], [0.0, 1.0 / r]])


def mobius(g, z):
    """Linear fractional action of a 2×2 matrix on ``z`` (scalar or array)."""
    (a, b), (c, d) = np.asarray(g)
    return (a * z + b) / (c * z + d)
