"""Siegel sets for SL(n, R) and for products of upper half-planes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .iwasawa import iwasawa_blocks, simple_roots

__all__ = ["UpperHalfPoint", "SiegelSet", "siegel_membership", "upper_entries"]


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point of ``H^n``: one ``(x, y)`` pair per factor."""

    x: tuple
    y: tuple

    def __init__(self, x, y):
        xs = tuple(float(v) for v in np.atleast_1d(x))
        ys = tuple(float(v) for v in np.atleast_1d(y))
        if len(xs) != len(ys):
            raise ValueError("x and y have different numbers of factors")
        if any(v <= 0 for v in ys):
            raise ValueError("y must be positive in every factor")
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "y", ys)

    @classmethod
    def from_complex(cls, *zs: complex) -> "UpperHalfPoint":
        return cls([z.real for z in zs], [z.imag for z in zs])

    @property
    def z(self) -> tuple:
        return tuple(complex(a, b) for a, b in zip(self.x, self.y))

    @property
    def factors(self) -> int:
        return len(self.x)


def upper_entries(n_part: np.ndarray) -> np.ndarray:
    """Strictly upper-triangular entries, row by row."""
    idx = np.triu_indices(n_part.shape[0], 1)
    return n_part[idx]


@dataclass(frozen=True)
class SiegelSet:
    """``U × A_t × W`` for the standard Borel of ``prod SL(b_i, R)``.

    Parameters
    ----------
    t : float or sequence of float
        Lower bound for every simple root value ``a^α`` (or one per root).
    u_bounds : sequence of (lo, hi)
        Box for the strictly upper-triangular entries of ``n``, block by
        block and row by row.  For ``SL(2)^k`` this is one x-interval per factor.
    w_bounds : sequence of (lo, hi), optional
        Box for the entries of the compact part ``m`` (row-major over all
        blocks).  ``None`` means no constraint.
    blocks : sequence of int
        Block sizes; ``(2,)`` is the upper half-plane, ``(2, 2)`` is ``H^2``.
    """

    t: tuple
    u_bounds: tuple
    w_bounds: tuple | None = None
    blocks: tuple = (2,)
    parabolic: str = field(default="B")

    def __init__(self, t, u_bounds, w_bounds=None, blocks=(2,), parabolic="B"):
        blocks = tuple(int(b) for b in blocks)
        nroots = sum(b - 1 for b in blocks)
        nu = sum(b * (b - 1) // 2 for b in blocks)
        ts = tuple(float(v) for v in np.atleast_1d(t))
        if len(ts) == 1:
            ts = ts * nroots
        if len(ts) != nroots:
            raise ValueError("t needs one value per simple root")
        if any(v <= 0 for v in ts):
            raise ValueError("t must be positive")
        ub = tuple((float(lo), float(hi)) for lo, hi in u_bounds)
        if len(ub) != nu:
            raise ValueError(f"u_bounds needs {nu} intervals")
        if any(not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi) for lo, hi in ub):
            raise ValueError("u_bounds must be finite intervals")
        wb = None if w_bounds is None else tuple((float(lo), float(hi)) for lo, hi in w_bounds)
        object.__setattr__(self, "t", ts)
        object.__setattr__(self, "u_bounds", ub)
        object.__setattr__(self, "w_bounds", wb)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "parabolic", parabolic)

    @classmethod
    def upper_half(cls, u: float = 0.5, t: float = 1.0, factors: int = 1) -> "SiegelSet":
        """``{|x_i| <= u, y_i > t}`` in ``H^factors``."""
        return cls(t, [(-u, u)] * factors, blocks=(2,) * factors)

    @property
    def dim(self) -> int:
        return sum(self.blocks)

    def contains_coords(self, u_entries, roots, m_entries=None, slack: float = 0.0) -> bool:
        u = np.asarray(u_entries, dtype=float)
        lo = np.array([b[0] for b in self.u_bounds])
        hi = np.array([b[1] for b in self.u_bounds])
        if np.any(u < lo - slack) or np.any(u > hi + slack):
            return False
        if np.any(np.asarray(roots) <= np.array(self.t) - slack):
            return False
        if self.w_bounds is not None and m_entries is not None:
            m = np.asarray(m_entries, dtype=float)
            wl = np.array([b[0] for b in self.w_bounds])
            wh = np.array([b[1] for b in self.w_bounds])
            if np.any(m < wl - slack) or np.any(m > wh + slack):
                return False
        return True

    def to_json(self) -> dict:
        return {"t": list(self.t), "u_bounds": [list(b) for b in self.u_bounds],
                "w_bounds": None if self.w_bounds is None else [list(b) for b in self.w_bounds],
                "blocks": list(self.blocks), "parabolic": self.parabolic}

    @classmethod
    def from_json(cls, data) -> "SiegelSet":
        return cls(data["t"], data["u_bounds"], data.get("w_bounds"), data.get("blocks", (2,)),
                   data.get("parabolic", "B"))


def _coords_of_matrix(g, s: SiegelSet):
    parts = iwasawa_blocks(g, s.blocks)
    u = np.concatenate([upper_entries(p.n_part) for p in parts]) if parts else np.array([])
    roots = np.concatenate([simple_roots(p.a_part) for p in parts])
    m = np.concatenate([p.m_part.ravel() for p in parts])
    return u, roots, m


def siegel_membership(obj, s: SiegelSet, slack: float = 0.0) -> bool:
    """Is ``obj`` (a matrix or an :class:`UpperHalfPoint`) in the Siegel set ``s``?

    For a point of ``H^k`` the test is ``x_i ∈ u_bounds[i]`` and ``y_i > t_i``,
    which is the matrix test applied to ``n(x) a(sqrt(y))``.
    """
    if isinstance(obj, UpperHalfPoint):
        if s.blocks != (2,) * obj.factors:
            raise ValueError("Siegel set is not on a product of upper half-planes")
        return s.contains_coords(obj.x, obj.y, None, slack)
    g = np.asarray(obj, dtype=float)
    if g.shape != (s.dim, s.dim):
        raise ValueError("matrix size does not match the Siegel set")
    u, roots, m = _coords_of_matrix(g, s)
    return s.contains_coords(u, roots, m, slack)


def coords_for(obj, s: SiegelSet):
    """``(u_entries, root_values)`` of a matrix or point for the blocks of ``s``."""
    if isinstance(obj, UpperHalfPoint):
        return np.array(obj.x), np.array(obj.y)
    u, roots, _ = _coords_of_matrix(obj, s)
    return u, roots


def product_points(points: Sequence[UpperHalfPoint]) -> UpperHalfPoint:
    return UpperHalfPoint([x for p in points for x in p.x], [y for p in points for y in p.y])
