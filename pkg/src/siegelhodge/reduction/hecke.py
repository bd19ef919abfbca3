"""Hecke correspondences on the modular curve (level one).

For ``g`` in ``GL(2, Q)^+`` the correspondence ``Γ\\H <- (Γ ∩ g^{-1}Γg)\\H -> Γ\\H``
has degree ``[Γ : Γ ∩ g^{-1}Γg]``.  Right cosets ``Γ g γ_i`` of the double
coset ``Γ g Γ`` are labelled by the Hermite normal form of ``g γ_i`` under
left multiplication by ``Γ``: ``[[a, b], [0, d]]`` with ``a, d > 0`` and
``0 <= b < d``.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

__all__ = [
    "HeckeResult",
    "hecke_correspondence",
    "primitive_integral",
    "hermite_normal_form",
    "primitive_hnf_labels",
    "sl2z_by_height",
    "compose_labels",
]


@dataclass
class HeckeResult:
    degree: int
    determinant: int
    cosets: list = field(default_factory=list)
    """``(label, gamma)`` pairs: ``label = HNF(M gamma)`` with ``M`` the primitive form of ``g``."""


def primitive_integral(g) -> tuple[int, int, int, int]:
    """Scale a rational 2×2 matrix (nested or flat) to a primitive integral one.

    Raises
    ------
    TypeError
        If an entry is not rational (floats are rejected).
    ValueError
        If the determinant is not positive.
    """
    vals = []
    for x in np.asarray(g, dtype=object).ravel():
        if isinstance(x, numbers.Integral):
            x = int(x)
        if isinstance(x, (float, np.floating)):
            x = float(x)
            if not x.is_integer():
                raise TypeError("g must be given with exact rational entries")
            x = int(x)
        if isinstance(x, str):
            x = Fraction(x)
        if not isinstance(x, (int, Fraction)):
            raise TypeError("g must be rational")
        vals.append(Fraction(x))
    if len(vals) != 4:
        raise ValueError("g must have four entries")
    den = math.lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    gcd = math.gcd(*ints)
    if gcd == 0:
        raise ValueError("g is zero")
    ints = [v // gcd for v in ints]
    a, b, c, d = ints
    if a * d - b * c <= 0:
        raise ValueError("g must have positive determinant")
    return tuple(ints)


def hermite_normal_form(m) -> tuple[int, int, int, int]:
    """Representative of ``SL(2, Z) · m`` of the form ``[[a, b], [0, d]]``, ``0 <= b < d``."""
    a, b, c, d = m
    det = a * d - b * c
    if det <= 0:
        raise ValueError("need positive determinant")
    # bring the first column to (g, 0) with a unimodular row operation
    g, x, y = _xgcd(a, c)
    if g < 0:
        g, x, y = -g, -x, -y
    # rows: [x, y] and [-c/g, a/g] have determinant 1
    top = (g, x * b + y * d)
    bottom_d = (-c // g) * b + (a // g) * d
    bb = top[1] % bottom_d
    return (g, bb, 0, bottom_d)


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def primitive_hnf_labels(n: int) -> list[tuple[int, int, int, int]]:
    """All primitive ``[[a, b], [0, d]]`` with ``ad = n``, ``0 <= b < d``."""
    out = []
    for a in range(1, n + 1):
        if n % a:
            continue
        d = n // a
        for b in range(d):
            if math.gcd(math.gcd(a, b), d) == 1:
                out.append((a, b, 0, d))
    return out


def sl2z_by_height(max_height: int):
    """SL(2, Z) elements ordered by max absolute entry."""
    for h in range(1, max_height + 1):
        layer = [g for g in product(range(-h, h + 1), repeat=4)
                 if max(map(abs, g)) == h and g[0] * g[3] - g[1] * g[2] == 1]
        layer.sort(key=lambda g: (sum(map(abs, g)), [-v for v in g]))
        yield from layer


def _mul(g, h):
    a, b, c, d = g
    e, f, g2, h2 = h
    return (a * e + b * g2, a * f + b * h2, c * e + d * g2, c * f + d * h2)


def hecke_correspondence(g, gamma_level: int = 1, max_height: int = 12) -> HeckeResult:
    """Degree and coset representatives of the Hecke correspondence of ``g``.

    The degree is the number of right cosets ``Γ g γ_i`` in ``Γ g Γ``.  The
    labels are counted directly as primitive Hermite normal forms, and every
    label is realised by an explicit ``γ_i`` found by searching SL(2, Z) by
    height; a mismatch between the two raises.

    Only level one (``Γ = SL(2, Z)``) is supported.
    """
    if gamma_level != 1:
        raise NotImplementedError("only level one is supported")
    m = primitive_integral(g)
    n = m[0] * m[3] - m[1] * m[2]
    labels = primitive_hnf_labels(n)
    want = set(labels)
    found: dict = {}
    for gam in sl2z_by_height(max_height):
        lab = hermite_normal_form(_mul(m, gam))
        if lab not in found:
            if lab not in want:
                raise ArithmeticError(f"coset label {lab} is not a primitive HNF")
            found[lab] = gam
            if len(found) == len(want):
                break
    if set(found) != want:
        raise ArithmeticError("could not realise every coset within the height bound")
    cosets = [(lab, found[lab]) for lab in labels]
    return HeckeResult(len(labels), n, cosets)


def compose_labels(r1: HeckeResult, r2: HeckeResult) -> set:
    """Labels of ``h1 h2`` over coset labels of two correspondences."""
    return {hermite_normal_form(_mul(h1, h2)) for (h1, _), (h2, _) in product(r1.cosets, r2.cosets)}
