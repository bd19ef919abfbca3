"""SL(2, Z): reduction to the fundamental domain and Siegel-set intersections."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from mpmath import iv

from .siegel import SiegelSet, UpperHalfPoint

__all__ = [
    "reduce_sl2z",
    "bs_to_bb_chart",
    "siegel_intersection_enumerate",
    "EnumerationReport",
    "intersection_cutoffs",
    "decide_intersection",
    "act",
    "matmul2",
    "inverse2",
    "BOUNDARY_TOL",
]

BOUNDARY_TOL = 1e-9
_MAX_BOXES = 200_000

iv.prec = 53


def matmul2(g, h):
    a, b, c, d = g
    e, f, g2, h2 = h
    return (a * e + b * g2, a * f + b * h2, c * e + d * g2, c * f + d * h2)


def inverse2(g):
    a, b, c, d = g
    return (d, -b, -c, a)


def act(g, z: complex) -> complex:
    a, b, c, d = g
    return (a * z + b) / (c * z + d)


def reduce_sl2z(z, max_iter: int = 10_000):
    """Move ``z`` into the closed fundamental domain.

    Returns ``(z0, gamma)`` with ``gamma = (a, b, c, d)`` in SL(2, Z) and
    ``z0 = gamma · z``.  The representative satisfies ``-1/2 <= x < 1/2`` and
    ``|z0| >= 1``; on the unit circle the point with ``x <= 0`` is chosen.

    Examples
    --------
    >>> reduce_sl2z(5 + 1j)[1]
    (1, -5, 0, 1)
    """
    if isinstance(z, UpperHalfPoint):
        z = z.z[0]
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("point is not in the upper half-plane")
    gamma = (1, 0, 0, 1)
    w = z
    for _ in range(max_iter):
        k = math.floor(w.real + 0.5)
        if k:
            gamma = matmul2((1, -k, 0, 1), gamma)
            w = act(gamma, z)
        if abs(w) ** 2 < 1.0 - 1e-15:
            gamma = matmul2((0, -1, 1, 0), gamma)
            w = act(gamma, z)
            continue
        break
    else:
        raise RuntimeError("reduction did not terminate")
    # x within rounding of 1/2 is identified with -1/2, so reduction is idempotent
    if w.real >= 0.5 - 1e-12:
        gamma = matmul2((1, -1, 0, 1), gamma)
        w = act(gamma, z)
    if abs(abs(w) ** 2 - 1.0) <= 1e-12 and w.real > 1e-15:
        gamma = matmul2((0, -1, 1, 0), gamma)
        w = act(gamma, z)
    if gamma[0] < 0 or (gamma[0] == 0 and gamma[2] < 0):
        gamma = tuple(-v for v in gamma)
    return w, gamma


def bs_to_bb_chart(x: float, t: float) -> complex:
    """``exp(2πi x) · exp(-2π / t)``: the cusp chart of the modular curve."""
    if t <= 0:
        raise ValueError("t must be positive")
    return cmath.exp(2j * math.pi * x) * math.exp(-2 * math.pi / t)


# --------------------------------------------------------------------------
# Siegel set intersections


def _box(s: SiegelSet):
    if s.blocks != (2,):
        raise ValueError("only Siegel sets in the upper half-plane are supported")
    (lo, hi), = s.u_bounds
    return lo, hi, s.t[0]


@dataclass
class EnumerationReport:
    """Elements ``gamma`` with ``gamma · S1 ∩ S2 ≠ ∅`` and how each was decided."""

    elements: list = field(default_factory=list)
    records: list = field(default_factory=list)
    cutoffs: dict = field(default_factory=dict)
    complete: bool = False
    candidates: int = 0
    pruned: int = 0

    def gammas(self) -> set:
        return set(self.elements)


def intersection_cutoffs(s1: SiegelSet, s2: SiegelSet) -> dict:
    """Analytic bounds outside which ``gamma · S1`` misses ``S2``.

    With ``U_i = max |x|`` on ``S_i``: ``c^2 <= 1/(t1 t2)``; for ``c != 0``,
    ``|d| <= |c| U1 + 1/(2|c| t2)`` and ``|a| <= |c| U2 + 1/(2|c| t1)``; for
    ``c = 0``, ``|b| <= U1 + U2``.
    """
    lo1, hi1, t1 = _box(s1)
    lo2, hi2, t2 = _box(s2)
    u1 = max(abs(lo1), abs(hi1))
    u2 = max(abs(lo2), abs(hi2))
    c_max = 1.0 / math.sqrt(t1 * t2)
    out = {"c_max": c_max, "b_max_translations": u1 + u2, "per_c": {}}
    for c in range(1, int(math.floor(c_max + BOUNDARY_TOL)) + 1):
        out["per_c"][c] = {"d_max": c * u1 + 1.0 / (2 * c * t2), "a_max": c * u2 + 1.0 / (2 * c * t1)}
    return out


def _analytic_ok(g, cut, tol=BOUNDARY_TOL) -> bool:
    a, b, c, d = g
    if c == 0:
        return abs(b) <= cut["b_max_translations"] + tol
    if abs(c) > cut["c_max"] + tol:
        return False
    pc = cut["per_c"].get(abs(c))
    if pc is None:
        return False
    return abs(d) <= pc["d_max"] + tol and abs(a) <= pc["a_max"] + tol


def decide_intersection(g, s1: SiegelSet, s2: SiegelSet, tol: float = BOUNDARY_TOL):
    """Decide whether ``g · S1`` meets ``S2`` (closures, up to ``tol``).

    Branch and bound over boxes of ``S1`` with outward-rounded interval
    enclosures of ``g · z``.  Returns ``(kind, witness)`` where ``kind`` is
    ``"interior"``, ``"boundary"``, ``"undecided"`` (counted as meeting) or
    ``None`` when the sets are disjoint.
    """
    lo1, hi1, t1 = _box(s1)
    lo2, hi2, t2 = _box(s2)
    a, b, c, d = g
    if c == 0:
        # translations (up to sign): x-intervals must overlap
        shift = b / d
        if lo1 + shift <= hi2 + tol and hi1 + shift >= lo2 - tol:
            x = min(max(lo2, lo1 + shift), hi1 + shift)
            y = max(t1, t2) + 1.0
            inner = lo1 + shift < hi2 and hi1 + shift > lo2
            return ("interior" if inner else "boundary"), (x - shift, y)
        return None, None
    ymax = 1.0 / (c * c * t2)
    if ymax < t1 - tol:
        return None, None
    ymax = max(ymax, t1)
    boxes = [(lo1, hi1, t1, ymax)]
    count = 0
    while boxes:
        x0, x1, y0, y1 = boxes.pop()
        count += 1
        if count > _MAX_BOXES:
            return "undecided", ((x0 + x1) / 2, (y0 + y1) / 2)
        xi = iv.mpf([x0, x1])
        yi = iv.mpf([y0, y1])
        den = (c * xi + d) ** 2 + (c * c) * yi ** 2
        im = yi / den
        if float(im.b) < t2 - tol:
            continue
        re = iv.mpf(a) / c - (c * xi + d) / (c * den)
        if float(re.b) < lo2 - tol or float(re.a) > hi2 + tol:
            continue
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        w = act(g, complex(xm, ym))
        if lo1 <= xm <= hi1 and ym > t1 and lo2 <= w.real <= hi2 and w.imag > t2:
            return "interior", (xm, ym)
        if x1 - x0 < tol and y1 - y0 < tol:
            return "boundary", (xm, ym)
        if x1 - x0 >= y1 - y0:
            boxes.append((x0, xm, y0, y1))
            boxes.append((xm, x1, y0, y1))
        else:
            boxes.append((x0, x1, y0, ym))
            boxes.append((x0, x1, ym, y1))
    return None, None


def siegel_intersection_enumerate(s1: SiegelSet, s2: SiegelSet, height_bound: int = 20) -> EnumerationReport:
    """All ``gamma`` in SL(2, Z) with entries bounded by ``height_bound`` meeting ``S2`` from ``S1``.

    Every candidate in the box is visited; the analytic cutoffs of
    :func:`intersection_cutoffs` discard most of them, the rest are decided
    by :func:`decide_intersection`.  Boundary contacts within
    ``BOUNDARY_TOL`` count as intersections.  ``report.complete`` is true when
    the cutoffs lie inside the height bound, i.e. the list is the full set.
    """
    cut = intersection_cutoffs(s1, s2)
    B = int(height_bound)
    rep = EnumerationReport(cutoffs=cut)
    for c in range(-B, B + 1):
        for d in range(-B, B + 1):
            if math.gcd(c, d) != 1:
                continue
            for a in range(-B, B + 1):
                if c == 0:
                    if a * d != 1:
                        continue
                    bs = range(-B, B + 1)
                else:
                    num = a * d - 1
                    if num % c:
                        continue
                    bb = num // c
                    if abs(bb) > B:
                        continue
                    bs = (bb,)
                for b in bs:
                    g = (a, b, c, d)
                    rep.candidates += 1
                    if not _analytic_ok(g, cut):
                        rep.pruned += 1
                        continue
                    kind, wit = decide_intersection(g, s1, s2)
                    if kind is not None:
                        rep.elements.append(g)
                        rep.records.append({"gamma": g, "kind": kind, "witness": wit})
    rep.elements.sort()
    rep.records.sort(key=lambda r: r["gamma"])
    c_max = int(math.floor(cut["c_max"] + BOUNDARY_TOL))
    inside = c_max <= B and cut["b_max_translations"] <= B
    for pc in cut["per_c"].values():
        inside = inside and pc["d_max"] <= B and pc["a_max"] <= B
    rep.complete = inside
    return rep


def observed_gamma_p_threshold(u: float, ts, height_bound: int = 20) -> float | None:
    """Smallest ``t`` in ``ts`` for which ``S ∩ gamma S ≠ ∅`` forces ``c = 0``."""
    best = None
    for t in sorted(ts, reverse=True):
        s = SiegelSet.upper_half(u, t)
        rep = siegel_intersection_enumerate(s, s, height_bound)
        if all(g[2] == 0 for g in rep.elements):
            best = t
        else:
            break
    return best
