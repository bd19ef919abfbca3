"""Covering images of Siegel sets under group embeddings by finitely many Siegel sets.

For an embedding ``ρ: SL(2) -> G`` and a Siegel set ``S_H`` of the upper
half-plane we look for a finite ``C ⊂ G(Q)`` and a Siegel set ``S_G`` with
``ρ(S_H) ⊂ ∪_{c ∈ C} c · S_G``.  Everything is sampled: ``C`` is chosen
greedily among signed permutation matrices, ``S_G`` is fitted on one sample
and the covering is then measured on a fresh one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Sequence

import numpy as np

from .iwasawa import sl2_section
from .siegel import SiegelSet, coords_for

__all__ = [
    "EMBEDDINGS",
    "Embedding",
    "OrrResult",
    "sym2",
    "sample_siegel_points",
    "fit_g_siegel",
    "greedy_c_set",
    "orr_cover_check",
]

_SQ2 = np.sqrt(2.0)


def sym2(g) -> np.ndarray:
    """Symmetric square in the orthonormal basis ``(X^2, sqrt2 XY, Y^2)``.

    Orthogonal matrices go to orthogonal matrices and upper-triangular to
    upper-triangular, so ``sym2(n(x) a(sqrt y))`` has diagonal ``(y, 1, 1/y)``.
    """
    (a, b), (c, d) = np.asarray(g, dtype=float)
    return np.array([
        [a * a, _SQ2 * a * b, b * b],
        [_SQ2 * a * c, a * d + b * c, _SQ2 * b * d],
        [c * c, _SQ2 * c * d, d * d],
    ])


_W3 = np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])


@dataclass(frozen=True)
class Embedding:
    name: str
    blocks: tuple
    rho: Callable


EMBEDDINGS = {
    "diagonal": Embedding("diagonal", (2, 2), lambda g: np.kron(np.eye(2), np.asarray(g, dtype=float))),
    "sym2": Embedding("sym2", (3,), sym2),
    # conjugated by a signed anti-diagonal permutation: the image is lower triangular
    "sym2_twisted": Embedding("sym2_twisted", (3,), lambda g: _W3 @ sym2(g) @ _W3.T),
}


def _embedding(e) -> Embedding:
    if isinstance(e, Embedding):
        return e
    try:
        return EMBEDDINGS[e]
    except KeyError:
        raise ValueError(f"unsupported embedding {e!r}; choose from {sorted(EMBEDDINGS)}") from None


def _signed_permutations(n: int) -> list[np.ndarray]:
    out = []
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            m = np.zeros((n, n))
            for i, j in enumerate(perm):
                m[i, j] = signs[i]
            if round(np.linalg.det(m)) == 1:
                out.append(m)
    # identity first for deterministic greedy ties
    out.sort(key=lambda m: (not np.array_equal(m, np.eye(n)), m.ravel().tolist()))
    return out


def _candidates(blocks: Sequence[int]) -> list[np.ndarray]:
    per_block = [_signed_permutations(b) for b in blocks]
    out = []
    for combo in product(*per_block):
        m = np.zeros((sum(blocks), sum(blocks)))
        pos = 0
        for blk in combo:
            b = blk.shape[0]
            m[pos:pos + b, pos:pos + b] = blk
            pos += b
        out.append(m)
    return out


def sample_siegel_points(h: SiegelSet, count: int, rng: np.random.Generator, y_span: float = 100.0):
    """Points of an upper half-plane Siegel set with ``log y`` uniform on ``[t, t*y_span]``."""
    (lo, hi), = h.u_bounds
    t = h.t[0]
    x = rng.uniform(lo, hi, count)
    # strictly above t: the Siegel set is open in y
    y = t * np.exp(rng.uniform(0.0, np.log(y_span), count)) * (1 + 1e-12)
    return x + 1j * y


def _lift(z: complex, theta: float) -> np.ndarray:
    k = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    return sl2_section(z) @ k


def _template(blocks) -> SiegelSet:
    nu = sum(b * (b - 1) // 2 for b in blocks)
    return SiegelSet(1.0, [(-1.0, 1.0)] * nu, blocks=blocks)


def _coords(g_img, c: np.ndarray, blocks):
    return coords_for(np.linalg.solve(c, g_img), _template(blocks))


def greedy_c_set(emb, images: Sequence[np.ndarray], candidates=None, ratio: float = 0.5) -> list[np.ndarray]:
    """Greedy cover: ``c`` serves an image when its smallest root is within ``ratio`` of the best."""
    emb = _embedding(emb)
    cands = _candidates(emb.blocks) if candidates is None else list(candidates)
    scores = np.array([[np.min(_coords(g, c, emb.blocks)[1]) for c in cands] for g in images])
    best = scores.max(axis=1)
    serves = scores >= ratio * best[:, None]
    left = np.ones(len(images), dtype=bool)
    chosen = []
    while left.any():
        gain = (serves & left[:, None]).sum(axis=0)
        j = int(np.argmax(gain))
        if gain[j] == 0:
            break
        chosen.append(j)
        left &= ~serves[:, j]
    return [cands[j] for j in chosen]


def fit_g_siegel(emb, images: Sequence[np.ndarray], c_set: Sequence[np.ndarray],
                 t_factor: float = 0.9, u_factor: float = 1.1) -> SiegelSet:
    """Smallest box-and-height Siegel set (times safety factors) covering ``images``.

    Each image is assigned to the ``c`` giving the largest minimal root; then
    ``t = t_factor * min root`` and ``|u_i| <= u_factor * max |u_i|``.
    """
    emb = _embedding(emb)
    us, roots = [], []
    for g in images:
        best = max((_coords(g, c, emb.blocks) for c in c_set), key=lambda ur: np.min(ur[1]))
        us.append(best[0])
        roots.append(best[1])
    us = np.abs(np.array(us))
    t = t_factor * float(np.min(roots))
    umax = np.maximum(u_factor * us.max(axis=0), 1e-9)
    return SiegelSet(t, [(-u, u) for u in umax], blocks=emb.blocks)


@dataclass
class OrrResult:
    c_set: list
    covered_fraction: float
    g_siegel: SiegelSet
    samples: int
    uncovered: list = field(default_factory=list)


def orr_cover_check(embedding, h_siegel: SiegelSet, samples: int = 1000, c_set=None,
                    g_siegel: SiegelSet | None = None, seed: int = 0,
                    calibration: int | None = None) -> OrrResult:
    """Fit ``(C, S_G)`` and measure how much of ``ρ(S_H)`` it covers.

    Parameters
    ----------
    embedding : str or Embedding
        ``"diagonal"`` (SL2 in SL2×SL2), ``"sym2"`` (SL2 in SL3) or ``"sym2_twisted"``.
    h_siegel : SiegelSet
        Siegel set in the upper half-plane to sample.
    samples : int
        Fresh evaluation points.
    c_set : list of arrays, optional
        Fixed ``C``; chosen greedily when omitted.
    g_siegel : SiegelSet, optional
        Fixed ``S_G``; fitted on an independent calibration sample when omitted.
    """
    emb = _embedding(embedding)
    rng = np.random.default_rng(seed)
    ncal = samples if calibration is None else calibration

    def images(n):
        zs = sample_siegel_points(h_siegel, n, rng)
        thetas = rng.uniform(0, 2 * np.pi, n)
        return zs, [emb.rho(_lift(z, th)) for z, th in zip(zs, thetas)]

    if c_set is None or g_siegel is None:
        _, cal = images(ncal)
        if c_set is None:
            c_set = greedy_c_set(emb, cal)
        if g_siegel is None:
            g_siegel = fit_g_siegel(emb, cal, c_set)
    c_set = [np.asarray(c, dtype=float) for c in c_set]
    zs, test = images(samples)
    covered = 0
    uncovered = []
    for z, g in zip(zs, test):
        ok = False
        for c in c_set:
            u, roots = _coords(g, c, emb.blocks)
            if g_siegel.contains_coords(u, roots):
                ok = True
                break
        if ok:
            covered += 1
        else:
            uncovered.append(complex(z))
    return OrrResult([np.rint(c).astype(int) for c in c_set], covered / samples, g_siegel, samples, uncovered)
