"""Built-in mixed Hodge structures and random Hodge–Tate instances."""

from __future__ import annotations

import random

from gmpy2 import mpq

from .exactlin import I, ExactMatrix, Filtration, Subspace, scalar
from .mhs import MixedHodge

__all__ = ["hodge_tate", "elliptic_pure", "legendre_limit", "rank4_two_step", "product_limit",
           "random_hodge_tate", "builtin_mhs"]


def _e(n, i):
    return tuple(mpq(int(j == i)) for j in range(n))


def hodge_tate(c=0) -> MixedHodge:
    """``W_0 = span(e1) ⊂ W_2 = V``, ``F^1 = span(e2 + c e1)``."""
    c = scalar(c)
    w = Filtration(2, {0: Subspace(2, [_e(2, 0)]), 2: Subspace.full(2)}, "inc")
    f = Filtration(2, {0: Subspace.full(2), 1: Subspace(2, [(c, mpq(1))])}, "dec")
    return MixedHodge(w, f)


def elliptic_pure(tau=I) -> MixedHodge:
    """Weight-one Hodge structure with ``F^1 = span(τ e1 + e2)``."""
    w = Filtration.trivial(2, 1)
    f = Filtration(2, {0: Subspace.full(2), 1: Subspace(2, [(scalar(tau), mpq(1))])}, "dec")
    return MixedHodge(w, f)


def legendre_limit() -> MixedHodge:
    from .period.families import get_family

    return get_family("legendre").orbit.limit_mhs()


def product_limit() -> MixedHodge:
    from .period.families import get_family

    return get_family("product").orbit.limit_mhs()


def rank4_two_step(c1=mpq(1) + I, c2=mpq(2) - 3 * I) -> MixedHodge:
    """Weights 0, 1, 2 with a weight-one piece ``τ = i`` in the middle.

    ``W_0 = span(e1) ⊂ W_1 = span(e1, e2, e3) ⊂ W_2 = V`` and
    ``F^1 = span(e3 + i e2 + c1 e1, e4 + c2 e1)``; not R-split unless the
    ``c``'s are real.
    """
    n = 4
    e = [_e(n, i) for i in range(n)]
    w = Filtration(n, {0: Subspace(n, [e[0]]), 1: Subspace(n, e[:3]), 2: Subspace.full(n)}, "inc")
    c1, c2 = scalar(c1), scalar(c2)
    f1 = Subspace(n, [(c1, I, mpq(1), mpq(0)), (c2, mpq(0), mpq(0), mpq(1))])
    f = Filtration(n, {0: Subspace.full(n), 1: f1}, "dec")
    return MixedHodge(w, f)


def _gauss(rng: random.Random, lo=-5, hi=5):
    a = mpq(rng.randint(lo, hi), rng.randint(1, 4))
    b = mpq(rng.randint(lo, hi), rng.randint(1, 4))
    return scalar(a + b * I) if b else a


def random_hodge_tate(rng: random.Random, max_dim: int = 5) -> MixedHodge:
    """Mixed Tate structure with random Gaussian-rational extension data.

    Basis vectors get weights ``2p`` for random ``p ∈ {0, 1, 2}``; ``F^p`` is
    spanned by ``e_j + sum c_ij e_i`` over ``weight(j) >= 2p``, the sum
    running over basis vectors of strictly lower weight.
    """
    n = rng.randint(2, max_dim)
    ps = sorted(rng.randint(0, 2) for _ in range(n))
    if len(set(ps)) == 1:
        ps[-1] = ps[0] + 1
    vecs = []
    for j in range(n):
        v = [mpq(0)] * n
        v[j] = mpq(1)
        for i in range(n):
            if ps[i] < ps[j]:
                v[i] = _gauss(rng)
        vecs.append(tuple(v))
    w = Filtration(n, {2 * p: Subspace(n, [_e(n, j) for j in range(n) if ps[j] <= p]) for p in set(ps)}, "inc")
    f = Filtration(n, {p: Subspace(n, [vecs[j] for j in range(n) if ps[j] >= p]) for p in range(0, max(ps) + 1)},
                   "dec")
    return MixedHodge(w, f)


def builtin_mhs() -> dict[str, MixedHodge]:
    return {
        "hodge_tate_real": hodge_tate(3),
        "hodge_tate_complex": hodge_tate(mpq(3) + 5 * I),
        "hodge_tate_i": hodge_tate(I),
        "elliptic_i": elliptic_pure(),
        "elliptic_shifted": elliptic_pure(mpq(1, 2) + 2 * I),
        "legendre_limit": legendre_limit(),
        "product_limit": product_limit(),
        "rank4_two_step": rank4_two_step(),
    }
