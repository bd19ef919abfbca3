import cmath
import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from siegelhodge.reduction import (GroupElement, SiegelSet, UpperHalfPoint, hecke_correspondence, iwasawa,
                                   orr_cover_check, reduce_sl2z, siegel_intersection_enumerate,
                                   siegel_membership)
from siegelhodge.reduction.hecke import compose_labels, primitive_integral
from siegelhodge.reduction.iwasawa import ep_chart, sl2_section
from siegelhodge.reduction.sl2z import act, bs_to_bb_chart

S_STD = SiegelSet.upper_half(0.5, 1.0)


def gram_schmidt_from_bottom(g):
    """Independent oracle: orthonormalise rows last to first, g = (upper triangular) k."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    k = np.zeros_like(g)
    r = np.zeros_like(g)
    for i in reversed(range(n)):
        v = g[i].copy()
        for j in range(i + 1, n):
            r[i, j] = v @ k[j]
            v = v - r[i, j] * k[j]
        r[i, i] = np.linalg.norm(v)
        k[i] = v / r[i, i]
    return r, k


# -- Iwasawa ------------------------------------------------------------------


def test_iwasawa_examples():
    c = iwasawa(np.eye(2))
    assert np.allclose(c.n_part, np.eye(2)) and np.allclose(c.a_part, 1) and np.allclose(c.m_part, np.eye(2))
    c = iwasawa([[2.0, 0.0], [0.0, 0.5]])
    assert np.allclose(c.a_part, [2, 0.5]) and np.allclose(c.m_part, np.eye(2))
    c = iwasawa([[1.0, 1.0], [1.0, 2.0]])
    r, k = gram_schmidt_from_bottom([[1, 1], [1, 2]])
    assert np.allclose(c.a_part, np.diag(r), atol=1e-12)
    assert np.allclose(c.a_part, [1 / math.sqrt(5), math.sqrt(5)])
    assert np.isclose(c.n_part[0, 1], 0.6)
    assert np.allclose(c.m_part, k, atol=1e-12)


def test_iwasawa_rejects_singular():
    with pytest.raises(ValueError):
        iwasawa([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(ValueError):
        GroupElement([[1, 1], [1, 1]])


def test_iwasawa_reconstruction_many():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        for _ in range(3000):
            g = rng.normal(size=(n, n))
            if np.linalg.det(g) < 0:
                g[0] *= -1
            g /= np.linalg.det(g) ** (1 / n)
            c = iwasawa(g)
            assert np.abs(c.reconstruct() - g).max() < 1e-10 * max(1, np.abs(g).max())
            assert np.all(c.a_part > 0)
            assert np.allclose(c.m_part @ c.m_part.T, np.eye(n), atol=1e-10)
            assert np.allclose(np.tril(c.n_part, -1), 0) and np.allclose(np.diag(c.n_part), 1)


def test_ep_chart_examples():
    assert np.allclose(ep_chart([2.0, 0.5]), [0.25])
    assert np.allclose(ep_chart([1.0, 1.0, 1.0]), [1, 1])
    assert np.allclose(ep_chart([4.0, 1.0, 0.25]), [0.25, 0.25])
    with pytest.raises(ValueError):
        ep_chart([1.0, -1.0])


# -- membership -------------------------------------------------------------------


def test_membership_examples():
    assert siegel_membership(UpperHalfPoint(0, 2), S_STD)
    assert not siegel_membership(UpperHalfPoint(0.4, 0.5), S_STD)
    assert not siegel_membership(UpperHalfPoint(0.6, 2), S_STD)
    # the section n(x) a(sqrt y) of z is a matrix point of the same Siegel set
    assert siegel_membership(sl2_section(0.3 + 2j), S_STD)


def test_membership_sl3_against_oracle():
    rng = np.random.default_rng(11)
    s = SiegelSet(0.5, [(-1, 1)] * 3, blocks=(3,))
    agree = 0
    for _ in range(300):
        g = rng.normal(size=(3, 3))
        if np.linalg.det(g) < 0:
            g[0] *= -1
        g /= np.linalg.det(g) ** (1 / 3)
        r, _ = gram_schmidt_from_bottom(g)
        a = np.diag(r)
        n = r / a[None, :]
        inside = (np.all(np.abs(n[np.triu_indices(3, 1)]) <= 1) and a[0] / a[1] > 0.5 and a[1] / a[2] > 0.5)
        assert siegel_membership(g, s) == inside
        agree += 1
    assert agree == 300


# -- SL(2, Z) reduction -----------------------------------------------------------


def in_closed_fd(w, tol=1e-12):
    return -0.5 - tol <= w.real < 0.5 + tol and abs(w) >= 1 - tol


def test_reduce_examples():
    w, g = reduce_sl2z(5 + 1j)
    assert abs(w - 1j) < 1e-14 and g == (1, -5, 0, 1)
    w, g = reduce_sl2z(0.25 + 2j)
    assert w == 0.25 + 2j and g == (1, 0, 0, 1)


def test_reduce_against_exhaustive_search():
    z = 0.1 + 0.1j
    w, g = reduce_sl2z(z)
    hits = []
    for a, b, c, d in product(range(-12, 13), repeat=4):
        if a * d - b * c == 1:
            v = act((a, b, c, d), z)
            if -0.5 <= v.real < 0.5 and abs(v) > 1 + 1e-12:
                hits.append(v)
    assert hits and all(abs(v - hits[0]) < 1e-9 for v in hits)
    assert abs(w - hits[0]) < 1e-9
    assert abs(act(g, z) - w) < 1e-12


zs = st.builds(complex, st.floats(-50, 50), st.floats(1e-3, 50))


@given(zs)
def test_reduce_properties(z):
    w, g = reduce_sl2z(z)
    a, b, c, d = g
    assert a * d - b * c == 1
    assert in_closed_fd(w)
    assert abs(act(g, z) - w) < 1e-8 * max(1, abs(w))
    w2, g2 = reduce_sl2z(w)
    assert abs(w2 - w) < 1e-9


@given(zs, st.sampled_from([(1, 1, 0, 1), (0, -1, 1, 0), (2, 1, 1, 1), (1, -3, 1, -2)]))
def test_reduce_equivariance(z, h):
    w1, _ = reduce_sl2z(z)
    w2, _ = reduce_sl2z(act(h, z))
    # points on the boundary arcs are identified before comparing
    assert abs(w1 - w2) < 1e-6 or (abs(abs(w1) - 1) < 1e-6 and abs(w1.imag - w2.imag) < 1e-6) \
        or abs(abs(w1.real) - 0.5) < 1e-6


def test_reduce_idempotent_on_rounded_edge():
    # 1/3 + i/3 lands at x = 1/2 - 2e-16 before the tie-break
    w, _ = reduce_sl2z(1 / 3 + 1j / 3)
    assert abs(w - (-0.5 + 1.5j)) < 1e-12
    assert reduce_sl2z(w) == (w, (1, 0, 0, 1))


def test_reduce_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        reduce_sl2z(1 - 1j)


# -- Siegel set intersections ----------------------------------------------------------


def brute_force_intersections(u, t, bound, samples=200):
    """Oracle: sample the closed Siegel set densely and test membership of gamma-images."""
    xs = np.linspace(-u, u, 41)
    ys = np.concatenate([np.linspace(t, 3, 60), np.geomspace(3, 200, 20)])
    pts = (xs[:, None] + 1j * ys[None, :]).ravel()
    found = set()
    for a, b, c, d in product(range(-bound, bound + 1), repeat=4):
        if a * d - b * c != 1:
            continue
        w = (a * pts + b) / (c * pts + d)
        if np.any((np.abs(w.real) <= u + 1e-9) & (w.imag >= t - 1e-9)):
            found.add((a, b, c, d))
    return found


def test_enumerate_y_above_1_1():
    s = SiegelSet.upper_half(0.5, 1.1)
    got = siegel_intersection_enumerate(s, s, 20).gammas()
    expected = {(1, 0, 0, 1), (-1, 0, 0, -1), (1, 1, 0, 1), (-1, -1, 0, -1), (1, -1, 0, 1), (-1, 1, 0, -1)}
    assert got == expected
    assert brute_force_intersections(0.5, 1.1, 3) == expected


def test_enumerate_y_above_1():
    s = SiegelSet.upper_half(0.5, 1.0)
    rep = siegel_intersection_enumerate(s, s, 20)
    got = rep.gammas()
    assert {(0, -1, 1, 0), (0, 1, -1, 0)} <= got
    assert rep.complete
    assert all(abs(v) <= 2 for g in got for v in g)
    assert brute_force_intersections(0.5, 1.0, 3) <= got


@given(st.floats(0.3, 1.0), st.floats(0.6, 1.5), st.floats(0.6, 1.5))
def test_enumerate_symmetry(u, t1, t2):
    s1, s2 = SiegelSet.upper_half(u, t1), SiegelSet.upper_half(u, t2)
    fwd = siegel_intersection_enumerate(s1, s2, 6).gammas()
    bwd = siegel_intersection_enumerate(s2, s1, 6).gammas()
    assert {(d, -b, -c, a) for a, b, c, d in fwd} == bwd


def test_enumerate_high_sets_only_translations():
    s1, s2 = SiegelSet.upper_half(0.5, 1.5), SiegelSet.upper_half(0.5, 4.0)
    got = siegel_intersection_enumerate(s1, s2, 20).gammas()
    assert got and all(g[2] == 0 for g in got)


# -- Hecke --------------------------------------------------------------------------------


def gamma0_index(p):
    """Oracle: number of points of P^1(Z/p), the index of Γ0(p) in SL2(Z)."""
    units = [u for u in range(1, p) if math.gcd(u, p) == 1] or [1]
    lines = {frozenset((c * u % p, d * u % p) for u in units)
             for c, d in product(range(p), repeat=2) if math.gcd(math.gcd(c, d), p) == 1}
    return len(lines)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 4, 6])
def test_hecke_degree_matches_gamma0_index(p):
    res = hecke_correspondence([[1, 0], [0, p]])
    assert res.degree == gamma0_index(p)
    for label, gam in res.cosets:
        assert np.asarray(gam).size == 4


def test_hecke_identity_and_scaling():
    assert hecke_correspondence([[1, 0], [0, 1]]).degree == 1
    assert hecke_correspondence([["1/2", 0], [0, 1]]).degree == 3
    assert hecke_correspondence(np.array([[2, 0], [0, 4]])).degree == 3


def test_hecke_multiplicativity():
    r2 = hecke_correspondence([[1, 0], [0, 2]])
    r3 = hecke_correspondence([[1, 0], [0, 3]])
    r6 = hecke_correspondence([[1, 0], [0, 6]])
    assert r6.degree == r2.degree * r3.degree
    assert compose_labels(r2, r3) == {lab for lab, _ in r6.cosets}


def test_hecke_errors():
    with pytest.raises(NotImplementedError):
        hecke_correspondence([[1, 0], [0, 2]], gamma_level=2)
    with pytest.raises(TypeError):
        primitive_integral([[0.5, 0], [0, 1]])
    with pytest.raises(ValueError):
        primitive_integral([[0, 1], [1, 0]])


# -- cusp chart and Orr coverings -----------------------------------------------------------


def test_bs_to_bb_chart():
    assert abs(bs_to_bb_chart(0.0, 1.0) - math.exp(-2 * math.pi)) < 1e-15
    assert abs(bs_to_bb_chart(0.0, 1.0) - 0.00186744) < 1e-8
    assert abs(bs_to_bb_chart(0.25, 0.5) - 1j * math.exp(-4 * math.pi)) < 1e-18
    assert abs(bs_to_bb_chart(0.3, 1e-3)) < 1e-300
    # periodic in x
    assert abs(bs_to_bb_chart(-0.5, 0.7) - bs_to_bb_chart(0.5, 0.7)) < 1e-15
    assert cmath.isclose(bs_to_bb_chart(0.1, 0.4), cmath.exp(2j * math.pi * (0.1 + 1j / 0.4)))


def test_orr_diagonal():
    h = SiegelSet.upper_half(0.5, 1.0)
    g = SiegelSet(1.0, [(-0.5, 0.5)] * 2, blocks=(2, 2))
    res = orr_cover_check("diagonal", h, samples=500, c_set=[np.eye(4)], g_siegel=g)
    assert res.covered_fraction == 1.0


def test_orr_sym2_fitted():
    res = orr_cover_check("sym2", SiegelSet.upper_half(0.5, 1.0), samples=1000)
    assert res.covered_fraction == 1.0
    assert 1 <= len(res.c_set) and all(abs(round(np.linalg.det(c))) == 1 for c in res.c_set)


def test_orr_undersized_t():
    h = SiegelSet.upper_half(0.5, 1.0)
    g = SiegelSet(3.0, [(-0.5, 0.5)] * 2, blocks=(2, 2))
    res = orr_cover_check("diagonal", h, samples=500, c_set=[np.eye(4)], g_siegel=g)
    assert res.covered_fraction < 1.0 and res.uncovered


def test_orr_unknown_embedding():
    with pytest.raises(ValueError):
        orr_cover_check("spin7", S_STD, samples=10)
