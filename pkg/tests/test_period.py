import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from siegelhodge.exactlin import ExactMatrix, Filtration, Subspace
from siegelhodge.mhs import PolarizationForm
from siegelhodge.period.containment import containment_grid, siegel_containment_check
from siegelhodge.period.decay import local_lift, schmid_decay_check, validity_threshold
from siegelhodge.period.families import get_family
from siegelhodge.period.hodgelocus import fit_algebraic_curve, hodge_locus_demo, is_flagged, isogeny_relations
from siegelhodge.period.legendre import (LIFT_Y_MIN, hypergeometric_period, legendre_tau, lift_tau,
                                         monodromy_by_continuation)
from siegelhodge.period.orbit import (HodgeFrame, NilpotentOrbitData, SectorSpec, invariant_distance,
                                      nilpotent_orbit_eval, sector_decompose)
from siegelhodge.period.parabolic import (build_limit_parabolic, horospherical_factorization_track,
                                          nilradical_is_subalgebra, nj_in_nilradical_check)
from siegelhodge.reduction import UpperHalfPoint, siegel_membership

LEGENDRE = get_family("legendre")
PRODUCT = get_family("product")
CONSTANT = get_family("constant")


# -- hypergeometric period and τ ---------------------------------------------------------


def test_period_constant_term_and_agm():
    assert hypergeometric_period(0) == 1
    # complete elliptic integral: F(λ) = (2/π) K(λ), and K(3/4) = π / (2 AGM(1, 1/2))
    want = 1 / mp.agm(1, 0.5)
    assert abs(hypergeometric_period(0.75) - complex(want)) < 1e-14
    assert abs(hypergeometric_period(0.75) - complex(2 / mp.pi * mp.ellipk(0.75))) < 1e-14


def test_series_and_agm_agree():
    rng = np.random.default_rng(0)
    r = 0.5 * np.sqrt(rng.uniform(0, 1, 100))
    lam = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    for v in lam:
        assert abs(hypergeometric_period(v, "series") - hypergeometric_period(v, "agm")) < 1e-12


def test_series_domain():
    with pytest.raises(ValueError):
        hypergeometric_period(1.2j, "series")
    with pytest.raises(ValueError):
        hypergeometric_period(2.0)


def test_tau_examples():
    assert abs(legendre_tau(0.5) - 1j) < 1e-10
    ys = [legendre_tau(10.0 ** -k).imag for k in range(1, 8)]
    assert all(a < b for a, b in zip(ys, ys[1:]))
    with pytest.raises(ValueError):
        legendre_tau(0)
    with pytest.raises(ValueError):
        legendre_tau(-1.0)


@given(st.complex_numbers(max_magnitude=3).filter(lambda z: abs(z.imag) > 1e-3))
def test_tau_reflection(lam):
    t = legendre_tau(lam)
    assert t.imag > 0
    assert abs(legendre_tau(lam.conjugate()) + t.conjugate()) < 1e-9 * max(1, abs(t))


# -- lift, monodromy and the nilpotent orbit ---------------------------------------------


def test_monodromy_by_continuation():
    t = monodromy_by_continuation()
    want = LEGENDRE.monodromy[0].to_numpy(float)
    assert np.abs(t - want).max() <= 1e-6
    assert LEGENDRE.monodromy[0] == LEGENDRE.orbit.ns[0].matrix.exp_nilpotent()
    assert (LEGENDRE.orbit.ns[0].matrix @ LEGENDRE.orbit.ns[0].matrix).is_zero()


@given(st.floats(-0.5, 0.5), st.floats(0.6, 6))
def test_lift_translation_is_monodromy(x, y):
    a, b = lift_tau(complex(x, y)), lift_tau(complex(x + 1, y))
    assert abs(b - (a + 2)) < 1e-11
    # same for the orbit: θ(z + 1) = exp(N) θ(z)
    t1 = nilpotent_orbit_eval(LEGENDRE.orbit, [complex(x, y)]).taus()[0]
    t2 = nilpotent_orbit_eval(LEGENDRE.orbit, [complex(x + 1, y)]).taus()[0]
    assert abs(t2 - (t1 + 2)) < 1e-12


def test_lift_matches_agm_period_mod_2():
    rng = np.random.default_rng(5)
    for _ in range(50):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 3))
        lam = 16 * cmath.exp(2j * math.pi * z)
        d = lift_tau(z) - legendre_tau(lam)
        assert abs(d.imag) < 1e-10 and abs(d.real / 2 - round(d.real / 2)) < 1e-10


def test_lift_rejects_low_points():
    with pytest.raises(ValueError):
        lift_tau(0.3j)
    assert abs(LIFT_Y_MIN - math.log(40) / (2 * math.pi)) < 1e-15


def test_product_monodromies_commute():
    t1, t2 = PRODUCT.monodromy
    assert t1 @ t2 == t2 @ t1


def test_orbit_examples():
    assert nilpotent_orbit_eval(LEGENDRE.orbit, [0]).taus() == (0j,)
    for y in (1.0, 3.0, 10.0):
        assert abs(nilpotent_orbit_eval(LEGENDRE.orbit, [1j * y]).taus()[0] - 2j * y) < 1e-12
    taus = nilpotent_orbit_eval(PRODUCT.orbit, [0.1 + 2j, -0.3 + 5j]).taus()
    assert np.allclose(taus, [0.2 + 4j, -0.6 + 10j])


def test_orbit_data_validation():
    f = LEGENDRE.orbit.limit_f
    q = PolarizationForm(ExactMatrix([[0, -1], [1, 0]]), -1)
    with pytest.raises(ValueError):
        NilpotentOrbitData((ExactMatrix([[0, 1], [0, 0]]), ExactMatrix([[0, 0], [1, 0]])), f, 1, q)
    assert LEGENDRE.orbit.polarized_by_cone()
    assert PRODUCT.orbit.polarized_by_cone()


def test_local_lift_sample():
    s = local_lift("legendre", [0.1 + 3j])
    assert s.distance > 0 and abs(s.orbit[0] - (0.2 + 6j)) < 1e-12
    assert abs(s.q[0] - cmath.exp(2j * math.pi * (0.1 + 3j))) < 1e-20
    assert local_lift("constant", [0.1 + 3j]).distance == 0


# -- distance --------------------------------------------------------------------------------


def test_distance_examples():
    assert invariant_distance(1j, 1j) == 0
    assert abs(invariant_distance(1j, 2j) - math.log(2)) < 1e-15
    assert abs(float(invariant_distance(1j, 2j, dps=40)) - math.log(2)) < 1e-15
    f1, f2 = HodgeFrame.from_taus([1j, 3j]), HodgeFrame.from_taus([2j, 3j])
    assert abs(invariant_distance(f1, f2) - math.log(2)) < 1e-15


def test_distance_sl2r_invariance():
    rng = np.random.default_rng(2)
    for _ in range(50):
        g = rng.normal(size=(2, 2))
        if np.linalg.det(g) < 0:
            g[0] *= -1
        g /= math.sqrt(np.linalg.det(g))
        a, b = complex(rng.normal(), rng.uniform(0.1, 3)), complex(rng.normal(), rng.uniform(0.1, 3))
        act = lambda z: (g[0, 0] * z + g[0, 1]) / (g[1, 0] * z + g[1, 1])
        assert abs(invariant_distance(act(a), act(b)) - invariant_distance(a, b)) < 1e-10


# -- sectors ------------------------------------------------------------------------------------


def test_sector_examples():
    assert sector_decompose([[1 + 3j]], 2)[0].sigma == (0,)
    s = sector_decompose([[5j, 2j]], 2)[0]
    assert s.sigma == (0, 1) and s.contains([5, 2])
    assert sector_decompose([[2j, 5j]], 2)[0].sigma == (1, 0)
    with pytest.raises(ValueError):
        sector_decompose([[1j, 5j]], 2)
    with pytest.raises(ValueError):
        SectorSpec((0, 0), 1.0)


def test_sector_total_cover():
    pts = containment_grid(2, 0.5, 2, 50, 1000)
    secs = sector_decompose(pts, 2)
    assert len(secs) == len(pts)
    assert all(s.contains(p.imag) for s, p in zip(secs, pts))


# -- the limit parabolic ---------------------------------------------------------------------


def test_parabolic_legendre():
    p = build_limit_parabolic(LEGENDRE.orbit)
    assert p.w_filts[0] == LEGENDRE.orbit.limit_mhs().W
    assert p.yhat[0] == ExactMatrix.diag([-1, 1])
    mats = p.n_p_matrices()
    assert len(mats) == 1
    # the single direction is the strictly upper triangular one, i.e. the line of N
    assert mats[0].vectorize() in Subspace(4, [LEGENDRE.orbit.ns[0].matrix.vectorize()])
    assert nilradical_is_subalgebra(p)


def test_parabolic_product_both_orderings():
    for sigma in [(0, 1), (1, 0)]:
        p = build_limit_parabolic(PRODUCT.orbit, sigma, PRODUCT.lie_algebra)
        assert len(p.n_p_matrices()) == 2
        assert all(m.vectorize() in p.n_p_basis for m in (n.matrix for n in PRODUCT.orbit.ns))
        # inside all of sp(Q) the nilradical also picks up the two mixing directions
        assert len(build_limit_parabolic(PRODUCT.orbit, sigma).n_p_matrices()) == 4
        assert nilradical_is_subalgebra(p)
        assert nj_in_nilradical_check(PRODUCT.orbit, p)


def test_parabolic_zero_nilpotents():
    p = build_limit_parabolic(CONSTANT.orbit)
    assert p.n_p_basis.dim == 0
    assert p.yhat[0].is_zero()


def test_nj_check_rejects_raising_operator():
    p = build_limit_parabolic(LEGENDRE.orbit)
    assert nj_in_nilradical_check(LEGENDRE.orbit, p)
    n_plus = ExactMatrix([[0, 0], [1, 0]])
    assert not nj_in_nilradical_check(LEGENDRE.orbit, p, [n_plus])


def test_parabolic_rejects_non_constant_cone():
    # commuting, but a + b = E34 has a different Jordan type than 2a + b = E12 + 2 E34
    a = ExactMatrix([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
    b = ExactMatrix([[0, -1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    q = PRODUCT.orbit.polarization
    d = NilpotentOrbitData((a, b), PRODUCT.orbit.limit_f, 1, q, (2, 2))
    with pytest.raises(ValueError):
        build_limit_parabolic(d, (0, 1))


# -- horospherical track -------------------------------------------------------------------


def test_track_constant_family():
    res = horospherical_factorization_track(CONSTANT.orbit, [[y] for y in np.linspace(5, 50, 10)])
    for c in res.coords:
        assert np.allclose(c.a_part, 1) and np.allclose(c.n_part, np.eye(2)) and np.allclose(c.m_part, np.eye(2))


def test_track_legendre_orbit_and_lift():
    ys = np.geomspace(5, 50, 12)
    res = horospherical_factorization_track(LEGENDRE.orbit, [[y] for y in ys])
    assert res.ok(1e-9)
    for y, c in zip(ys, res.coords):
        assert abs(c.a_part[0] / math.sqrt(y) - 1) < 1e-12
    lifted = horospherical_factorization_track(LEGENDRE.orbit, [[y] for y in ys],
                                               period=lambda z: LEGENDRE.lift(z))
    assert lifted.ok(1e-9)


def test_track_product_diagonal_path():
    ys = np.geomspace(5, 50, 10)
    for sigma, path in [((0, 1), [[2 * y, y] for y in ys]), ((1, 0), [[y, 3 * y] for y in ys])]:
        p = build_limit_parabolic(PRODUCT.orbit, sigma)
        res = horospherical_factorization_track(PRODUCT.orbit, path, p)
        assert res.ok(1e-9)
        assert len(res.coords[-1].a_part) == 4


# -- decay ----------------------------------------------------------------------------------------


def test_decay_legendre_rate():
    fit, = schmid_decay_check("legendre", samples=30)
    assert fit.rate_ok() and abs(fit.rate - 2 * math.pi) < 1e-3
    assert fit.residual < 0.1 and fit.monotone
    assert abs(fit.beta + 1) < 0.05


def test_decay_constant_and_product():
    fit, = schmid_decay_check("constant", samples=10)
    assert fit.identically_zero and fit.rate_ok()
    fits = schmid_decay_check("product", samples=12, dps=30)
    assert len(fits) == 2 and all(f.rate_ok() for f in fits)


def test_decay_errors():
    with pytest.raises(ValueError):
        schmid_decay_check("legendre", samples=5)
    with pytest.raises(ValueError):
        schmid_decay_check("legendre", y_range=(0.2, 3), samples=10)
    with pytest.raises(ValueError):
        schmid_decay_check("cubic")


def test_validity_threshold_above_hard_bound():
    t = validity_threshold("legendre", np.linspace(0.3, 1.5, 61))
    assert LIFT_Y_MIN - 0.05 < t < 0.7


# -- containment ---------------------------------------------------------------------------------


def test_containment_legendre():
    res = siegel_containment_check("legendre", grid=2500)
    assert res.ok and len(res.witnesses) == 1
    w = res.witnesses[0]
    for z in containment_grid(1, 0.5, 2, 50, 400)[:, 0]:
        tau = complex(np.atleast_1d(LEGENDRE.lift(z))[0])
        assert siegel_membership(UpperHalfPoint.from_complex(tau), w)
    assert 1 < w.t[0] < 4


def test_containment_product_with_holdout():
    res = siegel_containment_check("product", grid=2500, holdout=300)
    assert res.ok and len(res.witnesses) <= 2


def test_containment_threshold_error():
    with pytest.raises(ValueError):
        siegel_containment_check("legendre", eta=0.2, grid=100)


# -- Hodge locus --------------------------------------------------------------------------------


def test_isogeny_relations():
    rels = isogeny_relations(4)
    assert (1, 0, 0, 1) in rels and (0, 1, -1, 0) in rels
    assert all(1 <= a * d - b * c <= 4 for a, b, c, d in rels)
    assert len(set(rels)) == len(rels)


def test_is_flagged():
    assert is_flagged(0.3, 0.3) == (1, 0, 0, 1)
    assert is_flagged(0.2 + 0.1j, 0.2 + 0.1j) == (1, 0, 0, 1)
    assert is_flagged(0.3, 0.7) is not None


def test_generic_points_not_flagged():
    rng = np.random.default_rng(9)
    rels = isogeny_relations(4)
    hits = sum(is_flagged(complex(*rng.uniform(0.05, 0.95, 2) * [1, 1]) + 0.1j * rng.uniform(0.1, 1),
                          complex(*rng.uniform(0.05, 0.95, 2) * [1, 1]) + 0.1j * rng.uniform(0.1, 1),
                          relations=rels) is not None for _ in range(100))
    assert hits <= 5


def test_hodge_locus_demo_components():
    res = hodge_locus_demo(grid=100)
    diag = res.component((1, 0, 0, 1))
    assert diag is not None and diag.degree == 1
    assert np.abs(diag.points[:, 0] - diag.points[:, 1]).max() < 1e-9
    anti = res.component((0, 1, -1, 0))
    assert anti is not None and np.abs(anti.points.sum(axis=1) - 1).max() < 1e-9
    half = res.component((1, 0, 0, 2))
    l1, l2 = half.points[:, 0].real, half.points[:, 1].real
    # Landen halving: λ(τ/2) = 4 sqrt(λ) / (1 + sqrt(λ))^2
    assert np.abs(l2 - 4 * np.sqrt(l1) / (1 + np.sqrt(l1)) ** 2).max() < 1e-9
    assert half.degree == 4


def test_fit_algebraic_curve_line_and_noise():
    t = np.linspace(0.1, 0.9, 40)
    deg, coeffs = fit_algebraic_curve(np.column_stack([t, 1 - t]))[:2]
    assert deg == 1
    rng = np.random.default_rng(0)
    assert fit_algebraic_curve(rng.uniform(0, 1, (60, 2)))[0] is None
