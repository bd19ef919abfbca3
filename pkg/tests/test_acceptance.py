"""Acceptance criteria C1–C11 at their stated tolerances and runtime budgets.

Each test records a one-line verdict; the summary section of the pytest run
lists them as ``Ck: PASS|FAIL  detail``.  Where an independent route exists
the library result is re-derived inside the test (hand-written Gram–Schmidt,
complete elliptic integrals, coset counting in P^1(Z/p), direct subspace
containments).
"""

import math
import random
import time
from itertools import product

import mpmath as mp
import numpy as np
import pytest

from siegelhodge.catalog import builtin_mhs, random_hodge_tate
from siegelhodge.exactlin import ExactMatrix, Subspace
from siegelhodge.mhs import deligne_splitting, delta_splitting, polarized_mhs_check
from siegelhodge.period.containment import containment_grid, siegel_containment_check
from siegelhodge.period.decay import schmid_decay_check
from siegelhodge.period.families import get_family
from siegelhodge.period.hodgelocus import TOL, hodge_locus_demo, is_flagged, isogeny_relations
from siegelhodge.period.legendre import hypergeometric_period, legendre_tau
from siegelhodge.period.parabolic import build_limit_parabolic, nilradical_is_subalgebra, nj_in_nilradical_check
from siegelhodge.reduction import SiegelSet, hecke_correspondence, orr_cover_check, siegel_intersection_enumerate
from siegelhodge.reduction.orr import EMBEDDINGS, _lift, sample_siegel_points
from siegelhodge.weightfilt import brute_force_monodromy_filtrations, monodromy_filtration, random_nilpotent


class Clock:
    def __init__(self):
        self.t0 = time.perf_counter()

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0


# -- independent oracles ---------------------------------------------------------------------


def monodromy_axioms_direct(n: ExactMatrix, w, k: int) -> bool:
    """N W_l ⊂ W_{l-2}, and N^l maps Gr_{k+l} onto Gr_{k-l} with equal dimensions."""
    dim = n.rows
    for l in range(k - dim - 1, k + dim + 2):
        if not w[l].image(n) <= w[l - 2]:
            return False
    for l in range(0, dim + 1):
        up = w[k + l].dim - w[k + l - 1].dim
        down = w[k - l].dim - w[k - l - 1].dim
        if up != down:
            return False
        nl = n.power(l) if hasattr(n, "power") else _power(n, l)
        if not (w[k + l].image(nl) + w[k - l - 1]) == w[k - l]:
            return False
    return True


def _power(m, l):
    out = ExactMatrix.identity(m.rows)
    for _ in range(l):
        out = out @ m
    return out


def splitting_identities_direct(s, m) -> bool:
    n = m.dim
    pieces = s.items()
    total = Subspace.zero(n)
    for _, sp in pieces:
        total = total + sp
    if total.dim != n or sum(sp.dim for _, sp in pieces) != n:
        return False
    for p in m.F.weights():
        f = Subspace.zero(n)
        for (a, _), sp in pieces:
            if a >= p:
                f = f + sp
        if f != m.F[p]:
            return False
    for l in m.W.weights():
        w = Subspace.zero(n)
        for (a, b), sp in pieces:
            if a + b <= l:
                w = w + sp
        if w != m.W[l]:
            return False
    return True


def r_split_direct(s) -> bool:
    keys = {pq for pq, _ in s.items()}
    return all(s[(p, q)].conj() == s[(q, p)] for p, q in keys | {(q, p) for p, q in keys})


def tau_elliptic(lam, dps=60):
    """τ(λ) = i K(1-λ) / K(λ) with mpmath's complete elliptic integral (parameter m = k²)."""
    with mp.workdps(dps):
        lam = mp.mpf(lam) if not isinstance(lam, complex) else mp.mpc(lam)
        return 1j * mp.ellipk(1 - lam) / mp.ellipk(lam)


def gram_schmidt_from_bottom(g):
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
    return r


def gamma0_index(p):
    units = [u for u in range(1, p) if math.gcd(u, p) == 1]
    return len({frozenset((c * u % p, d * u % p) for u in units)
                for c, d in product(range(p), repeat=2) if math.gcd(math.gcd(c, d), p) == 1})


# -- criteria ----------------------------------------------------------------------------------


@pytest.mark.criterion("C1")
def test_c1_monodromy_filtration(criterion):
    clock = Clock()
    rng = random.Random(2024)
    bad = 0
    for _ in range(500):
        n = rng.randint(1, 6)
        mat = random_nilpotent(rng, n)
        k = rng.randint(-2, 2)
        if not monodromy_axioms_direct(mat, monodromy_filtration(mat, k), k):
            bad += 1
    unique_fail = 0
    cases = 0
    for n in range(1, 5):
        for _ in range(6):
            mat = random_nilpotent(rng, n)
            cases += 1
            if brute_force_monodromy_filtrations(mat, 0) != [monodromy_filtration(mat, 0)]:
                unique_fail += 1
    t = clock.elapsed
    criterion(f"500 random nilpotents, axiom failures={bad}; brute-force uniqueness failures={unique_fail}/{cases}; "
              f"{t:.2f}s (<30s)")
    assert bad == 0 and unique_fail == 0 and t < 30


@pytest.mark.criterion("C2")
def test_c2_deligne_splitting(criterion):
    clock = Clock()
    rng = random.Random(7)
    examples = list(builtin_mhs().values()) + [random_hodge_tate(rng) for _ in range(100)]
    ident_fail = split_fail = 0
    for m in examples:
        s = deligne_splitting(m)
        if not splitting_identities_direct(s, m):
            ident_fail += 1
        delta, rsplit = delta_splitting(m)
        if not (delta.is_real() and r_split_direct(deligne_splitting(rsplit))):
            split_fail += 1
    t = clock.elapsed
    criterion(f"{len(examples)} MHS, identity failures={ident_fail}, δ-split not R-split={split_fail}; "
              f"{t:.2f}s (<10s)")
    assert ident_fail == 0 and split_fail == 0 and t < 10


@pytest.mark.criterion("C3")
def test_c3_legendre_polarization(criterion):
    clock = Clock()
    fam = get_family("legendre")
    m, n, q = fam.orbit.limit_mhs(), fam.orbit.ns[0].matrix, fam.orbit.polarization
    ok = bool(polarized_mhs_check(m, n, q, 1))
    flipped = bool(polarized_mhs_check(m, n, -q, 1))
    # by hand: P^{1,1} = F^1 = span(e2) and i^0 Q(e2, N e2) must be positive
    e2 = m.F[1].basis[0]
    hand = q(e2, n.apply(e2))
    t = clock.elapsed
    criterion(f"polarized={ok}, with -Q={flipped}, Q(v, N v) on P^1,1 = {hand}; {t * 1e3:.0f}ms (<1s)")
    assert ok and not flipped and hand > 0 and t < 1


@pytest.mark.criterion("C4")
def test_c4_schmid_decay(criterion):
    clock = Clock()
    fit, = schmid_decay_check("legendre", 0.0, (2.0, 8.0), 60)
    t = clock.elapsed
    # oracle distance from complete elliptic integrals at a few heights
    worst = 0.0
    with mp.workdps(60):
        for idx in (0, 20, 59):
            y = fit.y[idx]
            lam = 16 * mp.exp(-2 * mp.pi * mp.mpf(y))
            tau = tau_elliptic(lam)
            theta = mp.mpc(0, 2 * y)
            d = 2 * mp.asinh(abs(tau - theta) / (2 * mp.sqrt(tau.imag * theta.imag)))
            worst = max(worst, float(abs(d / fit.distance[idx] - 1)))
    rel = abs(fit.rate - 2 * math.pi) / (2 * math.pi)
    criterion(f"rate={fit.rate:.5f} (2π={2 * math.pi:.5f}, rel err {rel:.1e} ≤ 5%), residual={fit.residual:.1e} "
              f"(<0.1), oracle distance rel err={worst:.1e}; {t:.2f}s (<60s)")
    assert rel <= 0.05 and fit.residual < 0.1 and worst < 1e-8 and t < 60


def _covered(witnesses, taus):
    return any(all(abs(tau.real) <= w.u_bounds[i][1] and tau.imag > w.t[i] for i, tau in enumerate(taus))
               for w in witnesses)


@pytest.mark.criterion("C5")
def test_c5_siegel_containment(criterion):
    clock = Clock()
    leg = siegel_containment_check("legendre", 0.5, 2.0, 10_000, 50.0)
    prod = siegel_containment_check("product", 0.5, 2.0, 10_000, 50.0)
    # re-test every grid point against the reported witnesses
    recheck = 0
    for name, res in (("legendre", leg), ("product", prod)):
        fam = get_family(name)
        pts = containment_grid(fam.factors, 0.5, 2.0, 50.0, 10_000)
        taus = np.asarray(fam.lift(pts)).reshape(len(pts), fam.factors)
        recheck += sum(not _covered(res.witnesses, row) for row in taus)
    t = clock.elapsed
    criterion(f"Legendre: {len(leg.witnesses)} witness over {leg.n_points} pts, uncovered={len(leg.uncovered)}; "
              f"product: {len(prod.witnesses)} witnesses over {prod.n_points} pts, uncovered={len(prod.uncovered)}; "
              f"independent recheck misses={recheck}; {t:.2f}s (<300s)")
    assert len(leg.witnesses) == 1 and not leg.uncovered and leg.n_points == 10_000
    assert len(prod.witnesses) <= 2 and not prod.uncovered and prod.n_points == 10_000
    assert recheck == 0 and t < 300


@pytest.mark.criterion("C6")
def test_c6_nj_in_nilradical(criterion):
    clock = Clock()
    results = []
    direct_ok = True
    for name, sigmas in (("legendre", [(0,)]), ("product", [(0, 1), (1, 0)])):
        fam = get_family(name)
        for sigma in sigmas:
            p = build_limit_parabolic(fam.orbit, sigma, fam.lie_algebra)
            results.append(nj_in_nilradical_check(fam.orbit, p) and nilradical_is_subalgebra(p))
            # direct: each N_σj with j <= r lowers W^(r) by two
            for r, w in enumerate(p.w_filts):
                for j in sigma[:r + 1]:
                    nm = fam.orbit.ns[j].matrix
                    direct_ok &= all(w[l].image(nm) <= w[l - 2] for l in range(-2, 5))
    t = clock.elapsed
    criterion(f"N_j ∈ n_P and [n_P, n_P] ⊂ n_P for {len(results)} (family, ordering) pairs: {all(results)}; "
              f"direct W containments: {direct_ok}; {t:.2f}s (<5s)")
    assert all(results) and direct_ok and t < 5


@pytest.mark.criterion("C7")
def test_c7_siegel_intersections(criterion):
    clock = Clock()
    s11 = SiegelSet.upper_half(0.5, 1.1)
    s10 = SiegelSet.upper_half(0.5, 1.0)
    got11 = siegel_intersection_enumerate(s11, s11, 20).gammas()
    rep10 = siegel_intersection_enumerate(s10, s10, 20)
    got10 = rep10.gammas()
    gamma_p = {(s, s * b, 0, s) for s in (1, -1) for b in (-1, 0, 1)}
    s_elems = {(0, -1, 1, 0), (0, 1, -1, 0)}
    t = clock.elapsed
    criterion(f"y>1.1: {len(got11)} elements, equals ±I,±T^±1: {got11 == gamma_p}; "
              f"y>1: {len(got10)} elements, contains ±S: {s_elems <= got10}, complete={rep10.complete}; "
              f"{t:.2f}s (<60s)")
    assert got11 == gamma_p and gamma_p | s_elems <= got10 and rep10.complete and t < 60


@pytest.mark.criterion("C8")
def test_c8_hecke_degrees(criterion):
    clock = Clock()
    degrees = {p: hecke_correspondence([[1, 0], [0, p]]).degree for p in (2, 3, 5)}
    oracle = {p: gamma0_index(p) for p in (2, 3, 5)}
    t = clock.elapsed
    criterion(f"degrees {degrees}, P^1(F_p) counts {oracle}; {t * 1e3:.0f}ms (<5s)")
    assert all(degrees[p] == p + 1 == oracle[p] for p in degrees) and t < 5


@pytest.mark.criterion("C9")
def test_c9_hypergeometric_period(criterion):
    clock = Clock()
    tau_half = legendre_tau(0.5)
    oracle_half = complex(tau_elliptic(mp.mpf(0.5)))
    rng = np.random.default_rng(99)
    r = 0.5 * np.sqrt(rng.uniform(0, 1, 100))
    lam = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    gap = max(abs(hypergeometric_period(v, "series") - hypergeometric_period(v, "agm")) for v in lam)
    t = clock.elapsed
    criterion(f"|τ(1/2) - i| = {abs(tau_half - 1j):.1e} (elliptic-K oracle {abs(oracle_half - 1j):.1e}), "
              f"max series/AGM gap = {gap:.1e} on 100 points; {t * 1e3:.0f}ms (<5s)")
    assert abs(tau_half - 1j) < 1e-10 and abs(oracle_half - 1j) < 1e-10 and gap < 1e-12 and t < 5


@pytest.mark.criterion("C10")
def test_c10_hodge_locus(criterion):
    clock = Clock()
    res = hodge_locus_demo(grid=200, bound=4)
    diag = res.component((1, 0, 0, 1))
    rng = np.random.default_rng(123)
    rels = isogeny_relations(4)
    pts = rng.uniform(0.01, 0.99, (1000, 2))
    flagged = sum(is_flagged(a, b, 4, TOL, rels) is not None for a, b in pts)
    # confirm a few diagonal points with elliptic integrals at 30 digits
    worst = 0.0
    if diag is not None:
        for a, b in diag.points[:: max(1, len(diag.points) // 10)]:
            worst = max(worst, abs(complex(tau_elliptic(float(a.real), 30)) - complex(tau_elliptic(float(b.real), 30))))
    t = clock.elapsed
    frac = 1 - flagged / len(pts)
    criterion(f"diagonal component: {diag is not None} ({0 if diag is None else len(diag.points)} pts, "
              f"degree {None if diag is None else diag.degree}); {len(res.components)} components; "
              f"generic not flagged {frac:.1%} (≥95%); {t:.2f}s (<300s)")
    assert diag is not None and diag.degree == 1 and worst < 1e-9 and frac >= 0.95 and t < 300


@pytest.mark.criterion("C11")
def test_c11_orr_cover(criterion):
    clock = Clock()
    h = SiegelSet.upper_half(0.5, 1.0)
    prod_set = SiegelSet(1.0, [(-0.5, 0.5)] * 2, blocks=(2, 2))
    diag = orr_cover_check("diagonal", h, samples=1000, c_set=[np.eye(4)], g_siegel=prod_set)
    sym = orr_cover_check("sym2", h, samples=1000)
    # fresh points, checked with a hand-written Gram–Schmidt
    rng = np.random.default_rng(77)
    zs = sample_siegel_points(h, 300, rng)
    rho = EMBEDDINGS["sym2"].rho
    w = sym.g_siegel
    misses = 0
    for z in zs:
        g = rho(_lift(z, rng.uniform(0, 2 * np.pi)))
        hit = False
        for c in sym.c_set:
            r = gram_schmidt_from_bottom(np.linalg.solve(np.asarray(c, float), g))
            a = np.diag(r)
            u = (r / a[None, :])[np.triu_indices(3, 1)]
            roots = a[:-1] / a[1:]
            if all(lo <= x <= hi for x, (lo, hi) in zip(u, w.u_bounds)) and np.all(roots > np.array(w.t)):
                hit = True
                break
        misses += not hit
    t = clock.elapsed
    criterion(f"diagonal, C={{I}}: fraction {diag.covered_fraction}; Sym²: fraction {sym.covered_fraction} "
              f"with |C|={len(sym.c_set)} on {sym.samples} samples; Gram–Schmidt recheck misses={misses}/300; "
              f"{t:.2f}s (<60s)")
    assert diag.covered_fraction == 1.0 and sym.covered_fraction == 1.0 and misses == 0 and t < 60
