"""The acceptance harness behind ``siegelhodge verify``.

Checks are split into an ``exact`` suite (identities in exact arithmetic,
where any failure is a bug) and a ``numeric`` suite (tolerance-tagged
experiments).  Each check reports a measured value, the expectation, the
tolerance and its runtime; a check that overruns its time budget fails.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

__all__ = ["CheckResult", "VerifyReport", "CHECKS", "run_verify"]


@dataclass
class CheckResult:
    id: str
    name: str
    suite: str
    status: str
    measured: object
    expected: object
    tolerance: object
    runtime: float
    budget: float
    detail: str = ""

    def line(self) -> str:
        return f"[{self.status.upper():4}] {self.id} {self.name}: measured={self.measured} expected={self.expected} " \
               f"tol={self.tolerance} ({self.runtime:.2f}s / {self.budget:.0f}s)"


@dataclass
class VerifyReport:
    results: list = field(default_factory=list)
    seed: int = 0

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_json(self) -> dict:
        return {"seed": self.seed, "ok": self.ok, "checks": [asdict(r) for r in self.results]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, default=str)


@dataclass(frozen=True)
class _Check:
    id: str
    name: str
    suite: str
    budget: float
    func: Callable


CHECKS: dict[str, _Check] = {}


def _register(cid, name, suite, budget):
    def deco(func):
        CHECKS[cid] = _Check(cid, name, suite, budget, func)
        return func
    return deco


# --------------------------------------------------------------------------
# exact suite


@_register("C1", "monodromy filtration axioms and uniqueness", "exact", 30)
def _c1(seed, scale):
    from .weightfilt import (brute_force_monodromy_filtrations, monodromy_filtration, random_nilpotent,
                             satisfies_monodromy_axioms)

    rng = random.Random(seed)
    bad, brute = 0, 0
    for _ in range(500):
        n = rng.randint(1, 6)
        m = random_nilpotent(rng, n)
        k = rng.randint(-2, 2)
        w = monodromy_filtration(m, k)
        if not satisfies_monodromy_axioms(m, w, k):
            bad += 1
        if n <= 4:
            brute += 1
            if brute_force_monodromy_filtrations(m, k) != [w]:
                bad += 1
    return bad == 0, {"failures": bad, "brute_forced": brute}, {"failures": 0}, 0


@_register("C2", "Deligne splitting identities and δ-splitting", "exact", 10)
def _c2(seed, scale):
    from .catalog import builtin_mhs, random_hodge_tate
    from .mhs import deligne_splitting, delta_splitting, is_r_split, splitting_identities_hold

    rng = random.Random(seed)
    cases = list(builtin_mhs().values()) + [random_hodge_tate(rng) for _ in range(100)]
    bad = 0
    for m in cases:
        if not splitting_identities_hold(deligne_splitting(m), m):
            bad += 1
        _, rs = delta_splitting(m)
        if not is_r_split(deligne_splitting(rs)):
            bad += 1
    return bad == 0, {"cases": len(cases), "failures": bad}, {"failures": 0}, 0


@_register("C3", "Legendre limit MHS polarized; negated form is not", "exact", 1)
def _c3(seed, scale):
    from .period.families import get_family
    from .mhs import polarized_mhs_check

    d = get_family("legendre").orbit
    m = d.limit_mhs()
    n = d.ns[0].matrix
    good = polarized_mhs_check(m, n, d.polarization, d.weight)
    flipped = polarized_mhs_check(m, n, -d.polarization, d.weight)
    return good and not flipped, {"Q": good, "-Q": flipped}, {"Q": True, "-Q": False}, 0


@_register("C6", "N_j in the nilradical n_P; n_P bracket-closed", "exact", 5)
def _c6(seed, scale):
    from itertools import permutations

    from .period.families import get_family
    from .period.parabolic import build_limit_parabolic, nilradical_is_subalgebra, nj_in_nilradical_check

    measured = {}
    for name in ("legendre", "product"):
        fam = get_family(name)
        for sigma in permutations(range(fam.factors)):
            p = build_limit_parabolic(fam.orbit, sigma, fam.lie_algebra)
            measured[f"{name}{list(sigma)}"] = {"dim_nP": p.n_p_basis.dim,
                                                "nj": nj_in_nilradical_check(fam.orbit, p),
                                                "closed": nilradical_is_subalgebra(p)}
    ok = all(v["nj"] and v["closed"] for v in measured.values())
    return ok, measured, "all true", 0


@_register("C7", "Siegel-set self-intersections in SL(2, Z)", "exact", 60)
def _c7(seed, scale):
    from .reduction.siegel import SiegelSet
    from .reduction.sl2z import siegel_intersection_enumerate

    gamma_p = {(1, 0, 0, 1), (-1, 0, 0, -1), (1, 1, 0, 1), (-1, -1, 0, -1), (1, -1, 0, 1), (-1, 1, 0, -1)}
    s_plus = {(0, -1, 1, 0), (0, 1, -1, 0)}
    s11 = SiegelSet.upper_half(0.5, 1.1)
    s10 = SiegelSet.upper_half(0.5, 1.0)
    r11 = siegel_intersection_enumerate(s11, s11, 20)
    r10 = siegel_intersection_enumerate(s10, s10, 20)
    ok = r11.gammas() == gamma_p and r11.complete and r10.complete and (gamma_p | s_plus) <= r10.gammas()
    return ok, {"t=1.1": len(r11.elements), "t=1": len(r10.elements), "complete": r11.complete and r10.complete}, \
        {"t=1.1": 6, "t=1": ">= 8, finite"}, 0


@_register("C8", "Hecke degrees p + 1", "exact", 5)
def _c8(seed, scale):
    from .reduction.hecke import hecke_correspondence

    got = {p: hecke_correspondence([[1, 0], [0, p]]).degree for p in (2, 3, 5)}
    return all(v == p + 1 for p, v in got.items()), got, {p: p + 1 for p in (2, 3, 5)}, 0


# --------------------------------------------------------------------------
# numeric suite


@_register("C4", "decay rate of d(Φ̃, θ) on the Legendre family", "numeric", 60)
def _c4(seed, scale):
    from .period.decay import schmid_decay_check

    fit = schmid_decay_check("legendre", 0.0, (2.0, 8.0), 60, seed)[0]
    rel = abs(fit.rate - 2 * np.pi) / (2 * np.pi)
    tol = 0.05 * scale
    ok = rel <= tol and fit.residual < 0.1 * scale and fit.monotone
    return ok, {"rate": fit.rate, "residual": fit.residual, "beta": fit.beta}, {"rate": 2 * np.pi}, \
        {"rate_rel": tol, "residual": 0.1 * scale}


@_register("C5", "Siegel-set containment of the period image", "numeric", 300)
def _c5(seed, scale):
    from .period.containment import siegel_containment_check

    leg = siegel_containment_check("legendre", 0.5, 2.0, 10_000, seed=seed)
    prod = siegel_containment_check("product", 0.5, 2.0, 10_000, seed=seed)
    ok = len(leg.witnesses) == 1 and not leg.uncovered and len(prod.witnesses) <= 2 and not prod.uncovered
    return ok, {"legendre_witnesses": len(leg.witnesses), "legendre_uncovered": len(leg.uncovered),
                "product_witnesses": len(prod.witnesses), "product_uncovered": len(prod.uncovered)}, \
        {"legendre_witnesses": 1, "product_witnesses": "<= 2", "uncovered": 0}, "10% fit margin"


@_register("C9", "τ(1/2) = i; series and AGM periods agree", "numeric", 5)
def _c9(seed, scale):
    from .period.legendre import hypergeometric_period, legendre_tau

    rng = np.random.default_rng(seed)
    err_tau = abs(legendre_tau(0.5) - 1j)
    r = 0.5 * np.sqrt(rng.uniform(0, 1, 100))
    lams = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    err = max(abs(hypergeometric_period(l, "series") - hypergeometric_period(l, "agm")) for l in lams)
    ok = err_tau <= 1e-10 * scale and err <= 1e-12 * scale
    return ok, {"tau_error": err_tau, "series_vs_agm": err}, {"tau": "i"}, \
        {"tau": 1e-10 * scale, "series_vs_agm": 1e-12 * scale}


@_register("C10", "Hodge-locus diagonal detected; generic points unflagged", "numeric", 300)
def _c10(seed, scale):
    from .period.hodgelocus import TOL, hodge_locus_demo, is_flagged, isogeny_relations

    res = hodge_locus_demo(200, 4, tol=TOL * scale)
    diag = res.component((1, 0, 0, 1))
    rng = np.random.default_rng(seed)
    rel = isogeny_relations(4)
    pts = rng.uniform(0.01, 0.99, (200, 2))
    flagged = sum(is_flagged(a, b, tol=TOL * scale, relations=rel) is not None for a, b in pts)
    frac = 1 - flagged / len(pts)
    ok = diag is not None and diag.degree == 1 and frac >= 0.95
    return ok, {"diagonal": diag is not None, "components": len(res.components), "unflagged_fraction": frac}, \
        {"diagonal": True, "unflagged_fraction": ">= 0.95"}, TOL * scale


@_register("C11", "Orr covering for the diagonal and Sym² embeddings", "numeric", 60)
def _c11(seed, scale):
    from .reduction.orr import orr_cover_check
    from .reduction.siegel import SiegelSet

    h = SiegelSet.upper_half(0.5, 1.0)
    diag = orr_cover_check("diagonal", h, 1000, c_set=[np.eye(4)], seed=seed)
    sym = orr_cover_check("sym2", h, 1000, seed=seed)
    ok = diag.covered_fraction == 1.0 and sym.covered_fraction == 1.0
    return ok, {"diagonal": diag.covered_fraction, "sym2": sym.covered_fraction, "sym2_C": len(sym.c_set)}, \
        {"diagonal": 1.0, "sym2": 1.0}, 0


ORDER = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11"]


def run_verify(suite: str = "all", seed: int = 0, tolerance_scale: float = 1.0,
               only: list | None = None, progress: Callable | None = None) -> VerifyReport:
    """Run the acceptance checks.

    Parameters
    ----------
    suite : {"all", "exact", "numeric"}
        Checks outside the chosen suite are reported as ``skip``.
    tolerance_scale : float
        Multiplies every numeric tolerance; exact checks ignore it.
    only : list of str, optional
        Check ids to run; the others are reported as ``skip``.
    """
    if suite not in ("all", "exact", "numeric"):
        raise ValueError(f"unknown suite {suite!r}")
    report = VerifyReport(seed=seed)
    for cid in ORDER:
        c = CHECKS[cid]
        if (suite != "all" and c.suite != suite) or (only and cid not in only):
            res = CheckResult(cid, c.name, c.suite, "skip", None, None, None, 0.0, c.budget)
        else:
            t0 = time.perf_counter()
            try:
                ok, measured, expected, tol = c.func(seed, tolerance_scale if c.suite == "numeric" else 1.0)
                detail = ""
            except Exception as exc:  # a crashing check is a failing check
                ok, measured, expected, tol, detail = False, None, None, None, f"{type(exc).__name__}: {exc}"
            dt = time.perf_counter() - t0
            if dt > c.budget:
                ok, detail = False, (detail + " " if detail else "") + "time budget exceeded"
            res = CheckResult(cid, c.name, c.suite, "pass" if ok else "fail", measured, expected, tol, dt,
                              c.budget, detail)
        report.results.append(res)
        if progress is not None:
            progress(res)
    return report
