"""The rational parabolic attached to a nilpotent orbit and an ordering of its variables.

For an ordering ``σ`` put ``W^(r) = W(N_σ1 + ... + N_σr)`` (centered at the
weight ``k``).  Going down from ``r = n`` the R-split structures are

    F̃_(n) = δ-split of (W^(n), F),
    F̃_(r) = δ-split of (W^(r), exp(i N_σ(r+1)) F̃_(r+1)),

and ``Ŷ_(r)`` is the grading element of ``(W^(r), F̃_(r))``.  The
nilradical ``n_P`` is the sum of the joint ``ad Ŷ_(r)`` eigenspaces of ``g``
whose weights are all ``<= 0`` and not all zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from ..exactlin import I, ExactMatrix, Filtration, Subspace, commutator, induced_filtration_on_end
from ..mhs import (
    MixedHodge,
    ad_weight_components,
    commuting_multigrading,
    deligne_splitting,
    delta_splitting,
    grading_element,
    yhat_increments,
)
from ..reduction.iwasawa import HorosphericalCoords, iwasawa_blocks, sl2_section
from ..weightfilt import ConeSpec, cone_constancy_check, monodromy_filtration
from .orbit import HodgeFrame, NilpotentOrbitData

__all__ = [
    "LimitParabolic",
    "build_limit_parabolic",
    "nj_in_nilradical_check",
    "nilradical_is_subalgebra",
    "TrackResult",
    "horospherical_factorization_track",
    "sp_algebra",
]


def sp_algebra(q: ExactMatrix) -> list[ExactMatrix]:
    """Basis of ``{X : Xᵀ Q + Q X = 0}``."""
    n = q.rows
    cols = []
    basis = []
    for i in range(n):
        for j in range(n):
            rows = [[0] * n for _ in range(n)]
            rows[i][j] = 1
            e = ExactMatrix(rows, n)
            basis.append(e)
            cols.append((e.T @ q + q @ e).vectorize())
    kernel = ExactMatrix.from_columns(cols, n * n).kernel()
    return [ExactMatrix.from_vector(v, n) for v in kernel.basis]


@dataclass
class LimitParabolic:
    """Data of the parabolic attached to ``(d, σ)``."""

    sigma: tuple
    w_filts: list
    f_tilde: list
    yhat: list
    n_p_basis: Subspace
    """Vectorised (row-major) basis of ``n_P`` inside ``End V``."""
    lie_algebra: list
    multigrading: object = None

    @property
    def dim(self) -> int:
        return self.w_filts[0].dim

    def n_p_matrices(self) -> list[ExactMatrix]:
        return [ExactMatrix.from_vector(v, self.dim) for v in self.n_p_basis.basis]

    def yhat_increments(self) -> list[ExactMatrix]:
        return yhat_increments(self.yhat)

    def base_filtration(self, d: NilpotentOrbitData) -> Filtration:
        """``exp(i N_σ1) F̃_(1)``, the base point of the horospherical coordinates."""
        g = (d.ns[self.sigma[0]].matrix * I).exp_nilpotent()
        f = self.f_tilde[0]
        return Filtration(f.dim, {p: f[p].image(g) for p in f.weights()}, "dec")


def build_limit_parabolic(d: NilpotentOrbitData, sigma: Sequence[int] | None = None,
                          lie_algebra: Sequence[ExactMatrix] | None = None) -> LimitParabolic:
    """Weight filtrations, split limits, gradings and ``n_P`` for the ordering ``σ``.

    Raises
    ------
    ValueError
        If some partial cone ``C_(r)`` does not have a constant weight filtration.
    """
    n = len(d.ns)
    sigma = tuple(range(n)) if sigma is None else tuple(sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError("sigma must be a permutation of the variables")
    k = d.weight
    w_filts = []
    for r in range(1, n + 1):
        gens = [d.ns[i] for i in sigma[:r]]
        check = cone_constancy_check(ConeSpec(gens), k, seed=r)
        if not check.constant:
            raise ValueError(f"weight filtration not constant on the cone C_({r})")
        w = monodromy_filtration(d.n_sum(sigma[:r]), k)
        if w != check.witness:
            raise ArithmeticError("cone witness disagrees with W(N_σ1 + ... + N_σr)")
        w_filts.append(w)
    f_tilde = [None] * n
    _, top = delta_splitting(MixedHodge(w_filts[-1], d.limit_f))
    f_tilde[-1] = top.F
    for r in range(n - 2, -1, -1):
        g = (d.ns[sigma[r + 1]].matrix * I).exp_nilpotent()
        f = f_tilde[r + 1]
        twisted = Filtration(f.dim, {p: f[p].image(g) for p in f.weights()}, "dec")
        _, split = delta_splitting(MixedHodge(w_filts[r], twisted))
        f_tilde[r] = split.F
    yhat = [grading_element(deligne_splitting(MixedHodge(w, f)), k) for w, f in zip(w_filts, f_tilde)]
    mg = commuting_multigrading(yhat, k)
    alg = list(lie_algebra) if lie_algebra is not None else sp_algebra(d.polarization.matrix)
    vecs = []
    for x in alg:
        for wt, comp in ad_weight_components(x, yhat).items():
            if all(v <= 0 for v in wt) and any(v < 0 for v in wt):
                vecs.append(comp.vectorize())
    n_p = Subspace(d.dim * d.dim, vecs)
    return LimitParabolic(sigma, w_filts, f_tilde, yhat, n_p, alg, mg)


def nilradical_is_subalgebra(p: LimitParabolic) -> bool:
    """``[n_P, n_P] ⊂ n_P`` exactly."""
    mats = p.n_p_matrices()
    for a in mats:
        for b in mats:
            if commutator(a, b).vectorize() not in p.n_p_basis:
                return False
    return True


def nj_in_nilradical_check(d: NilpotentOrbitData, p: LimitParabolic, ops: Sequence[ExactMatrix] | None = None) -> bool:
    """Each ``N_σj`` lies in ``W^(r)_{-2} End V`` for ``j <= r``, in ``W^(r)_0 End V`` for ``r < j``, and in ``n_P``.

    ``ops`` replaces the monodromy logarithms (in the original variable
    order), which is useful to test operators that should fail.
    """
    mats = [n.matrix for n in d.ns] if ops is None else list(ops)
    ends = [induced_filtration_on_end(w) for w in p.w_filts]
    for pos_j, j in enumerate(p.sigma):
        v = mats[j].vectorize()
        for pos_r, e in enumerate(ends):
            level = -2 if pos_j <= pos_r else 0
            if v not in e[level]:
                return False
        if v not in p.n_p_basis:
            return False
    return True


@dataclass
class TrackResult:
    coords: list
    s_values: list
    m_drift: float
    n_drift: float
    a_residual: float
    n_limit: np.ndarray = field(default=None)

    def ok(self, tol: float = 1e-3) -> bool:
        return self.m_drift <= tol and self.n_drift <= tol and self.a_residual <= tol


def _section(taus) -> np.ndarray:
    blocks = [sl2_section(t) for t in taus]
    n = 2 * len(blocks)
    out = np.zeros((n, n))
    for j, b in enumerate(blocks):
        out[2 * j:2 * j + 2, 2 * j:2 * j + 2] = b
    return out


def horospherical_factorization_track(d: NilpotentOrbitData, y_path: Sequence[Sequence[float]],
                                      parabolic: LimitParabolic | None = None, period=None) -> TrackResult:
    """Iwasawa coordinates of the element moving the base point to the orbit along a path.

    For each ``y`` the element is ``h = s(θ(iy)) s(b)^{-1}`` where ``s`` is the
    standard section ``τ -> n(x) a(sqrt y)`` of each factor and ``b`` is
    ``exp(i N_σ1) F̃_(1)``.  If ``period`` (a callable ``z -> taus``) is given,
    the lifted period map replaces the orbit.  With ``s_r = y_σr / y_σ(r+1)``
    and ``s_n = y_σn`` the reported drifts at the end of the path are
    ``|m - 1|``, the change of ``n`` over the last step, and
    ``|a exp(½ sum log s_r Ŷ_(r)) - 1|``.
    """
    p = parabolic if parabolic is not None else build_limit_parabolic(d)
    base = HodgeFrame(p.base_filtration(d)[1].matrix().to_numpy(), d.blocks).taus()
    sb_inv = np.linalg.inv(_section(base))
    yh = [y.to_numpy(float) for y in p.yhat]
    coords, svals, residuals = [], [], []
    from .orbit import nilpotent_orbit_eval

    for ys in y_path:
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        z = 1j * ys
        taus = period(z) if period is not None else nilpotent_orbit_eval(d, z).taus()
        h = _section(np.atleast_1d(taus)) @ sb_inv
        parts = iwasawa_blocks(h, d.blocks)
        nmat = _blockdiag([c.n_part for c in parts])
        amat = np.concatenate([c.a_part for c in parts])
        mmat = _blockdiag([c.m_part for c in parts])
        coords.append(HorosphericalCoords(nmat, amat, mmat, "P_sigma"))
        ordered = ys[list(p.sigma)]
        s = np.append(ordered[:-1] / ordered[1:], ordered[-1])
        svals.append(s)
        e = expm(0.5 * sum(np.log(sj) * y for sj, y in zip(s, yh)))
        residuals.append(np.abs(np.diag(amat) @ e - np.eye(len(amat))).max())
    last = coords[-1]
    m_drift = float(np.abs(last.m_part - np.eye(len(last.a_part))).max())
    n_drift = float(np.abs(coords[-1].n_part - coords[-2].n_part).max()) if len(coords) > 1 else 0.0
    return TrackResult(coords, svals, m_drift, n_drift, float(residuals[-1]), last.n_part)


def _blockdiag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    pos = 0
    for b in blocks:
        k = b.shape[0]
        out[pos:pos + k, pos:pos + k] = b
        pos += k
    return out
