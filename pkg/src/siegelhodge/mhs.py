"""Mixed Hodge structures over Q(i): splittings, gradings, polarizations, sl2-triples.

A mixed Hodge structure is stored as a rational increasing weight filtration
``W`` and a decreasing Hodge filtration ``F`` on ``V ⊗ Q(i)``.

Sign conventions
----------------
* Polarization: on the primitive part ``P^{p,q}`` of ``Gr^W_{k+l}`` the
  Hermitian form ``h(u, v) = i^{p-q} Q(u, N^l v̄)`` must be positive definite.
* δ-splitting: ``Ī^{p,q} = exp(-2iδ) I^{q,p}`` and the R-split structure is
  ``(W, exp(-iδ) F)``.  For the Hodge–Tate example with ``F^1 = span(e2 + c e1)``,
  ``c = a + bi``, this gives ``δ e2 = b e1``.
* Gradings: ``Y`` acts on ``I^{p,q}`` by ``p + q - center``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from gmpy2 import mpq

from .exactlin import (
    I,
    ExactMatrix,
    Filtration,
    Quotient,
    Subspace,
    commutator,
    conj,
    intersect,
    shifts_filtration,
)
from .weightfilt import NilpotentOperator, monodromy_filtration

__all__ = [
    "MixedHodge",
    "DeligneSplitting",
    "Sl2Triple",
    "Multigrading",
    "PolarizationForm",
    "is_mhs",
    "deligne_splitting",
    "splitting_identities_hold",
    "apply_to_filtration",
    "is_r_split",
    "delta_splitting",
    "grading_element",
    "polarized_mhs_check",
    "PolarizationReport",
    "jacobson_morozov_completion",
    "commuting_multigrading",
    "yhat_increments",
    "project_to_joint_kernel",
    "ad_weight_components",
    "integer_eigenspaces",
]


@dataclass(frozen=True)
class MixedHodge:
    """Pair ``(W, F)``; ``W`` must be rational and ``F`` decreasing."""

    W: Filtration
    F: Filtration

    def __post_init__(self):
        if self.W.direction != "inc" or self.F.direction != "dec":
            raise ValueError("W must be increasing and F decreasing")
        if self.W.dim != self.F.dim:
            raise ValueError("W and F live on different spaces")
        if not self.W.is_real():
            raise ValueError("the weight filtration must be defined over Q")

    @property
    def dim(self) -> int:
        return self.W.dim

    def to_json(self) -> dict:
        return {"W": self.W.to_json(), "F": self.F.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "MixedHodge":
        return cls(Filtration.from_json(data["W"]), Filtration.from_json(data["F"]))

    def twisted(self, g: ExactMatrix) -> "MixedHodge":
        """``(W, g F)``."""
        return MixedHodge(self.W, apply_to_filtration(g, self.F))


def apply_to_filtration(g: ExactMatrix, f: Filtration) -> Filtration:
    return Filtration(f.dim, {p: f[p].image(g) for p in f.weights()}, f.direction)


@dataclass(frozen=True)
class DeligneSplitting:
    """Bigrading ``(p, q) -> I^{p,q}``; zero summands are omitted."""

    pieces: Mapping[tuple[int, int], Subspace]
    dim: int

    def __getitem__(self, pq) -> Subspace:
        return self.pieces.get(tuple(pq), Subspace.zero(self.dim))

    def items(self):
        return sorted(self.pieces.items())

    def basis_matrix(self) -> tuple[ExactMatrix, list[tuple[int, int]]]:
        """Columns: concatenated bases of the pieces; labels: their ``(p, q)``."""
        cols, labels = [], []
        for pq, s in self.items():
            for v in s.basis:
                cols.append(v)
                labels.append(pq)
        return ExactMatrix.from_columns(cols, self.dim), labels

    def operator(self, eig) -> ExactMatrix:
        """Semisimple operator acting on ``I^{p,q}`` by ``eig(p, q)``."""
        b, labels = self.basis_matrix()
        d = ExactMatrix.diag([eig(*pq) for pq in labels])
        return b @ d @ b.inverse()

    def hodge_numbers(self) -> dict[tuple[int, int], int]:
        return {pq: s.dim for pq, s in self.items()}

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "pieces": [{"p": p, "q": q, "basis": s.to_json()} for (p, q), s in self.items()]}


# --------------------------------------------------------------------------
# Validators and the splitting


def is_mhs(m: MixedHodge) -> bool:
    """True iff ``F`` induces a pure Hodge structure of weight ``l`` on every ``Gr^W_l``."""
    W, F = m.W, m.F
    Fbar = F.conj()
    for l in W.jumps():
        q = Quotient(W[l - 1], W[l])
        for p in range(F.lo, F.hi + 2):
            a = q.image(F[p])
            b = q.image(Fbar[l - p + 1])
            if a.dim + b.dim != q.dim or not intersect(a, b).is_zero():
                return False
    return True


def deligne_splitting(m: MixedHodge, check: bool = True) -> DeligneSplitting:
    """Deligne's bigrading of a mixed Hodge structure.

    ``I^{p,q} = F^p ∩ W_{p+q} ∩ (F̄^q ∩ W_{p+q} + sum_{j>=1} F̄^{q-j} ∩ W_{p+q-j-1})``

    Raises
    ------
    ValueError
        If ``m`` is not a mixed Hodge structure.
    """
    if check and not is_mhs(m):
        raise ValueError("not a mixed Hodge structure")
    W, F = m.W, m.F
    Fbar = F.conj()
    n = m.dim
    pieces = {}
    for l in W.jumps():
        for p in range(F.lo, F.hi + 1):
            q = l - p
            inner = intersect(Fbar[q], W[l])
            for j in range(1, l - W.lo + 2):
                inner = inner + intersect(Fbar[q - j], W[l - j - 1])
            piece = intersect(intersect(F[p], W[l]), inner)
            if not piece.is_zero():
                pieces[(p, q)] = piece
    s = DeligneSplitting(pieces, n)
    if check and not _splitting_identities(s, m):
        raise ArithmeticError("Deligne splitting failed its identities")
    return s


def _splitting_identities(s: DeligneSplitting, m: MixedHodge) -> bool:
    total = Subspace.zero(s.dim)
    dims = 0
    for _, piece in s.items():
        total = total + piece
        dims += piece.dim
    if dims != s.dim or not total.is_full():
        return False
    for p in range(m.F.lo, m.F.hi + 2):
        acc = Subspace.zero(s.dim)
        for (a, _), piece in s.items():
            if a >= p:
                acc = acc + piece
        if acc != m.F[p]:
            return False
    for l in range(m.W.lo - 1, m.W.hi + 1):
        acc = Subspace.zero(s.dim)
        for (a, b), piece in s.items():
            if a + b <= l:
                acc = acc + piece
        if acc != m.W[l]:
            return False
    return True


def splitting_identities_hold(s: DeligneSplitting, m: MixedHodge) -> bool:
    """Direct sum equals ``V`` and both filtrations are recovered from the pieces."""
    return _splitting_identities(s, m)


def is_r_split(s: DeligneSplitting) -> bool:
    """``conj(I^{p,q}) == I^{q,p}`` for every ``(p, q)``."""
    keys = set(s.pieces) | {(q, p) for p, q in s.pieces}
    return all(s[(p, q)].conj() == s[(q, p)] for p, q in keys)


def delta_splitting(m: MixedHodge) -> tuple[ExactMatrix, MixedHodge]:
    """Deligne's δ: real, of type ``(-1,-1)``, with ``(W, exp(-iδ) F)`` R-split.

    With ``Y`` the grading by ``p + q`` and ``P_l`` its eigenprojectors, the
    element ``g = sum_l P_l(Ȳ) P_l(Y)`` equals ``exp(-2iδ)``.
    """
    s = deligne_splitting(m)
    y = s.operator(lambda p, q: p + q)
    ybar = y.conj()
    b, labels = s.basis_matrix()
    binv = b.inverse()
    bbar, binvbar = b.conj(), binv.conj()
    g = ExactMatrix.zeros(m.dim)
    for l in sorted({p + q for p, q in labels}):
        e = ExactMatrix.diag([mpq(int(p + q == l)) for p, q in labels])
        g = g + (bbar @ e @ binvbar) @ (b @ e @ binv)
    delta = g.log_unipotent() * (I * mpq(1, 2))
    if not delta.is_real():
        raise ArithmeticError("δ came out non-real")
    if not _lowers_both(delta, s):
        raise ArithmeticError("δ does not lower both Hodge indices")
    rsplit = m.twisted((delta * (-I)).exp_nilpotent())
    if not is_r_split(deligne_splitting(rsplit)):
        raise ArithmeticError("δ-splitting did not produce an R-split structure")
    return delta, rsplit


def _lowers_both(x: ExactMatrix, s: DeligneSplitting) -> bool:
    for (p, q), piece in s.items():
        target = Subspace.zero(s.dim)
        for (r, t), other in s.items():
            if r < p and t < q:
                target = target + other
        if not piece.image(x) <= target:
            return False
    return True


def grading_element(s: DeligneSplitting, center: int) -> ExactMatrix:
    """Semisimple ``Y`` acting on ``I^{p,q}`` by ``p + q - center``.

    Raises
    ------
    ValueError
        If the splitting is not R-split.
    """
    if not is_r_split(s):
        raise ValueError("grading element needs an R-split structure")
    return s.operator(lambda p, q: p + q - center)


# --------------------------------------------------------------------------
# Polarization


@dataclass(frozen=True)
class PolarizationForm:
    """Nondegenerate bilinear form ``Q(x, y) = xᵀ Q y`` with ``Qᵀ = sign · Q``."""

    matrix: ExactMatrix
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be ±1")
        if not self.matrix.is_square():
            raise ValueError("form matrix must be square")
        if self.matrix.T != self.matrix * self.sign:
            raise ValueError("form does not have the declared symmetry")
        if self.matrix.det() == 0:
            raise ValueError("Q is degenerate")

    @classmethod
    def for_weight(cls, matrix: ExactMatrix, k: int) -> "PolarizationForm":
        return cls(matrix, (-1) ** k)

    def __call__(self, x: Sequence, y: Sequence):
        return sum((a * b for a, b in zip(x, self.matrix.apply(y))), mpq(0))

    def __neg__(self) -> "PolarizationForm":
        return PolarizationForm(-self.matrix, self.sign)


@dataclass
class PolarizationReport:
    ok: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _ipow(k: int):
    return (mpq(1), I, mpq(-1), -I)[k % 4]


def _positive_definite_hermitian(h: list[list]) -> bool:
    n = len(h)
    for i in range(n):
        for j in range(n):
            if h[i][j] != conj(h[j][i]):
                return False
    for k in range(1, n + 1):
        d = ExactMatrix([row[:k] for row in h[:k]], k).det()
        if isinstance(d, type(I)) or d <= 0:
            return False
    return True


def polarized_mhs_check(m: MixedHodge, n, q: PolarizationForm, center: int,
                        report: bool = False):
    """Is ``(W, F)`` polarized by ``N`` and ``Q`` with weight ``center``?

    Checks, all exactly: ``W`` is the monodromy filtration of ``N`` centered at
    ``center``; ``N`` is real and an infinitesimal isometry of ``Q``;
    ``N F^p ⊂ F^{p-1}``; ``Q(F^p, F^{center-p+1}) = 0``; and for each
    ``l >= 0`` the form ``i^{p-q} Q(·, N^l ·̄)`` is positive definite on every
    primitive ``P^{p,q}`` of ``Gr^W_{center+l}``.

    Returns a bool, or a :class:`PolarizationReport` listing the failed
    conditions when ``report`` is set.

    Raises
    ------
    ValueError
        If ``Q`` is degenerate (raised when the form is built).
    """
    nop = n if isinstance(n, NilpotentOperator) else NilpotentOperator(n)
    N = nop.matrix
    W, F = m.W, m.F
    fails = []
    if not N.is_real():
        fails.append("N is not real")
    if not shifts_filtration(N, W, -2):
        fails.append("N W_l not in W_{l-2}")
    if W != monodromy_filtration(nop, center):
        fails.append("W is not the monodromy filtration of N")
    if (N.T @ q.matrix + q.matrix @ N) != ExactMatrix.zeros(m.dim):
        fails.append("N is not an infinitesimal isometry of Q")
    for p in range(F.lo, F.hi + 2):
        if not F[p].image(N) <= F[p - 1]:
            fails.append(f"N F^{p} not in F^{p - 1}")
            break
    for p in range(F.lo - 1, F.hi + 2):
        a, b = F[p], F[center - p + 1]
        if any(q(u, v) for u in a.basis for v in b.basis):
            fails.append(f"Q(F^{p}, F^{center - p + 1}) != 0")
            break
    if not fails:
        if not is_mhs(m):
            fails.append("not a mixed Hodge structure")
        else:
            fails.extend(_primitive_positivity(m, nop, q, center))
    if report:
        return PolarizationReport(not fails, fails)
    return not fails


def _primitive_positivity(m, nop: NilpotentOperator, q: PolarizationForm, center: int) -> list[str]:
    s = deligne_splitting(m)
    N = nop.matrix
    fails = []
    for (p, qq), piece in s.items():
        if not piece.image(N) <= s[(p - 1, qq - 1)]:
            return [f"N does not map I^{p},{qq} into I^{p - 1},{qq - 1}"]
    for (p, qq), piece in s.items():
        l = p + qq - center
        if l < 0:
            continue
        prim = intersect(piece, nop.ker(l + 1))
        if prim.is_zero():
            continue
        nl = nop.power(l)
        c = _ipow(p - qq)
        vecs = prim.basis
        h = [[c * q(u, nl.apply([conj(x) for x in v])) for v in vecs] for u in vecs]
        if not _positive_definite_hermitian(h):
            fails.append(f"positivity fails on P^{p},{qq}")
    return fails


# --------------------------------------------------------------------------
# sl2-triples


@dataclass(frozen=True)
class Sl2Triple:
    lower: ExactMatrix
    grading: ExactMatrix
    upper: ExactMatrix

    def __post_init__(self):
        if not self.is_valid():
            raise ValueError("bracket relations fail")

    def is_valid(self) -> bool:
        y, nm, np_ = self.grading, self.lower, self.upper
        return (commutator(y, nm) == nm * -2 and commutator(y, np_) == np_ * 2
                and commutator(np_, nm) == y)


def _end_basis(n: int):
    for i, j in product(range(n), range(n)):
        rows = [[mpq(0)] * n for _ in range(n)]
        rows[i][j] = mpq(1)
        yield ExactMatrix(rows, n)


def jacobson_morozov_completion(lower: ExactMatrix, grading: ExactMatrix) -> Sl2Triple:
    """Unique ``N^+`` with ``[N^+, N^-] = Y`` and ``[Y, N^+] = 2 N^+``.

    Raises
    ------
    ValueError
        If ``[Y, N^-] != -2 N^-``, ``N^-`` is not nilpotent, or the linear
        system has no (or no unique) solution.
    """
    n = lower.rows
    if lower.nilpotency_index() is None:
        raise ValueError("lower element is not nilpotent")
    if commutator(grading, lower) != lower * -2:
        raise ValueError("[Y, N^-] != -2 N^-")
    cols = []
    for e in _end_basis(n):
        cols.append(commutator(e, lower).vectorize() + (commutator(grading, e) - e * 2).vectorize())
    a = ExactMatrix.from_columns(cols, 2 * n * n)
    if a.rank() != n * n:
        raise ValueError("completion is not unique")
    rhs = grading.vectorize() + (mpq(0),) * (n * n)
    sol = a.solve(rhs)
    if sol is None:
        raise ValueError("no sl2 completion exists")
    return Sl2Triple(lower, grading, ExactMatrix.from_vector(sol, n))


# --------------------------------------------------------------------------
# Multigradings


def integer_eigenspaces(y: ExactMatrix) -> dict[int, Subspace]:
    """Eigenspaces of a semisimple operator with integer spectrum.

    Raises
    ------
    ValueError
        If ``y`` is not semisimple or has a non-integer eigenvalue.
    """
    n = y.rows
    bound = 0
    for r in y.tolist():
        tot = 0
        for x in r:
            tot += abs(complex(x)) if isinstance(x, type(I)) else abs(float(x))
        bound = max(bound, tot)
    out = {}
    total = 0
    ident = ExactMatrix.identity(n)
    for lam in range(-int(bound) - 1, int(bound) + 2):
        k = (y - ident * lam).kernel()
        if k.dim:
            out[lam] = k
            total += k.dim
    if total != n:
        raise ValueError("operator is not semisimple with integer eigenvalues")
    return out


@dataclass(frozen=True)
class Multigrading:
    """Joint eigenspace decomposition ``(l_1, ..., l_n) -> V_{l_1..l_n}``."""

    summands: Mapping[tuple, Subspace]
    dim: int

    def indices(self) -> list[tuple]:
        return sorted(self.summands)

    def projector(self, idx: tuple) -> ExactMatrix:
        cols, labels = [], []
        for key in self.indices():
            for v in self.summands[key].basis:
                cols.append(v)
                labels.append(key)
        b = ExactMatrix.from_columns(cols, self.dim)
        e = ExactMatrix.diag([mpq(int(k == tuple(idx))) for k in labels])
        return b @ e @ b.inverse()


def _check_commuting(gradings: Sequence[ExactMatrix]):
    for a, b in product(gradings, gradings):
        if not commutator(a, b).is_zero():
            raise ValueError("gradings do not commute")


def commuting_multigrading(gradings: Sequence[ExactMatrix], center: int | Sequence[int] = 0) -> Multigrading:
    """Joint eigenspaces, indexed by ``l_r = eigenvalue(Y_r) + center_r``.

    Raises
    ------
    ValueError
        For non-commuting inputs or a non-integer / non-semisimple spectrum.
    """
    if not gradings:
        raise ValueError("need at least one grading")
    _check_commuting(gradings)
    centers = [center] * len(gradings) if isinstance(center, int) else list(center)
    n = gradings[0].rows
    spaces = [integer_eigenspaces(y) for y in gradings]
    summands = {(): Subspace.full(n)}
    for sp, c in zip(spaces, centers):
        nxt = {}
        for key, s in summands.items():
            for lam, e in sp.items():
                t = intersect(s, e)
                if not t.is_zero():
                    nxt[key + (lam + c,)] = t
        summands = nxt
    if sum(s.dim for s in summands.values()) != n:
        raise ArithmeticError("joint eigenspaces do not span")
    return Multigrading(summands, n)


def yhat_increments(cumulative: Sequence[ExactMatrix]) -> list[ExactMatrix]:
    """``Ŷ_j = Ŷ_(j) - Ŷ_(j-1)`` with ``Ŷ_(0) = 0``."""
    out = []
    prev = None
    for y in cumulative:
        out.append(y if prev is None else y - prev)
        prev = y
    return out


def ad_weight_components(op: ExactMatrix, gradings: Sequence[ExactMatrix]) -> dict[tuple, ExactMatrix]:
    """Decompose ``op`` under the commuting ``ad Y_r``; keys are weight tuples."""
    mg = commuting_multigrading(gradings, 0)
    proj = {k: mg.projector(k) for k in mg.indices()}
    out: dict[tuple, ExactMatrix] = {}
    for a, b in product(mg.indices(), mg.indices()):
        piece = proj[a] @ op @ proj[b]
        if piece.is_zero():
            continue
        w = tuple(x - y for x, y in zip(a, b))
        out[w] = out[w] + piece if w in out else piece
    return out


def project_to_joint_kernel(op: ExactMatrix, gradings: Sequence[ExactMatrix]) -> ExactMatrix:
    """Component of ``op`` in ``∩_r ker(ad Y_r)``."""
    comps = ad_weight_components(op, gradings)
    zero_key = tuple(0 for _ in gradings)
    return comps.get(zero_key, ExactMatrix.zeros(op.rows))
