"""Monodromy and relative weight filtrations of nilpotent operators.

Conventions
-----------
"Centered at k" means the jumps of ``W(N)`` are symmetric about ``k``: the
filtration satisfies ``N W_l ⊂ W_{l-2}`` and ``N^l : Gr_{k+l} -> Gr_{k-l}`` is
an isomorphism.  No further shift is applied anywhere in this package.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .exactlin import ExactMatrix, Filtration, Quotient, Subspace, intersect

__all__ = [
    "NilpotentOperator",
    "ConeSpec",
    "NotExists",
    "ConeCheck",
    "monodromy_filtration",
    "satisfies_monodromy_axioms",
    "lattice_closure",
    "brute_force_monodromy_filtrations",
    "relative_weight_filtration",
    "satisfies_relative_axioms",
    "cone_constancy_check",
    "random_nilpotent",
    "random_partition",
    "jordan_block",
]


class NilpotentOperator:
    """A nilpotent endomorphism with cached powers, kernels and images.

    Parameters
    ----------
    matrix : ExactMatrix
        Square matrix.  ``ValueError`` is raised if no power vanishes.
    """

    def __init__(self, matrix: ExactMatrix):
        if not isinstance(matrix, ExactMatrix):
            matrix = ExactMatrix(matrix)
        if not matrix.is_square():
            raise ValueError("nilpotent operator must be square")
        idx = matrix.nilpotency_index()
        if idx is None:
            raise ValueError("matrix is not nilpotent")
        self.matrix = matrix
        self.dim = matrix.rows
        self.index = idx
        p = ExactMatrix.identity(self.dim)
        self._powers = [p]
        for _ in range(idx):
            p = p @ matrix
            self._powers.append(p)
        self._ker: dict[int, Subspace] = {}
        self._im: dict[int, Subspace] = {}

    def power(self, i: int) -> ExactMatrix:
        if i >= self.index:
            return ExactMatrix.zeros(self.dim)
        return self._powers[i]

    def ker(self, i: int) -> Subspace:
        """``ker N^i`` (the whole space once ``i >= index``)."""
        if i >= self.index:
            return Subspace.full(self.dim)
        if i not in self._ker:
            self._ker[i] = self._powers[i].kernel()
        return self._ker[i]

    def im(self, i: int) -> Subspace:
        if i >= self.index:
            return Subspace.zero(self.dim)
        if i not in self._im:
            self._im[i] = self._powers[i].image()
        return self._im[i]

    def scaled(self, c) -> "NilpotentOperator":
        return NilpotentOperator(self.matrix * c)

    def __add__(self, other: "NilpotentOperator") -> "NilpotentOperator":
        return NilpotentOperator(self.matrix + other.matrix)

    def __eq__(self, other):
        return isinstance(other, NilpotentOperator) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"NilpotentOperator(index={self.index}, {self.matrix!r})"


def _as_op(n) -> NilpotentOperator:
    return n if isinstance(n, NilpotentOperator) else NilpotentOperator(n)


@dataclass(frozen=True)
class NotExists:
    """Returned when a relative weight filtration does not exist."""

    reason: str = ""

    def __bool__(self):
        return False


# --------------------------------------------------------------------------
# Monodromy filtration


def monodromy_filtration(n, center: int = 0) -> Filtration:
    """Monodromy weight filtration ``W(N)`` centered at ``center``.

    Uses ``W_{k+l} = sum_{i >= max(0,-l)} ker N^{l+i+1} ∩ im N^i`` and checks
    both defining properties before returning.

    Examples
    --------
    >>> from siegelhodge.exactlin import ExactMatrix
    >>> W = monodromy_filtration(ExactMatrix([[0, 1], [0, 0]]), 0)
    >>> [W[l].dim for l in (-2, -1, 0, 1)]
    [0, 1, 1, 2]
    """
    n = _as_op(n)
    m = n.index
    steps = {}
    for l in range(-m, m):
        s = Subspace.zero(n.dim)
        for i in range(max(0, -l), m):
            s = s + intersect(n.ker(l + i + 1), n.im(i))
        steps[center + l] = s
    w = Filtration(n.dim, steps, "inc")
    if not satisfies_monodromy_axioms(n, w, center):
        raise ArithmeticError("monodromy filtration failed its own axioms")
    return w


def _shifts_by_two(n: NilpotentOperator, w: Filtration) -> bool:
    return all(w[l].image(n.matrix) <= w[l - 2] for l in range(w.lo, w.hi + 1))


def satisfies_monodromy_axioms(n, w: Filtration, center: int) -> bool:
    """Exact check of ``N W_l ⊂ W_{l-2}`` and ``N^l: Gr_{k+l} ≅ Gr_{k-l}``."""
    n = _as_op(n)
    if w.direction != "inc" or w.dim != n.dim:
        return False
    if not _shifts_by_two(n, w):
        return False
    span = max(center - w.lo, w.hi - center, 0) + 1
    for l in range(0, span + 1):
        hi_dim = w.gr_dim(center + l)
        lo_dim = w.gr_dim(center - l)
        if hi_dim != lo_dim:
            return False
        if l == 0 or hi_dim == 0:
            continue
        # surjectivity onto Gr_{k-l}; equal dimensions then give bijectivity
        img = w[center + l].image(n.power(l)) + w[center - l - 1]
        if img.dim != w[center - l].dim:
            return False
    return True


# --------------------------------------------------------------------------
# Brute-force oracle


def lattice_closure(generators: Sequence[Subspace], limit: int = 5000) -> list[Subspace]:
    """All subspaces reachable from ``generators`` by sums and intersections."""
    if not generators:
        return []
    n = generators[0].ambient
    seen = {Subspace.zero(n), Subspace.full(n), *generators}
    frontier = list(seen)
    while frontier:
        new = []
        items = list(seen)
        for a in frontier:
            for b in items:
                for c in (a + b, intersect(a, b)):
                    if c not in seen:
                        seen.add(c)
                        new.append(c)
                        if len(seen) > limit:
                            raise RuntimeError("subspace lattice too large for brute force")
        frontier = new
    return sorted(seen, key=lambda s: (s.dim, s.basis))


def brute_force_monodromy_filtrations(n, center: int = 0) -> list[Filtration]:
    """Every filtration from the ``ker N^i`` / ``im N^j`` lattice meeting the axioms.

    Independent of :func:`monodromy_filtration`: it searches increasing chains
    ``W_{k-m+1} ⊂ ... ⊂ W_{k+m-1} = V`` (``m`` the nilpotency index) drawn from
    the lattice, pruning with ``N W_l ⊂ W_{l-2}`` and the graded dimension
    symmetry, and keeps those that pass the full axiom check.
    """
    n = _as_op(n)
    m = n.index
    gens = [n.ker(i) for i in range(1, m)] + [n.im(i) for i in range(1, m)]
    lat = lattice_closure(gens) if gens else [Subspace.zero(n.dim), Subspace.full(n.dim)]
    image_of = {s: s.image(n.matrix) for s in lat}
    lo, hi = center - m + 1, center + m - 1
    full = Subspace.full(n.dim)
    zero = Subspace.zero(n.dim)
    results = []

    def dfs(l: int, chain: dict[int, Subspace]):
        if l > hi:
            w = Filtration(n.dim, {**chain, hi: full} if chain else {hi: full}, "inc")
            if satisfies_monodromy_axioms(n, w, center):
                results.append(w)
            return
        prev = chain.get(l - 1, zero)
        prev2 = chain.get(l - 2, zero)
        cands = [full] if l == hi else lat
        for s in cands:
            if not prev <= s:
                continue
            if not image_of.get(s, s.image(n.matrix)) <= prev2:
                continue
            # the graded piece at 2k-l (< l) is already fixed
            mirror = 2 * center - l
            if mirror < l:
                g = s.dim - prev.dim
                g_m = chain.get(mirror, zero).dim - chain.get(mirror - 1, zero).dim
                if g != g_m:
                    continue
            chain[l] = s
            dfs(l + 1, chain)
            del chain[l]

    dfs(lo, {})
    unique = []
    for w in results:
        if w not in unique:
            unique.append(w)
    return unique


# --------------------------------------------------------------------------
# Relative weight filtration


def _preserves(n: NilpotentOperator, w: Filtration) -> bool:
    return all(w[l].image(n.matrix) <= w[l] for l in range(w.lo, w.hi + 1))


def relative_weight_filtration(n, w: Filtration):
    """Weight filtration ``M`` of ``N`` relative to ``w``, or :class:`NotExists`.

    ``M`` satisfies ``N M_l ⊂ M_{l-2}`` and induces on every ``Gr^w_b`` the
    monodromy filtration of the induced operator centered at ``b``.

    The construction runs upward through the jumps of ``w``.  Having ``M'`` on
    ``W_{b-1}``, each primitive class of weight ``b+j`` in ``Gr^w_b`` is lifted
    to ``v`` with ``N^{j+1} v ∈ M'_{b-j-2}``; if no such lift exists the
    relative filtration does not exist.

    Raises
    ------
    ValueError
        If ``N`` does not preserve ``w``.
    """
    n = _as_op(n)
    if w.direction != "inc" or w.dim != n.dim:
        raise ValueError("need an increasing filtration on the same space")
    if not _preserves(n, w):
        raise ValueError("N does not preserve the filtration")
    jumps = w.jumps()
    dim = n.dim
    zero = Subspace.zero(dim)
    # M as dict weight -> subspace of V, valid on the part built so far
    mfilt: dict[int, Subspace] = {}

    def m_at(l):
        below = [k for k in mfilt if k <= l]
        return mfilt[max(below)] if below else zero

    for b in jumps:
        sub = w[b - 1]
        q = Quotient(sub, w[b])
        nbar = NilpotentOperator(q.induced_map(n.matrix))
        mu = monodromy_filtration(nbar, b)
        new_vecs: list[tuple[int, tuple]] = []
        for j in range(nbar.index - 1, -1, -1):
            prim = intersect(nbar.ker(j + 1), mu[b + j])
            chosen = mu[b + j - 1]
            for pbar in prim.basis:
                if pbar in chosen:
                    continue
                chosen = chosen + Subspace(q.dim, [pbar])
                v0 = q.lift(pbar)
                v = _lift_primitive(n, v0, j, sub, m_at(b - j - 2))
                if v is None:
                    return NotExists(f"no admissible lift at weight {b + j} over Gr_{b}")
                vec = v
                for i in range(j + 1):
                    new_vecs.append((b + j - 2 * i, vec))
                    vec = n.matrix.apply(vec)
        if not new_vecs:
            continue
        weights = sorted(set(mfilt) | {wt for wt, _ in new_vecs})
        updated = {}
        for l in range(min(weights), max(weights) + 1):
            updated[l] = m_at(l) + Subspace(dim, [v for wt, v in new_vecs if wt <= l])
        mfilt = updated
    if not mfilt:
        return Filtration.trivial(dim, 0)
    top = max(mfilt)
    mfilt[top + 1] = Subspace.full(dim)
    out = Filtration(dim, mfilt, "inc")
    if not satisfies_relative_axioms(n, w, out):
        return NotExists("candidate failed the relative axioms")
    return out


def _lift_primitive(n: NilpotentOperator, v0, j, sub: Subspace, target: Subspace):
    """``v0 + u`` with ``u ∈ sub`` and ``N^{j+1}(v0 + u) ∈ target``, or ``None``."""
    p = n.power(j + 1)
    rhs = tuple(-x for x in p.apply(v0))
    cols = [p.apply(u) for u in sub.basis] + [tuple(-x for x in t) for t in target.basis]
    if not cols:
        return v0 if not any(rhs) else None
    a = ExactMatrix.from_columns(cols, n.dim)
    sol = a.solve(rhs)
    if sol is None:
        return None
    v = list(v0)
    for c, u in zip(sol[: sub.dim], sub.basis):
        if c:
            v = [x + c * y for x, y in zip(v, u)]
    return tuple(v)


def satisfies_relative_axioms(n, w: Filtration, m: Filtration) -> bool:
    """Check ``N M_l ⊂ M_{l-2}`` and the induced graded monodromy filtrations."""
    n = _as_op(n)
    if not _shifts_by_two(n, m):
        return False
    for b in w.jumps():
        q = Quotient(w[b - 1], w[b])
        nbar = NilpotentOperator(q.induced_map(n.matrix))
        induced = q.induced_filtration(m)
        if not satisfies_monodromy_axioms(nbar, induced, b):
            return False
    return True


# --------------------------------------------------------------------------
# Cone constancy


@dataclass
class ConeSpec:
    """Nilpotent cone given by generators and sample coefficient tuples.

    Parameters
    ----------
    generators : list of NilpotentOperator
    samples : list of tuples of positive rationals, optional
        Points of the open cone at which to compare filtrations.  When empty
        the check draws random tuples.
    """

    generators: list
    samples: list = field(default_factory=list)

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a cone needs at least one generator")
        self.generators = [_as_op(g) for g in self.generators]
        dims = {g.dim for g in self.generators}
        if len(dims) != 1:
            raise ValueError("generators act on different spaces")
        clean = []
        for s in self.samples:
            t = tuple(mpq(x) for x in s)
            if len(t) != len(self.generators) or any(x <= 0 for x in t):
                raise ValueError("cone samples must be positive and match the generators")
            clean.append(t)
        self.samples = clean

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    def combination(self, coeffs: Sequence, subset: Sequence[int] | None = None) -> ExactMatrix:
        idx = range(len(self.generators)) if subset is None else subset
        out = ExactMatrix.zeros(self.dim)
        for c, i in zip(coeffs, idx):
            out = out + self.generators[i].matrix * c
        return out


@dataclass
class ConeCheck:
    constant: bool
    witness: Filtration | None = None
    counterexample: tuple | None = None
    """``((coeffs_a, W_a), (coeffs_b, W_b))`` with ``W_a != W_b``."""
    checked: int = 0


def _random_coeffs(rng: random.Random, k: int) -> tuple:
    return tuple(mpq(rng.randint(1, 9), rng.randint(1, 5)) for _ in range(k))


def cone_constancy_check(c: ConeSpec, center: int = 0, faces: Sequence[Sequence[int]] | None = None,
                         n_samples: int = 5, seed: int = 0) -> ConeCheck:
    """Compare ``W(N)`` across sample points of a cone and (optionally) its faces.

    For each face (a subset of generator indices; the full cone by default) the
    barycenter ``(1, ..., 1)`` and ``n_samples`` random positive combinations
    are tested together with ``c.samples``.  Filtrations from different faces are
    not compared against each other, since they legitimately differ.

    Raises
    ------
    ValueError
        If a sampled combination is not nilpotent.
    """
    rng = random.Random(seed)
    k = len(c.generators)
    face_list = [tuple(range(k))] if faces is None else [tuple(f) for f in faces]
    witness = None
    checked = 0
    for face in face_list:
        points: list[tuple] = []
        if face == tuple(range(k)):
            points.extend(c.samples)
        points.append((mpq(1),) * len(face))
        points.extend(_random_coeffs(rng, len(face)) for _ in range(n_samples))
        ref = None
        for coeffs in points:
            mat = c.combination(coeffs, face)
            try:
                op = NilpotentOperator(mat)
            except ValueError as exc:
                raise ValueError(f"cone combination {coeffs} is not nilpotent") from exc
            wf = monodromy_filtration(op, center)
            checked += 1
            if ref is None:
                ref = (coeffs, wf)
            elif wf != ref[1]:
                return ConeCheck(False, None, (ref, (coeffs, wf)), checked)
        if face == tuple(range(k)):
            witness = ref[1]
    if witness is None:
        witness = ref[1]
    return ConeCheck(True, witness, None, checked)


# --------------------------------------------------------------------------
# Random test data


def _unimodular(rng: random.Random, n: int, steps: int = None) -> ExactMatrix:
    rows = [[mpq(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            break
        f = rng.choice((-2, -1, 1, 2))
        rows[i] = [a + f * b for a, b in zip(rows[i], rows[j])]
    if n > 1:
        rng.shuffle(rows)
    return ExactMatrix(rows, n)


def random_partition(rng: random.Random, n: int) -> list[int]:
    parts = []
    left = n
    while left:
        p = rng.randint(1, left)
        parts.append(p)
        left -= p
    return sorted(parts, reverse=True)


def random_nilpotent(rng: random.Random, n: int, partition: Sequence[int] | None = None) -> ExactMatrix:
    """``P J P^{-1}`` with ``J`` a Jordan matrix of the given (or random) type.

    ``P`` is a product of integer elementary matrices, so entries stay small
    integers and the conjugate is again integral.
    """
    parts = list(partition) if partition is not None else random_partition(rng, n)
    if sum(parts) != n:
        raise ValueError("partition does not sum to n")
    rows = [[mpq(0)] * n for _ in range(n)]
    pos = 0
    for p in parts:
        for i in range(p - 1):
            rows[pos + i][pos + i + 1] = mpq(1)
        pos += p
    j = ExactMatrix(rows, n)
    p = _unimodular(rng, n)
    return p @ j @ p.inverse()


def jordan_block(size: int) -> ExactMatrix:
    return ExactMatrix([[mpq(int(j == i + 1)) for j in range(size)] for i in range(size)], size)
