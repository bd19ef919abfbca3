"""Exact linear algebra over Q and Q(i).

Scalars are ``gmpy2.mpq`` rationals, or :class:`GaussianRational` when the
imaginary part is nonzero.  Every arithmetic result is normalised so that a
Gaussian rational with zero imaginary part collapses back to ``mpq``; equal
values therefore always have equal representations.

Subspaces are stored by the reduced row echelon form of a spanning set,
which makes subspace equality a structural comparison.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "I",
    "scalar",
    "conj",
    "ExactMatrix",
    "Subspace",
    "Filtration",
    "Quotient",
    "rref",
    "echelonize",
    "intersect",
    "induced_filtration_on_end",
    "shifts_filtration",
    "commutator",
    "format_scalar",
    "parse_scalar",
]


class GaussianRational:
    """A number ``re + im*i`` with rational parts and ``im != 0``.

    Use :func:`scalar` to build values; it returns a plain ``mpq`` when the
    imaginary part vanishes.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = mpq(re)
        self.im = mpq(im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return _mk(self.re + other.re, self.im + other.im)
        try:
            return GaussianRational(self.re + other, self.im)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return _mk(self.re - other.re, self.im - other.im)
        try:
            return GaussianRational(self.re - other, self.im)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return GaussianRational(other - self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return _mk(self.re * other.re - self.im * other.im,
                       self.re * other.im + self.im * other.re)
        try:
            if not other:
                return mpq(0)
            return GaussianRational(self.re * other, self.im * other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            n = other.re * other.re + other.im * other.im
            return _mk((self.re * other.re + self.im * other.im) / n,
                       (self.im * other.re - self.re * other.im) / n)
        try:
            return GaussianRational(self.re / other, self.im / other)
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        n = self.re * self.re + self.im * self.im
        return _mk(other * self.re / n, -other * self.im / n)

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return False

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"


def _mk(re, im):
    if im == 0:
        return re
    return GaussianRational(re, im)


_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")
_SIGN_RE = re.compile(r"[+-]")


def _parse_rational(text: str, what: str):
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"cannot parse exact scalar {what!r}")
    try:
        return mpq(text.lstrip("+"))
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {what!r}") from None


def parse_scalar(text: str):
    """Parse ``"p/q"``, ``"p/q+r/s i"``, ``"r/s i"``, ``"-i"`` and similar."""
    orig = text
    text = "".join(str(text).split())
    if not text:
        raise ValueError("cannot parse an empty scalar")
    if not text.endswith("i"):
        return _parse_rational(text, orig)
    body = text[:-1].rstrip("*")
    # the imaginary part starts at the last sign that is not the leading one
    cut = max((m.start() for m in _SIGN_RE.finditer(body) if m.start() > 0), default=0)
    re_text, im_text = body[:cut], body[cut:]
    re_part = _parse_rational(re_text, orig) if re_text else mpq(0)
    if im_text in ("", "+", "-"):
        im_part = mpq(-1 if im_text == "-" else 1)
    else:
        im_part = _parse_rational(im_text, orig)
    return _mk(re_part, im_part)


def scalar(value, imag=0):
    """Coerce ``value`` (+ ``imag``*i) to an exact scalar.

    Accepts ints, ``Fraction``, ``mpq``, strings and Gaussian rationals.
    Floats and Python complex numbers are rejected: silently rounding them
    would defeat exact arithmetic.
    """
    if isinstance(value, GaussianRational):
        base = value
    elif isinstance(value, str):
        base = parse_scalar(value)
    elif isinstance(value, (float, complex)):
        raise TypeError("floating-point values are not exact scalars")
    elif isinstance(value, (int, Fraction)) or type(value) is type(mpq(0)):
        base = mpq(value)
    else:
        raise TypeError(f"unsupported scalar type {type(value).__name__}")
    if imag:
        return base + scalar(imag) * GaussianRational(0, 1)
    return base


I = GaussianRational(0, 1)


def conj(x):
    if isinstance(x, GaussianRational):
        return GaussianRational(x.re, -x.im)
    return x


def is_real(x) -> bool:
    return not isinstance(x, GaussianRational)


def format_scalar(x) -> str:
    if isinstance(x, GaussianRational):
        if x.re == 0:
            return f"{_fmt_q(x.im)} i"
        sign = "-" if x.im < 0 else "+"
        return f"{_fmt_q(x.re)}{sign}{_fmt_q(abs(x.im))} i"
    return _fmt_q(mpq(x))


def _fmt_q(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(float(x), 0.0)


# --------------------------------------------------------------------------
# Row reduction kernel


def rref(rows: Sequence[Sequence], ncols: int):
    """Reduced row echelon form.

    Returns ``(pivots, reduced_rows)`` where ``reduced_rows`` holds only the
    nonzero rows, each with a leading 1 in its pivot column.
    """
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        inv = 1 / row[c] if isinstance(row[c], GaussianRational) else mpq(1) / row[c]
        if row[c] != 1:
            row = [x * inv for x in row]
            m[r] = row
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    other = m[i]
                    m[i] = [a - f * b if b else a for a, b in zip(other, row)]
        pivots.append(c)
        r += 1
    return tuple(pivots), [tuple(x) for x in m[:r]]


def _nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    pivots, red = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    zero = mpq(0)
    for f in free:
        v = [zero] * ncols
        v[f] = mpq(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


# --------------------------------------------------------------------------
# Matrices


class ExactMatrix:
    """Immutable matrix of exact scalars."""

    __slots__ = ("rows", "cols", "_e", "_hash")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        e = tuple(tuple(x if isinstance(x, GaussianRational) else _coerce(x) for x in row)
                  for row in entries)
        if cols is None:
            if not e:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(e[0])
        for row in e:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self._e = e
        self.rows = len(e)
        self.cols = cols
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        z = mpq(0)
        return cls([[z] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[mpq(int(i == j)) for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        z = mpq(0)
        return cls([[_coerce(values[i]) if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "ExactMatrix":
        if not columns:
            if nrows is None:
                raise ValueError("need nrows for an empty column list")
            return cls([[] for _ in range(nrows)], 0)
        return cls(list(zip(*columns)), len(columns))

    @classmethod
    def from_vector(cls, vec: Sequence, n: int) -> "ExactMatrix":
        """Inverse of :meth:`vectorize` (row-major)."""
        return cls([vec[i * n:(i + 1) * n] for i in range(n)], n)

    @classmethod
    def block_diag(cls, *blocks: "ExactMatrix") -> "ExactMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[mpq(0)] * m for _ in range(n)]
        r = c = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r + i][c + j] = b._e[i][j]
            r += b.rows
            c += b.cols
        return cls(out, m)

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._e[i][j]

    def row(self, i: int) -> tuple:
        return self._e[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._e)

    def tolist(self) -> list[list]:
        return [list(r) for r in self._e]

    def vectorize(self) -> tuple:
        return tuple(x for r in self._e for x in r)

    # algebra ----------------------------------------------------------------
    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.cols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.cols)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in r] for r in self._e], self.cols)

    def __mul__(self, c) -> "ExactMatrix":
        if isinstance(c, ExactMatrix):
            raise TypeError("use @ for matrix products")
        c = c if isinstance(c, GaussianRational) else _coerce(c)
        return ExactMatrix([[a * c for a in r] for r in self._e], self.cols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = list(zip(*other._e)) if other.rows else [()] * other.cols
            zero = mpq(0)
            out = []
            for r in self._e:
                nz = [(k, a) for k, a in enumerate(r) if a]
                out.append([sum((a * col[k] for k, a in nz), zero) for col in ocols])
            return ExactMatrix(out, other.cols)
        return self.apply(other)

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        nz = [(k, v) for k, v in enumerate(vec) if v]
        zero = mpq(0)
        return tuple(sum((r[k] * v for k, v in nz), zero) for r in self._e)

    def __pow__(self, k: int) -> "ExactMatrix":
        if self.rows != self.cols or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        out = ExactMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def T(self) -> "ExactMatrix":
        if not self.rows:
            return ExactMatrix([], 0)
        return ExactMatrix(list(zip(*self._e)), self.rows)

    def conj(self) -> "ExactMatrix":
        return ExactMatrix([[conj(a) for a in r] for r in self._e], self.cols)

    def real_part(self) -> "ExactMatrix":
        return ExactMatrix([[a.re if isinstance(a, GaussianRational) else a for a in r] for r in self._e], self.cols)

    def imag_part(self) -> "ExactMatrix":
        return ExactMatrix([[a.im if isinstance(a, GaussianRational) else mpq(0) for a in r] for r in self._e], self.cols)

    def trace(self):
        return sum((self._e[i][i] for i in range(min(self.rows, self.cols))), mpq(0))

    def is_zero(self) -> bool:
        return not any(x for r in self._e for x in r)

    def is_real(self) -> bool:
        return all(not isinstance(x, GaussianRational) for r in self._e for x in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def rank(self) -> int:
        return len(rref(self._e, self.cols)[0])

    def kernel(self) -> "Subspace":
        return Subspace(self.cols, _nullspace(self._e, self.cols), _canonical=False)

    def image(self) -> "Subspace":
        """Column span."""
        return Subspace(self.rows, [self.column(j) for j in range(self.cols)])

    def solve(self, rhs: Sequence):
        """A particular solution ``x`` of ``self @ x = rhs`` or ``None``."""
        aug = [list(r) + [_coerce_any(b)] for r, b in zip(self._e, rhs)]
        pivots, red = rref(aug, self.cols + 1)
        if self.cols in pivots:
            return None
        x = [mpq(0)] * self.cols
        for row, p in zip(red, pivots):
            x[p] = row[-1]
        return tuple(x)

    def inverse(self) -> "ExactMatrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = [list(r) + [mpq(int(i == j)) for j in range(n)] for i, r in enumerate(self._e)]
        pivots, red = rref(aug, 2 * n)
        if pivots[:n] != tuple(range(n)) or len(pivots) < n or pivots[n - 1] != n - 1:
            raise ZeroDivisionError("matrix is singular")
        return ExactMatrix([row[n:] for row in red], n)

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        m = [list(r) for r in self._e]
        n = self.rows
        d = mpq(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c]), None)
            if piv is None:
                return mpq(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d = d * m[c][c]
            for i in range(c + 1, n):
                f = m[i][c] / m[c][c]
                if f:
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def nilpotency_index(self) -> int | None:
        """Smallest k with ``self**k == 0``, or ``None`` if not nilpotent."""
        if not self.is_square():
            raise ValueError("nilpotency of a non-square matrix")
        p = ExactMatrix.identity(self.rows)
        for k in range(0, self.rows + 1):
            if p.is_zero():
                return k
            p = p @ self
        return None

    def exp_nilpotent(self) -> "ExactMatrix":
        """``exp`` of a nilpotent matrix as a finite sum."""
        k = self.nilpotency_index()
        if k is None:
            raise ValueError("matrix is not nilpotent")
        out = ExactMatrix.identity(self.rows)
        term = ExactMatrix.identity(self.rows)
        for j in range(1, k):
            term = (term @ self) * mpq(1, j)
            out = out + term
        return out

    def log_unipotent(self) -> "ExactMatrix":
        """``log`` of a unipotent matrix as a finite sum."""
        u = self - ExactMatrix.identity(self.rows)
        k = u.nilpotency_index()
        if k is None:
            raise ValueError("matrix is not unipotent")
        out = ExactMatrix.zeros(self.rows)
        term = ExactMatrix.identity(self.rows)
        for j in range(1, k):
            term = term @ u
            out = out + term * mpq((-1) ** (j + 1), j)
        return out

    # numerics / io ----------------------------------------------------------
    def to_numpy(self, dtype=complex):
        import numpy as np

        if dtype is complex:
            return np.array([[to_complex(x) for x in r] for r in self._e], dtype=complex).reshape(self.rows, self.cols)
        if not self.is_real():
            raise ValueError("matrix has non-real entries")
        return np.array([[float(x) for x in r] for r in self._e], dtype=float).reshape(self.rows, self.cols)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[format_scalar(x) for x in r] for r in self._e]}

    @classmethod
    def from_json(cls, data: Mapping) -> "ExactMatrix":
        entries = [[_coerce_any(x) for x in r] for r in data["entries"]]
        m = cls(entries, int(data["cols"]))
        if m.rows != int(data["rows"]):
            raise ValueError("row count does not match 'rows'")
        return m

    # dunder -----------------------------------------------------------------
    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._e))
        return self._hash

    def __repr__(self):
        body = "; ".join(", ".join(format_scalar(x) for x in r) for r in self._e)
        return f"ExactMatrix([{body}])"


def _coerce(x):
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, (float, complex)):
        raise TypeError("floating-point values are not exact scalars")
    return mpq(x)


def _coerce_any(x):
    if isinstance(x, GaussianRational):
        return x
    return _coerce(x)


def commutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return a @ b - b @ a


# --------------------------------------------------------------------------
# Subspaces


class Subspace:
    """A subspace of Q(i)^n held in canonical reduced echelon form.

    ``basis`` rows are the canonical basis; two subspaces are equal exactly
    when their ``basis`` tuples are equal.
    """

    __slots__ = ("ambient", "basis", "pivots", "_ann")

    def __init__(self, ambient: int, vectors: Iterable[Sequence] = (), _canonical: bool = False):
        vecs = [tuple(_coerce_any(x) for x in v) if not _canonical else tuple(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise ValueError("vector length does not match ambient dimension")
        if _canonical:
            self.pivots = tuple(next(i for i, x in enumerate(v) if x) for v in vecs)
            self.basis = tuple(vecs)
        else:
            self.pivots, red = rref(vecs, ambient)
            self.basis = tuple(red)
        self.ambient = ambient
        self._ann = None

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), _canonical=True)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [tuple(mpq(int(i == j)) for j in range(n)) for i in range(n)], _canonical=True)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        return cls(ambient, vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return len(self.basis) == self.ambient

    def is_real(self) -> bool:
        return all(not isinstance(x, GaussianRational) for v in self.basis for x in v)

    def annihilator(self) -> "Subspace":
        """``{a : a . s = 0 for all s}`` with the bilinear (unconjugated) pairing."""
        if self._ann is None:
            self._ann = Subspace(self.ambient, _nullspace(self.basis, self.ambient))
        return self._ann

    def __contains__(self, vec: Sequence) -> bool:
        ann = self.annihilator()
        return all(not sum((a * v for a, v in zip(row, vec) if a and v), mpq(0)) for row in ann.basis)

    def issubspace(self, other: "Subspace") -> bool:
        self._check(other)
        if self.dim > other.dim:
            return False
        return all(v in other for v in self.basis)

    __le__ = issubspace

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not other.basis:
            return self
        if not self.basis:
            return other
        return Subspace(self.ambient, self.basis + other.basis, _canonical=False)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def conj(self) -> "Subspace":
        if self.is_real():
            return self
        return Subspace(self.ambient, [tuple(conj(x) for x in v) for v in self.basis])

    def image(self, m: ExactMatrix) -> "Subspace":
        if m.cols != self.ambient:
            raise ValueError("matrix does not act on this space")
        return Subspace(m.rows, [m.apply(v) for v in self.basis])

    def preimage(self, m: ExactMatrix) -> "Subspace":
        """``{v : m v in self}``."""
        if m.rows != self.ambient:
            raise ValueError("matrix does not map into this space")
        ann = self.annihilator()
        if not ann.basis:
            return Subspace.full(m.cols)
        a = ExactMatrix(ann.basis, self.ambient) @ m
        return a.kernel()

    def complement_in(self, sup: "Subspace") -> list[tuple]:
        """Vectors from ``sup``'s canonical basis completing ``self`` to ``sup``."""
        extra = []
        cur = self
        for v in sup.basis:
            if v not in cur:
                extra.append(v)
                cur = Subspace(self.ambient, cur.basis + (v,))
            if cur.dim == sup.dim:
                break
        return extra

    def matrix(self) -> ExactMatrix:
        """Basis vectors as columns."""
        return ExactMatrix.from_columns(self.basis, self.ambient)

    def to_json(self) -> list[list[str]]:
        return [[format_scalar(x) for x in v] for v in self.basis]

    def _check(self, other):
        if self.ambient != other.ambient:
            raise ValueError(f"ambient dimension mismatch: {self.ambient} vs {other.ambient}")

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        vs = ", ".join("(" + ", ".join(format_scalar(x) for x in v) + ")" for v in self.basis)
        return f"Subspace(dim={self.dim}/{self.ambient}: {vs})"


def echelonize(m: ExactMatrix) -> tuple[int, Subspace]:
    """Rank and canonical basis of the column span of ``m``."""
    s = m.image()
    return s.dim, s


def intersect(a: Subspace, b: Subspace) -> Subspace:
    a._check(b)
    if not a.basis or not b.basis:
        return Subspace.zero(a.ambient)
    if a.is_full():
        return b
    if b.is_full():
        return a
    return (a.annihilator() + b.annihilator()).annihilator()


# --------------------------------------------------------------------------
# Filtrations


class Filtration:
    """Increasing (``"inc"``) or decreasing (``"dec"``) filtration of Q(i)^n.

    Built from a mapping ``weight -> subspace`` listing where steps begin.  For
    an increasing filtration ``W_l`` is the subspace at the largest listed
    weight ``<= l`` (zero below all of them); for a decreasing one ``F^p`` is
    the subspace at the smallest listed weight ``>= p`` (zero above all of
    them).  The stored form is canonical: ``lo..hi`` is the shortest range
    outside of which the filtration is ``0`` or the whole space.
    """

    __slots__ = ("dim", "direction", "lo", "hi", "_steps")

    def __init__(self, dim: int, steps: Mapping[int, Subspace], direction: str = "inc"):
        if direction not in ("inc", "dec"):
            raise ValueError("direction must be 'inc' or 'dec'")
        if not steps:
            raise ValueError("a filtration needs at least one step")
        weights = sorted(steps)
        for w in weights:
            if steps[w].ambient != dim:
                raise ValueError("step has the wrong ambient dimension")
        self.dim = dim
        self.direction = direction
        full = Subspace.full(dim)
        zero = Subspace.zero(dim)
        if dim == 0:
            self.lo = self.hi = 0
            self._steps = (full,)
            return

        def raw(l):
            if direction == "inc":
                below = [w for w in weights if w <= l]
                return steps[below[-1]] if below else zero
            above = [w for w in weights if w >= l]
            return steps[above[0]] if above else zero

        lo_w, hi_w = weights[0] - 1, weights[-1] + 1
        values = {l: raw(l) for l in range(lo_w, hi_w + 1)}
        if direction == "inc":
            if not values[hi_w].is_full():
                raise ValueError("increasing filtration must end with the full space")
            for l in range(lo_w + 1, hi_w + 1):
                if not values[l - 1] <= values[l]:
                    raise ValueError(f"W_{l - 1} is not contained in W_{l}")
            nonzero = [l for l in values if not values[l].is_zero()]
            lo = min(nonzero)
            hi = min(l for l in values if values[l].is_full())
        else:
            if not values[lo_w].is_full():
                raise ValueError("decreasing filtration must start with the full space")
            for l in range(lo_w + 1, hi_w + 1):
                if not values[l] <= values[l - 1]:
                    raise ValueError(f"F^{l} is not contained in F^{l - 1}")
            lo = max(l for l in values if values[l].is_full())
            nonzero = [l for l in values if not values[l].is_zero()]
            hi = max(nonzero)
        self.lo, self.hi = lo, hi
        self._steps = tuple(values[l] for l in range(lo, hi + 1))

    @classmethod
    def trivial(cls, dim: int, weight: int, direction: str = "inc") -> "Filtration":
        return cls(dim, {weight: Subspace.full(dim)}, direction)

    def __getitem__(self, l: int) -> Subspace:
        if self.direction == "inc":
            if l < self.lo:
                return Subspace.zero(self.dim)
            if l >= self.hi:
                return Subspace.full(self.dim)
        else:
            if l <= self.lo:
                return Subspace.full(self.dim)
            if l > self.hi:
                return Subspace.zero(self.dim)
        return self._steps[l - self.lo]

    def weights(self) -> range:
        return range(self.lo, self.hi + 1)

    def gr_dim(self, l: int) -> int:
        if self.direction == "inc":
            return self[l].dim - self[l - 1].dim
        return self[l].dim - self[l + 1].dim

    def jumps(self) -> list[int]:
        return [l for l in self.weights() if self.gr_dim(l)]

    def conj(self) -> "Filtration":
        return Filtration(self.dim, {l: self[l].conj() for l in self.weights()}, self.direction)

    def is_real(self) -> bool:
        return all(s.is_real() for s in self._steps)

    def shift(self, k: int) -> "Filtration":
        """Relabel so the step at weight ``l`` moves to ``l + k``."""
        return Filtration(self.dim, {l + k: self[l] for l in self.weights()}, self.direction)

    def to_json(self) -> dict:
        return {"dim": self.dim, "direction": self.direction,
                "steps": [{"weight": l, "basis": self[l].to_json()} for l in self.weights()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Filtration":
        n = int(data["dim"])
        steps = {int(s["weight"]): Subspace(n, [[_coerce_any(x) for x in v] for v in s["basis"]])
                 for s in data["steps"]}
        return cls(n, steps, data.get("direction", "inc"))

    def __eq__(self, other):
        if not isinstance(other, Filtration):
            return NotImplemented
        return (self.dim, self.direction, self.lo, self.hi, self._steps) == (
            other.dim, other.direction, other.lo, other.hi, other._steps)

    def __hash__(self):
        return hash((self.dim, self.direction, self.lo, self.hi, self._steps))

    def __repr__(self):
        sym = "W" if self.direction == "inc" else "F"
        parts = ", ".join(f"{sym}[{l}]={self[l].dim}" for l in self.weights())
        return f"Filtration({self.direction}, dim={self.dim}: {parts})"


# --------------------------------------------------------------------------
# Quotients


class Quotient:
    """Coordinates on ``sup / sub`` given by a rational-friendly complement.

    The complement is taken from ``sup``'s canonical basis, so for rational
    ``sub`` and ``sup`` all coordinate maps are rational and commute with
    complex conjugation.
    """

    def __init__(self, sub: Subspace, sup: Subspace):
        if not sub <= sup:
            raise ValueError("sub is not contained in sup")
        self.sub, self.sup = sub, sup
        self.n = sup.ambient
        self.complement = sub.complement_in(sup)
        self.dim = len(self.complement)
        cols = list(sub.basis) + self.complement
        self._basis = ExactMatrix.from_columns(cols, self.n) if cols else None
        if cols:
            piv, _ = rref(self._basis.T.tolist(), self.n)
            self._rows = piv
            sq = ExactMatrix([self._basis.row(r) for r in piv], len(cols))
            self._inv = sq.inverse()

    def coords(self, v: Sequence) -> tuple:
        """Quotient coordinates of ``v``, which must lie in ``sup``."""
        if not self.dim:
            return ()
        c = self._inv.apply([v[r] for r in self._rows])
        return c[self.sub.dim:]

    def lift(self, coords: Sequence) -> tuple:
        out = [mpq(0)] * self.n
        for c, v in zip(coords, self.complement):
            if c:
                out = [o + c * x for o, x in zip(out, v)]
        return tuple(out)

    def image(self, s: Subspace) -> Subspace:
        """Image in the quotient of ``s ∩ sup``."""
        part = intersect(s, self.sup)
        return Subspace(self.dim, [self.coords(v) for v in part.basis])

    def preimage(self, s: Subspace) -> Subspace:
        return self.sub + Subspace(self.n, [self.lift(v) for v in s.basis])

    def induced_map(self, m: ExactMatrix) -> ExactMatrix:
        """Matrix of the map induced by ``m`` (which must preserve sub and sup)."""
        cols = []
        for v in self.complement:
            w = m.apply(v)
            if w not in self.sup:
                raise ValueError("operator does not preserve the quotient")
            cols.append(self.coords(w))
        return ExactMatrix.from_columns(cols, self.dim) if cols else ExactMatrix.zeros(0, 0)

    def induced_filtration(self, f: Filtration) -> Filtration:
        return Filtration(self.dim, {l: self.image(f[l]) for l in range(f.lo - 1, f.hi + 2)},
                          f.direction)


# --------------------------------------------------------------------------
# Filtrations on End(V)


def adapted_basis(w: Filtration) -> tuple[ExactMatrix, list[int]]:
    """Basis (as columns) adapted to an increasing rational filtration, with weights."""
    if w.direction != "inc":
        raise ValueError("need an increasing filtration")
    cols, weights = [], []
    for l in range(w.lo, w.hi + 1):
        for v in w[l - 1].complement_in(w[l]):
            cols.append(v)
            weights.append(l)
    return ExactMatrix.from_columns(cols, w.dim), weights


def induced_filtration_on_end(w: Filtration) -> Filtration:
    """Filtration ``W_m End(V) = {X : X W_l ⊂ W_{l+m}}`` on row-major vectorised End(V)."""
    n = w.dim
    b, wts = adapted_basis(w)
    binv = b.inverse()
    spans: dict[int, list] = {}
    for i, j in product(range(n), range(n)):
        col = b.column(i)
        rowv = binv.row(j)
        x = tuple(c * r for c in col for r in rowv)
        spans.setdefault(wts[i] - wts[j], []).append(x)
    steps = {}
    acc: list = []
    for m in sorted(spans):
        acc = acc + spans[m]
        steps[m] = Subspace(n * n, acc)
    return Filtration(n * n, steps, "inc")


def shifts_filtration(x: ExactMatrix, w: Filtration, m: int) -> bool:
    """True iff ``x W_l ⊂ W_{l+m}`` for every ``l``."""
    for l in range(w.lo - 1, w.hi + 1):
        if not w[l].image(x) <= w[l + m]:
            return False
    return True
