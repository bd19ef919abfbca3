import json

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from siegelhodge.exactlin import (I, ExactMatrix, Filtration, GaussianRational, Quotient, Subspace, echelonize,
                                  format_scalar, induced_filtration_on_end, intersect, parse_scalar, scalar)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4).map(lambda f: mpq(f.numerator, f.denominator))
gaussians = st.tuples(rationals, rationals).map(lambda t: scalar(t[0], t[1]))


def matrices(rows, cols, elems=rationals):
    return st.lists(st.lists(elems, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        lambda r: ExactMatrix(r, cols))


@st.composite
def subspace_pair(draw, max_dim=8):
    n = draw(st.integers(1, max_dim))
    ka = draw(st.integers(0, n))
    kb = draw(st.integers(0, n))
    a = draw(st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=ka, max_size=ka))
    b = draw(st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=kb, max_size=kb))
    return Subspace(n, a), Subspace(n, b)


# -- scalars --------------------------------------------------------------


def test_gaussian_with_zero_imaginary_part_collapses():
    assert isinstance(I * I, type(mpq(1)))
    assert I * I == -1


@pytest.mark.parametrize("text,expected", [
    ("3/4", mpq(3, 4)), ("-2", mpq(-2)), ("i", I), ("-i", -I), ("3 i", 3 * I),
    ("1/2+3/4 i", mpq(1, 2) + mpq(3, 4) * I), ("-1/2-i", mpq(-1, 2) - I), ("0-1 i", -I),
])
def test_parse_scalar(text, expected):
    assert parse_scalar(text) == expected


@pytest.mark.parametrize("bad", ["", "x", "1+", "1/2/3", "ii", "1+2+3i", "1/0"])
def test_parse_scalar_rejects(bad):
    with pytest.raises(ValueError):
        parse_scalar(bad)


@given(gaussians)
def test_scalar_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


# -- echelon form and subspaces --------------------------------------------


def test_echelonize_examples():
    r, s = echelonize(ExactMatrix.identity(3))
    assert r == 3 and s == Subspace.full(3)
    r, s = echelonize(ExactMatrix.zeros(2))
    assert r == 0 and s.basis == ()
    # hand row reduction: the columns (1,2) and (2,4) span the line through (1,2)
    r, s = echelonize(ExactMatrix([[1, 2], [2, 4]]))
    assert r == 1 and s.basis == ((1, 2),)


def test_intersect_examples():
    a = Subspace(3, [[1, 0, 0], [0, 1, 1]])
    assert intersect(a, a) == a
    assert intersect(Subspace(2, [[1, 0]]), Subspace(2, [[1, 1]])).is_zero()
    # planes x = 0 and y = 0 meet in the z-axis
    p1 = Subspace(3, [[0, 1, 0], [0, 0, 1]])
    p2 = Subspace(3, [[1, 0, 0], [0, 0, 1]])
    assert intersect(p1, p2) == Subspace(3, [[0, 0, 1]])
    with pytest.raises(ValueError):
        intersect(Subspace(2, []), Subspace(3, []))


@given(subspace_pair())
def test_grassmann_identity(pair):
    a, b = pair
    assert a.dim + b.dim == (a + b).dim + intersect(a, b).dim
    assert intersect(a, b) <= a and a <= a + b


@given(matrices(3, 3), matrices(3, 3, st.integers(-3, 3)))
def test_echelon_canonical(m, p):
    # equal spans give identical representations
    s = m.image()
    if p.det() != 0:
        assert (m @ p).image().basis == s.basis
    assert Subspace(3, list(s.basis) + [tuple(sum((c * v[i] for c, v in zip((1, 2), s.basis[:2])), mpq(0))
                                              for i in range(3))] if s.dim >= 2 else s.basis) == s


@given(matrices(4, 4, gaussians))
def test_rank_nullity_and_inverse(m):
    assert m.rank() + m.kernel().dim == 4
    if m.det() != 0:
        assert m @ m.inverse() == ExactMatrix.identity(4)


@given(matrices(4, 4, st.integers(-3, 3)))
def test_exp_log_round_trip_on_strictly_upper(m):
    n = ExactMatrix([[m.tolist()[i][j] if j > i else 0 for j in range(4)] for i in range(4)])
    assert n.exp_nilpotent().log_unipotent() == n


@given(matrices(3, 4, gaussians))
def test_matrix_json_round_trip(m):
    assert ExactMatrix.from_json(json.loads(json.dumps(m.to_json()))) == m


# -- filtrations ------------------------------------------------------------


def test_filtration_lookup_and_json():
    w = Filtration(3, {-1: Subspace(3, [[1, 0, 0]]), 1: Subspace.full(3)}, "inc")
    assert w[-2].is_zero() and w[0] == w[-1] and w[5].is_full()
    assert Filtration.from_json(json.loads(json.dumps(w.to_json()))) == w
    f = Filtration(2, {0: Subspace.full(2), 1: Subspace(2, [[I, 1]])}, "dec")
    assert f[-3].is_full() and f[2].is_zero()
    assert f.conj()[1] == Subspace(2, [[-I, 1]])
    assert Filtration.from_json(json.loads(json.dumps(f.to_json()))) == f


def test_filtration_rejects_non_nested():
    with pytest.raises(ValueError):
        Filtration(2, {0: Subspace(2, [[1, 0]]), 1: Subspace(2, [[0, 1]])}, "inc")


def test_induced_filtration_on_end():
    triv = Filtration.trivial(2, 3)
    e = induced_filtration_on_end(triv)
    assert e.jumps() == [0]
    w = Filtration(2, {-1: Subspace(2, [[1, 0]]), 1: Subspace.full(2)}, "inc")
    e = induced_filtration_on_end(w)
    e12 = ExactMatrix([[0, 1], [0, 0]]).vectorize()
    # E12 maps W_1 into W_{-1}: a shift by -2 on every step
    assert e12 in e[-2] and e12 not in e[-3]
    assert ExactMatrix.identity(2).vectorize() in e[0]
    assert ExactMatrix.identity(2).vectorize() not in e[-1]


def test_quotient_induced_map():
    sub = Subspace(3, [[1, 0, 0]])
    q = Quotient(sub, Subspace.full(3))
    m = ExactMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert q.induced_map(m) == ExactMatrix([[0, 1], [0, 0]])


def test_gaussian_rational_type():
    x = mpq(1, 2) + mpq(1, 3) * I
    assert isinstance(x, GaussianRational)
    assert x.conjugate() * x == mpq(1, 4) + mpq(1, 9)
