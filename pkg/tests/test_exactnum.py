from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gca.errors import InvalidInput
from gca.exactnum import (
    I,
    as_gr,
    GaussianRational,
    Polynomial,
    det,
    kernel,
    mat_inv,
    mat_mul,
    identity,
    parse_scalar,
    solve,
    span_dim,
    span_intersection,
)

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(GaussianRational, fracs, fracs)


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if a:
        assert a * (1 / a) == 1


@given(scalars)
def test_parse_round_trip(a):
    assert parse_scalar(str(a)) == a


@given(scalars)
def test_conjugation_and_norm(a):
    assert (a * a.conj()).is_real()
    assert a.conj().conj() == a


@pytest.mark.parametrize("text,value", [
    ("-i", GaussianRational(0, -1)),
    ("3/4*i", GaussianRational(0, Fraction(3, 4))),
    ("1/2-1/3*i", GaussianRational(Fraction(1, 2), Fraction(-1, 3))),
])
def test_parse_literals(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("bad", ["", "1/0", "2*", "i i", "abc"])
def test_parse_rejects(bad):
    with pytest.raises(InvalidInput):
        parse_scalar(bad)


def test_i_squared():
    assert I * I == -1


polys = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2)), scalars, max_size=4
).map(lambda d: Polynomial(2, d))


@given(polys, polys, polys)
def test_polynomial_ring(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert p * q == q * p


@given(polys, polys)
def test_leibniz_for_diff(p, q):
    assert (p * q).diff(0) == p.diff(0) * q + p * q.diff(0)


@given(polys, polys)
def test_exact_division(p, q):
    if q:
        assert (p * q).exact_div(q) == p


def test_kernel_and_solve():
    A = [[1, 2, 3], [2, 4, 6], [1, 0, I]]
    K = kernel(A)
    assert len(K) == 1
    for row in A:
        assert sum((GaussianRational(0) + x * y for x, y in zip(row, K[0])), GaussianRational(0)) == 0
    assert solve([[1, 1], [1, -1]], [2, 0]) == [1, 1]
    assert solve([[1, 1], [1, 1]], [1, 2]) is None


def test_inverse_and_det():
    A = [[as_gr(x) for x in r] for r in ([2, 1, 0], [0, 1, I], [1, 0, 1])]
    assert mat_mul(A, mat_inv(A)) == identity(3)
    assert det(A) != 0


def test_intersection():
    A = [[1, 0, 0], [0, 1, 0]]
    B = [[0, 1, 0], [0, 0, 1]]
    X = span_intersection(A, B)
    assert span_dim(X) == 1
