import itertools
import random

from hypothesis import given, strategies as st

from gca.exactnum import Polynomial, random_polynomial
from gca.extcalc import Form, GForm, VectorField, c_phi, covariant_d, curvature, poincare_antiderivative
from gca.liealg import get_algebra


def rform(n, k, rng, degree=2):
    return Form(n, k, {I: random_polynomial(n, degree, rng, 2) for I in itertools.combinations(range(n), k)
                       if rng.random() < 0.6})


@given(st.integers(0, 10_000), st.integers(0, 3))
def test_dd_zero(seed, k):
    w = rform(4, k, random.Random(seed))
    assert w.d().d().is_zero()


@given(st.integers(0, 10_000), st.integers(0, 2))
def test_poincare_inverts_d(seed, k):
    closed = rform(3, k, random.Random(seed)).d()
    assert poincare_antiderivative(closed).d() == closed


@given(st.integers(0, 10_000), st.integers(0, 2), st.integers(0, 2))
def test_wedge_leibniz(seed, a, b):
    rng = random.Random(seed)
    x, y = rform(4, a, rng), rform(4, b, rng)
    sign = -1 if a % 2 else 1
    assert x.wedge(y).d() == x.d().wedge(y) + x.wedge(y.d()).scale(sign)


def test_cartan_formula():
    rng = random.Random(3)
    w = rform(3, 2, rng)
    X = VectorField([random_polynomial(3, 1, rng, 2) for _ in range(3)])
    assert w.lie(X) == w.lie_direct(X)


def test_wedge_is_determinant_convention():
    dt1, dt2 = Form.dt(2, 0), Form.dt(2, 1)
    e1, e2 = VectorField.coordinate(2, 0), VectorField.coordinate(2, 1)
    assert dt1.wedge(dt2).value(e1, e2) == Polynomial.const(2, 1)


def test_bianchi():
    g = get_algebra("su2")
    rng = random.Random(5)
    A = GForm(g, [rform(3, 1, rng, 1) for _ in range(g.dim)])
    assert covariant_d(A, curvature(A)).is_zero()


def test_c_phi_closed_for_constant_phi():
    g = get_algebra("su2")
    Phi = GForm.from_terms(g, 3, 1, {(0,): [1, 0, 0], (1,): [0, 1, 0], (2,): [0, 0, 1]})
    c = c_phi(Phi)
    assert not c.is_zero() and c.d().is_zero()
    # <Phi(e1), [Phi(e2), Phi(e3)]> with the su2 Killing form
    e = [VectorField.coordinate(3, k) for k in range(3)]
    expected = g.pair([1, 0, 0], g.bracket([0, 1, 0], [0, 0, 1]))
    assert c.value(*e) == Polynomial.const(3, expected)
