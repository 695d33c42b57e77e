import random

import pytest

from gca.courant import CourantData, random_iso
from gca.errors import InvalidInput, NoAdaptedSplit
from gca.dirac import random_max_isotropic
from gca.exactnum import I as IMAG, ONE, Polynomial, in_span
from gca.extcalc import Form, GForm
from gca.gcs import (
    GCSField,
    build_normal_form,
    build_wang_case,
    check_integrability,
    check_lift_iso,
    closure_check,
    default_grid,
    is_regular_wrt_cartan,
    lift_iso,
    pointwise_index_zero,
)
from gca.liealg import get_algebra, standard_roots

G = get_algebra("su2x2")


@pytest.fixture(scope="module")
def nf3():
    return build_normal_form(G, 3, 1, 1, 0)


def test_normal_form_integrable(nf3):
    cert = check_integrability(nf3, closure_oracle=True)
    assert cert.ok and cert.details["oracleAgrees"]


def test_normal_form_index_and_regular(nf3):
    assert pointwise_index_zero(nf3).ok
    assert is_regular_wrt_cartan(nf3).ok


def test_json_round_trip(nf3):
    f = GCSField.from_json(nf3.to_json())
    assert f == nf3


def test_conjugate_field_integrable(nf3):
    assert check_integrability(nf3.conj()).ok


def test_eps_violation_caught_in_five_dimensions():
    f = build_normal_form(G, 5, 1, 1, 0)
    # d(i t1 dt2 ^ dt3) is nonzero on the three real directions of W
    bad = f.with_(eps=f.eps + Form(5, 2, {(1, 2): Polynomial.var(5, 0, IMAG)}))
    cert = check_integrability(bad, closure_oracle=True)
    assert not cert.ok and cert.failure == "condE"
    assert not cert.details["closureOracle"]["ok"]


def test_q_odd_has_no_split():
    with pytest.raises(NoAdaptedSplit):
        build_normal_form(G, 5, 1, 1, 1)


def test_bad_base_dimensions():
    with pytest.raises(InvalidInput):
        build_normal_form(G, 4, 1, 1, 0)


def test_wang():
    f = build_wang_case(get_algebra("su3x3"), 1)
    assert check_integrability(f).ok and is_regular_wrt_cartan(f).ok
    with pytest.raises(NoAdaptedSplit):
        build_wang_case(G, 1)


def test_iso_lift(nf3):
    I = random_iso(standard_roots(G), 3, random.Random(4))
    lifted = lift_iso(I, nf3)
    assert check_lift_iso(I, nf3, lifted, default_grid(3, 2)).ok
    assert check_integrability(lifted).ok


def test_non_subalgebra_D_fails():
    D, _ = random_max_isotropic(G.metric, random.Random(10))
    assert not all(in_span(D, G.bracket(a, b)) for a in D for b in D)
    f = GCSField(CourantData.untwisted(G, 1), [[ONE]], GForm.zero(G, 1, 1), D, Form.zero(1, 2))
    cert = check_integrability(f, closure_oracle=True)
    assert not cert.ok and cert.details["oracleAgrees"]
    assert not closure_check(f).ok
