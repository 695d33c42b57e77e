import random

import pytest

from gca.courant import (
    AffineMap,
    CourantData,
    IsoData,
    Section,
    check_axioms,
    check_bracket_preserved,
    check_iso,
    compose_iso,
    dorfman,
    induced_data,
    invert_iso,
    pairing,
    pullback_data,
    random_iso,
    random_triples,
    untwist_locally,
    validate_data,
)
from gca.errors import InvalidInput
from gca.exactnum import GaussianRational
from gca.extcalc import Form, GForm
from gca.liealg import get_algebra, standard_roots

G = get_algebra("su2x2")


def test_untwisted_axioms_small():
    data = CourantData.untwisted(G, 2)
    assert check_axioms(data, random_triples(data, 5, 1)).ok


def test_twisted_data_valid_and_axioms():
    A = GForm.from_terms(G, 2, 1, {(0,): [0, 0, 0, 1, 0, 0]})
    data = CourantData.from_connection(G, A, Form(2, 3))
    assert validate_data(data).ok
    assert check_axioms(data, random_triples(data, 3, 2, degree=1)).ok


def test_invalid_data_flagged():
    R = GForm.from_terms(G, 2, 2, {(0, 1): [1, 0, 0, 0, 0, 0]})
    data = CourantData(G, 2, GForm.zero(G, 2, 1), R, Form.zero(2, 3))
    assert not validate_data(data).ok


def test_constant_fiber_bracket_is_lie_bracket():
    data = CourantData.untwisted(G, 1)
    e = [Section.fiber(1, G.basis_vector(k)) for k in range(2)]
    br = dorfman(data, e[0], e[1])
    assert [p.constant_term() for p in br.components()[-G.dim:]] == G.bracket(G.basis_vector(0), G.basis_vector(1))


def test_iso_group_law():
    R = standard_roots(G)
    rng = random.Random(7)
    base = CourantData.untwisted(G, 2)
    I = random_iso(R, 2, rng)
    J = random_iso(R, 2, rng)
    d1 = induced_data(I, base)
    assert check_iso(I, base, d1).ok and check_bracket_preserved(I, base, d1).ok
    assert induced_data(compose_iso(J, I), base) == induced_data(J, d1)
    assert compose_iso(invert_iso(I), I).is_identity()


def test_untwist_round_trip():
    A = GForm.from_terms(G, 3, 1, {(0,): [0, 1, 0, 0, 0, 0], (2,): [0, 0, 0, 0, 1, 0]})
    data = CourantData.from_connection(G, A, Form.dt(3, 0, 1, 2))
    chain, final = untwist_locally(data)
    assert final.is_untwisted() and len(chain) == 2


def test_json_round_trip():
    A = GForm.from_terms(G, 2, 1, {(1,): [0, 0, 1, 0, 0, 0]})
    data = CourantData.from_connection(G, A)
    assert CourantData.from_json(data.to_json()) == data


def test_affine_map_singular():
    with pytest.raises(InvalidInput):
        AffineMap([[1, 1], [1, 1]], [0, 0])


def test_pullback_of_untwisted_is_untwisted():
    f = AffineMap([[2, 0], [0, GaussianRational(1, 0)]], [1, 0])
    assert pullback_data(f, CourantData.untwisted(G, 2)).is_untwisted()


def test_pairing_symmetric():
    data = CourantData.untwisted(G, 2)
    u, v, _ = random_triples(data, 1, 3)[0]
    assert pairing(G, u, v) == pairing(G, v, u)
