import random

import pytest
from hypothesis import given, strategies as st

from gca.dirac import (
    NEGATIVE_KINDS,
    DiracQuadruple,
    J_from_L,
    adapted_basis,
    adapted_gram_ok,
    build_L,
    check_index_zero,
    check_J,
    engineered_quadruple,
    extract_quadruple,
    random_max_isotropic,
    random_quadruple,
    real_index,
)
from gca.errors import InvalidInput
from gca.exactnum import ONE, ZERO, span_equal
from gca.liealg import get_algebra

G = get_algebra("su2x2")


@given(st.integers(0, 10_000))
def test_round_trip(seed):
    q = random_quadruple(3, G, random.Random(seed))
    L = build_L(q)
    assert len(L) == 3 + 3
    assert span_equal(build_L(extract_quadruple(L, 3, G)), L)


def test_json_round_trip():
    q = random_quadruple(4, G, random.Random(2))
    q2 = DiracQuadruple.from_json(q.to_json())
    assert span_equal(build_L(q), build_L(q2))


def test_rejects_non_isotropic_D():
    with pytest.raises(InvalidInput):
        DiracQuadruple(1, G, [], [], [G.basis_vector(k) for k in range(3)], [])


def test_diagonal_D_has_p_three():
    D = [[ONE if j in (a, a + 3) else ZERO for j in range(6)] for a in range(3)]
    ab = adapted_basis(D, G.metric)
    assert ab.p == 3 and ab.q == 0 and adapted_gram_ok(ab, G.metric, D)


@given(st.integers(0, 10_000))
def test_adapted_basis_random(seed):
    rng = random.Random(seed)
    D, p = random_max_isotropic(G.metric, rng)
    ab = adapted_basis(D, G.metric)
    assert ab.p == p and adapted_gram_ok(ab, G.metric, D)


def test_no_index_zero_in_even_rank_over_q4():
    # the ambient signature is (7, 7) here, so L cap conj(L) never vanishes
    rng = random.Random(11)
    for _ in range(20):
        q = random_quadruple(4, G, rng)
        assert real_index(build_L(q)) > 0
        assert not check_index_zero(q).verdict


@pytest.mark.parametrize("kind", NEGATIVE_KINDS)
def test_engineered_negatives(kind):
    rng = random.Random(5)
    hits = 0
    for _ in range(20):
        q = engineered_quadruple(rng.randint(1, 5), G, rng, False, kind)
        if q is None:
            continue
        rep = check_index_zero(q)
        assert not rep.verdict and rep.oracle_index > 0
        hits += 1
    assert hits


def test_engineered_positive_gives_complex_structure():
    rng = random.Random(8)
    q = None
    while q is None:
        q = engineered_quadruple(3, G, rng, True)
    rep = check_index_zero(q)
    assert rep.verdict and rep.oracle_index == 0 and len(rep.delta0) % 2 == 0
    L = build_L(q)
    J = J_from_L(L, 3, G.metric)
    assert check_J(J, L, 3, G.metric).ok
