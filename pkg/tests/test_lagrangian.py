import random

import pytest

from gca.errors import InvalidInput
from gca.exactnum import GaussianRational, ONE, ZERO
from gca.lagrangian import (
    AdmissibleSystem,
    build_lagrangian,
    build_parabolic,
    enumerate_systems,
    is_weak_regular,
    lagrangian_certificate,
    levi_center_split,
    system_from_json,
    v_catalogue,
    weak_regular_span,
)
from gca.liealg import get_algebra, standard_roots

SU2, SU3 = get_algebra("su2"), get_algebra("su3")


def _neg(R):
    return [R.neg(a) for a in R.positive]


def test_borel_and_full():
    R = standard_roots(SU3)
    B = build_parabolic(R)
    assert len(B.levi) == 0 and len(B.center) == 2 and B.check().ok
    P = build_parabolic(R, R.positive, R.simple)
    assert P.dim == 8 and len(P.center) == 0 and P.check().ok


def test_su3_one_simple_root():
    R = standard_roots(SU3)
    P = build_parabolic(R, R.positive, [R.simple[0]])
    assert len(P.center) == 1 and len(P.levi) == 3 and P.dim == 2 + 3 + 1
    assert P.check().ok
    a = R.simple[0]
    for z in P.center:
        assert R.value(a, z) == 0


def test_levi_center_split():
    R = standard_roots(SU3)
    P = build_parabolic(R, R.positive, [R.simple[0]])
    a = R.simple[0]
    H = list(R.dual_vectors[a])
    assert levi_center_split(P, H)[1] == H
    rng = random.Random(1)
    x = [ZERO] * 8
    for v in P.basis():
        c = GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3))
        x = [p + c * q for p, q in zip(x, v)]
    xn, xm, xz = levi_center_split(P, x)
    assert [p + q + r for p, q, r in zip(xn, xm, xz)] == x
    assert SU3.pair(xn, xz) == 0 and SU3.pair(xm, xz) == 0
    with pytest.raises(InvalidInput):
        levi_center_split(P, list(R.root_vectors[R.neg(R.positive[0])]))


def test_non_simple_S_rejected():
    R = standard_roots(SU3)
    top = next(a for a in R.positive if a not in R.simple)
    with pytest.raises(InvalidInput):
        build_parabolic(R, R.positive, [top])


def test_diagonal_is_lagrangian():
    R = standard_roots(SU2)
    P = build_parabolic(R, R.positive, R.simple)
    Q = build_parabolic(R, R.positive, R.simple)
    s = AdmissibleSystem(P, Q, {R.simple[0]: R.simple[0]}, {a: ONE for a in P.bracket_S}, [])
    basis, cert = build_lagrangian(s)
    assert cert.ok and len(basis) == 3
    assert all(v[:3] == v[3:] for v in basis)
    assert is_weak_regular(s)


@pytest.mark.parametrize("phase", [(ONE, ONE), (GaussianRational(0, 1), GaussianRational(0, -1)),
                                   (GaussianRational(3, 4) / 5, GaussianRational(3, -4) / 5)])
def test_good_phases(phase):
    R = standard_roots(SU2)
    P = build_parabolic(R, R.positive, R.simple)
    Q = build_parabolic(R, _neg(R), [R.neg(R.simple[0])])
    ph = dict(zip(P.bracket_S, phase))
    s = AdmissibleSystem(P, Q, {R.simple[0]: R.neg(R.simple[0])}, ph, [])
    assert s.validate().ok and is_weak_regular(s)
    span = weak_regular_span(s)
    assert span.certificate.ok and len(span.DcapDbar) == 3


def test_conjugation_violation():
    R = standard_roots(SU2)
    P = build_parabolic(R, R.positive, R.simple)
    Q = build_parabolic(R, _neg(R), [R.neg(R.simple[0])])
    i = GaussianRational(0, 1)
    s = AdmissibleSystem(P, Q, {R.simple[0]: R.neg(R.simple[0])}, {a: i for a in P.bracket_S}, [])
    basis, cert = build_lagrangian(s)
    assert basis is None and cert.witness["failure"] == "conjugation"
    assert not is_weak_regular(s)
    with pytest.raises(InvalidInput):
        weak_regular_span(s)


def test_su3_cocycle_violation():
    R = standard_roots(SU3)
    P = build_parabolic(R, R.positive, R.simple)
    Q = build_parabolic(R, R.positive, R.simple)
    ph = {a: ONE for a in P.bracket_S}
    top = next(a for a in R.positive if a not in R.simple)
    ph[top], ph[R.neg(top)] = -ONE, -ONE
    s = AdmissibleSystem(P, Q, {a: a for a in R.simple}, ph, [])
    cert = s.validate()
    assert cert.checks["conjugation"] and not cert.checks["cocycle"]
    assert build_lagrangian(s)[0] is None


def test_v_must_be_lagrangian():
    R = standard_roots(SU2)
    P, Q = build_parabolic(R), build_parabolic(R, _neg(R))
    Z = [[ZERO, ZERO, ONE, ZERO, ZERO, ZERO]]
    s = AdmissibleSystem(P, Q, {}, {}, Z)
    assert not s.validate().checks["VIsotropic"]


def test_su2_catalogue_is_complete():
    R = standard_roots(SU2)
    P, Q = build_parabolic(R), build_parabolic(R, _neg(R))
    cat = v_catalogue(P, Q)
    # isotropic lines of diag(-8, 8) over Q(i): x = y and x = -y
    assert len(cat) == 2


def test_su3_weak_regular_mixed():
    R = standard_roots(SU3)
    a = R.simple[0]
    P = build_parabolic(R, R.positive, [a])
    Q = build_parabolic(R, _neg(R), [R.neg(a)])
    ph = {a: GaussianRational(3, 4) / 5, R.neg(a): GaussianRational(3, -4) / 5}
    for V, _ in v_catalogue(P, Q, random.Random(3))[:4]:
        s = AdmissibleSystem(P, Q, {a: R.neg(a)}, ph, V)
        span = weak_regular_span(s)
        assert span.certificate.ok
        assert lagrangian_certificate(s.double, span.D).ok


def test_json_round_trip():
    systems = enumerate_systems(SU2)
    s = systems[-1]
    s2 = system_from_json(s.to_json(), SU2)
    assert s2.to_json() == s.to_json()
