import pytest

from gca.liealg import _norm_part, _norm_scale, get_algebra, signature, standard_roots, validate_quadratic


@pytest.mark.parametrize("name,dim", [("su2", 3), ("su3", 8), ("su2x2", 6), ("su3x3", 16)])
def test_builtin_algebras(name, dim):
    g = get_algebra(name)
    assert g.dim == dim
    v = validate_quadratic(g)
    assert v["jacobi"] and v["adInvariance"] and v["nondegenerate"]


def test_double_is_neutral():
    sig = signature(get_algebra("su2x2").metric)
    assert sig == (3, 3)


def test_unknown_algebra():
    with pytest.raises(Exception):
        get_algebra("so7")


@pytest.mark.parametrize("name", ["su2", "su3"])
def test_root_normalization(name):
    g = get_algebra(name)
    R = standard_roots(g)
    assert len(R.roots) == g.dim - R.rank
    for a in R.roots:
        E, Em = R.root_vectors[a], R.root_vectors[R.neg(a)]
        # tau(E_a) = -E_{-a}
        assert g.tau(list(E)) == [-x for x in Em]
        for h in R.cartan:
            assert g.bracket(list(h), list(E)) == [R.value(a, h) * x for x in E]
    for (a, b), N in R.structure_constants.items():
        assert N.is_real()


def test_su3_simple_roots():
    R = standard_roots(get_algebra("su3"))
    assert len(R.simple) == 2 and len(R.positive) == 3


@pytest.mark.parametrize("n", [1, 2, 5, 13, 25, 50, 65])
def test_norm_part_sums_of_squares(n):
    z, rest = _norm_part(n)
    assert rest == 1
    assert z.norm2() == n


def test_norm_part_residual():
    z, rest = _norm_part(12)
    assert rest == 3 and z.norm2() * rest == 12
    c, res = _norm_scale(2)
    assert res == 1 and c * c.conj() * 2 == 1
