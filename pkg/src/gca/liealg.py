"""Quadratic Lie algebras, compact Cartan data and root systems over Q(i).

An algebra is stored in a fixed real basis, so the conjugation tau of the
complexification acts coordinate-wise.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidInput, NotSemisimpleCartan, UnsupportedCartan
from .exactnum import (
    I,
    ONE,
    ZERO,
    GaussianRational,
    as_gr,
    conj_entry,
    kernel,
    mat_vec,
    rref,
    solve,
    sparse_rank,
    span_dim,
    transpose,
)


@dataclass(frozen=True)
class QuadraticLieAlgebra:
    dim: int
    structure: tuple  # structure[i][j][k] = coefficient of e_k in [e_i, e_j]
    metric: tuple
    names: tuple = ()
    ident: str = "custom"
    cartan_hint: tuple = ()  # indices of basis vectors spanning a Cartan subalgebra
    _table: tuple = field(init=False, repr=False, compare=False)
    _gram: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = self.dim
        c = tuple(tuple(tuple(as_gr(x) for x in row) for row in plane) for plane in self.structure)
        g = tuple(tuple(as_gr(x) for x in row) for row in self.metric)
        if len(c) != d or any(len(p) != d or any(len(r) != d for r in p) for p in c):
            raise InvalidInput("structure constants must be dim x dim x dim")
        if len(g) != d or any(len(r) != d for r in g):
            raise InvalidInput("metric must be dim x dim")
        object.__setattr__(self, "structure", c)
        object.__setattr__(self, "metric", g)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"e{k + 1}" for k in range(d)))
        table = tuple(
            tuple((j, tuple((k, c[i][j][k]) for k in range(d) if c[i][j][k])) for j in range(d) if any(c[i][j]))
            for i in range(d)
        )
        object.__setattr__(self, "_table", table)
        gram = tuple(tuple((j, g[i][j]) for j in range(d) if g[i][j]) for i in range(d))
        object.__setattr__(self, "_gram", gram)

    def __hash__(self):
        return hash((self.ident, self.dim, self.structure))

    # operations on coordinate vectors (entries may be scalars or polynomials)
    def bracket(self, x, y):
        acc = [None] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, row in self._table[i]:
                yj = y[j]
                if not yj:
                    continue
                p = xi * yj
                for k, c in row:
                    t = p * c
                    acc[k] = t if acc[k] is None else acc[k] + t
        z = _zero_like(x, y)
        return [z if a is None else a for a in acc]

    def pair(self, x, y):
        acc = None
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, g in self._gram[i]:
                yj = y[j]
                if yj:
                    t = xi * yj * g
                    acc = t if acc is None else acc + t
        return _zero_like(x, y) if acc is None else acc

    def tau(self, x):
        return [conj_entry(v) for v in x]

    def ad_matrix(self, x):
        """Matrix of ad_x (columns are ad_x e_j)."""
        d = self.dim
        cols = []
        for j in range(d):
            e = [ZERO] * d
            e[j] = ONE
            cols.append([as_gr(v) for v in self.bracket(x, e)])
        return transpose(cols)

    def basis_vector(self, k: int):
        e = [ZERO] * self.dim
        e[k] = ONE
        return e

    def is_real(self) -> bool:
        return all(x.is_real() for p in self.structure for r in p for x in r) and all(
            x.is_real() for r in self.metric for x in r
        )

    def standard_cartan(self):
        return [self.basis_vector(k) for k in self.cartan_hint]

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        br = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if any(self.structure[i][j]):
                    br.append([i + 1, j + 1, [str(x) for x in self.structure[i][j]]])
        return {
            "dim": self.dim,
            "basisNames": list(self.names),
            "brackets": br,
            "metric": [[str(x) for x in row] for row in self.metric],
            "cartan": [k + 1 for k in self.cartan_hint],
            "id": self.ident,
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticLieAlgebra":
        try:
            d = int(data["dim"])
            c = [[[ZERO] * d for _ in range(d)] for _ in range(d)]
            for i, j, coeffs in data.get("brackets", []):
                i, j = int(i) - 1, int(j) - 1
                if len(coeffs) != d or not (0 <= i < d and 0 <= j < d):
                    raise InvalidInput(f"bad bracket entry for ({i + 1},{j + 1})")
                vals = [as_gr(x) for x in coeffs]
                c[i][j] = vals
                c[j][i] = [-v for v in vals]
            metric = [[as_gr(x) for x in row] for row in data["metric"]]
            names = tuple(data.get("basisNames", ()))
            hint = tuple(int(k) - 1 for k in data.get("cartan", ()))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed algebra file: {exc}") from exc
        return cls(d, c, metric, names, data.get("id", "custom"), hint)


def _zero_like(x, y):
    for v in itertools.chain(x, y):
        if not isinstance(v, GaussianRational):
            return v * 0
    return ZERO


# ---------------------------------------------------------------------------
# constructions


def _mat_units(n):
    def unit(a, b, c=ONE):
        m = [[ZERO] * n for _ in range(n)]
        m[a][b] = as_gr(c)
        return m

    return unit


def _mat_add(A, B, s=ONE):
    return [[a + s * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_prod(A, B):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), ZERO) for j in range(n)] for i in range(n)]


def _from_matrix_basis(mats, ident, names, cartan_hint):
    d = len(mats)
    flat = [[x for row in m for x in row] for m in mats]
    cols = transpose(flat)  # n^2 x d

    def coords(M):
        x = solve(cols, [v for row in M for v in row])
        if x is None:
            raise InvalidInput("matrix basis is not closed under the commutator")
        return x

    c = [[[ZERO] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            comm = _mat_add(_mat_prod(mats[i], mats[j]), _mat_prod(mats[j], mats[i]), -ONE)
            v = coords(comm)
            c[i][j] = v
            c[j][i] = [-x for x in v]
    metric = killing_from_structure(d, c)
    return QuadraticLieAlgebra(d, c, metric, names, ident, cartan_hint)


def killing_from_structure(d, c):
    """K(e_a, e_b) = tr(ad_a ad_b) computed from structure constants."""
    K = [[ZERO] * d for _ in range(d)]
    for a in range(d):
        for b in range(a, d):
            s = ZERO
            for j in range(d):
                for k in range(d):
                    x = c[a][j][k]
                    if x:
                        y = c[b][k][j]
                        if y:
                            s = s + x * y
            K[a][b] = K[b][a] = s
    return K


@lru_cache(maxsize=None)
def build_su(n: int) -> QuadraticLieAlgebra:
    """Compact su(n) with the Killing metric.

    Basis: for each a < b the pair -i(E_ab + E_ba), E_ba - E_ab; then the
    diagonal Cartan generators -i(E_kk - E_{k+1,k+1}).  For n = 2 this is
    e_k = -i*sigma_k, so [e1, e2] = 2 e3 cyclically.
    """
    if n < 2:
        raise InvalidInput("su(n) needs n >= 2")
    unit = _mat_units(n)
    mats, names = [], []
    for a in range(n):
        for b in range(a + 1, n):
            mats.append(_mat_add(unit(a, b, -I), unit(b, a, -I)))
            mats.append(_mat_add(unit(b, a), unit(a, b), -ONE))
            names += [f"x{a + 1}{b + 1}", f"y{a + 1}{b + 1}"]
    off = len(mats)
    for k in range(n - 1):
        mats.append(_mat_add(unit(k, k, -I), unit(k + 1, k + 1, I)))
        names.append(f"h{k + 1}")
    if n == 2:
        names = ["e1", "e2", "e3"]
    return _from_matrix_basis(mats, f"su{n}", tuple(names), tuple(range(off, len(mats))))


def direct_sum(g1: QuadraticLieAlgebra, g2: QuadraticLieAlgebra, sign2=1, ident=None) -> QuadraticLieAlgebra:
    d1, d2 = g1.dim, g2.dim
    d = d1 + d2
    c = [[[ZERO] * d for _ in range(d)] for _ in range(d)]
    for i in range(d1):
        for j in range(d1):
            for k in range(d1):
                c[i][j][k] = g1.structure[i][j][k]
    for i in range(d2):
        for j in range(d2):
            for k in range(d2):
                c[d1 + i][d1 + j][d1 + k] = g2.structure[i][j][k]
    g = [[ZERO] * d for _ in range(d)]
    for i in range(d1):
        for j in range(d1):
            g[i][j] = g1.metric[i][j]
    for i in range(d2):
        for j in range(d2):
            g[d1 + i][d1 + j] = g2.metric[i][j] * sign2
    names = tuple(f"({n},0)" for n in g1.names) + tuple(f"(0,{n})" for n in g2.names)
    hint = tuple(g1.cartan_hint) + tuple(d1 + k for k in g2.cartan_hint)
    return QuadraticLieAlgebra(d, c, g, names, ident or f"{g1.ident}+{g2.ident}", hint)


@lru_cache(maxsize=None)
def neutral_double(g: QuadraticLieAlgebra, ident: str | None = None) -> QuadraticLieAlgebra:
    """g + g with metric (K, -K), K the Killing form of g."""
    K = killing_from_structure(g.dim, g.structure)
    if span_dim(K) < g.dim:
        raise InvalidInput("Killing form is degenerate; algebra is not semisimple")
    gk = QuadraticLieAlgebra(g.dim, g.structure, K, g.names, g.ident, g.cartan_hint)
    return direct_sum(gk, gk, -1, ident=ident or f"{g.ident}x2")


def abelian(dim: int, metric) -> QuadraticLieAlgebra:
    zero = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    return QuadraticLieAlgebra(dim, zero, metric, (), f"abelian{dim}", tuple(range(dim)))


def get_algebra(ref: str) -> QuadraticLieAlgebra:
    """Resolve built-in names: su<n> and the neutral double su<n>x<n>
    (su<n>x2 is accepted as well)."""
    key = ref.strip().lower().replace("(", "").replace(")", "")
    m = re.fullmatch(r"su(\d+)(?:x(\d+))?", key)
    if m:
        n = int(m.group(1))
        if m.group(2) is None:
            return build_su(n)
        if int(m.group(2)) in (n, 2):
            return neutral_double(build_su(n), ident=f"su{n}x{n}")
    raise InvalidInput(f"unknown algebra reference {ref!r}")


# ---------------------------------------------------------------------------
# validation


def signature(metric) -> tuple[int, int] | None:
    """(positive, negative) inertia of a real symmetric matrix, by
    congruence diagonalization; None if the matrix is not real."""
    M = [[as_gr(x) for x in row] for row in metric]
    if any(not x.is_real() for row in M for x in row):
        return None
    A = [[x.re for x in row] for row in M]
    n = len(A)
    pos = neg = 0
    idx = list(range(n))
    while idx:
        k = next((i for i in idx if A[i][i] != 0), None)
        if k is None:
            pair = next(((i, j) for i in idx for j in idx if i != j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2*A[i][j] != 0
            for m in range(n):
                A[i][m] += A[j][m]
            for m in range(n):
                A[m][i] += A[m][j]
            k = i
        p = A[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = [i for i in idx if i != k]
        for i in rest:
            f = A[i][k] / p
            if f:
                for m in range(n):
                    A[i][m] -= f * A[k][m]
        for i in rest:
            A[i][k] = A[k][i] = Fraction(0)
        idx = rest
    return pos, neg


def _derivation_rows(g: QuadraticLieAlgebra):
    """Linear equations on D (unknown D[k][m] at column k*d+m) expressing
    that D is a skew-symmetric derivation."""
    d = g.dim
    c = g.structure
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                row: dict = {}
                # D[e_i,e_j]_k = sum_m c_ij^m D[k][m]
                for m in range(d):
                    if c[i][j][m]:
                        row[k * d + m] = row.get(k * d + m, ZERO) + c[i][j][m]
                # - [D e_i, e_j]_k = - sum_m D[m][i] c_mj^k
                for m in range(d):
                    if c[m][j][k]:
                        row[m * d + i] = row.get(m * d + i, ZERO) - c[m][j][k]
                    if c[i][m][k]:
                        row[m * d + j] = row.get(m * d + j, ZERO) - c[i][m][k]
                row = {a: v for a, v in row.items() if v}
                if row:
                    yield row
    G = g.metric
    for i in range(d):
        for j in range(i, d):
            row = {}
            # <D e_i, e_j> + <e_i, D e_j> = sum_m D[m][i] G[m][j] + G[i][m] D[m][j]
            for m in range(d):
                if G[m][j]:
                    row[m * d + i] = row.get(m * d + i, ZERO) + G[m][j]
                if G[i][m]:
                    row[m * d + j] = row.get(m * d + j, ZERO) + G[i][m]
            row = {a: v for a, v in row.items() if v}
            if row:
                yield row


@lru_cache(maxsize=None)
def der_sk_dim(g: QuadraticLieAlgebra) -> int:
    return g.dim * g.dim - sparse_rank(_derivation_rows(g))


@lru_cache(maxsize=None)
def validate_quadratic(g: QuadraticLieAlgebra) -> dict:
    d = g.dim
    E = [g.basis_vector(k) for k in range(d)]
    jacobi = True
    for i, j, k in itertools.combinations(range(d), 3):
        a = g.bracket(E[i], g.bracket(E[j], E[k]))
        b = g.bracket(E[j], g.bracket(E[k], E[i]))
        c = g.bracket(E[k], g.bracket(E[i], E[j]))
        if any(x + y + z for x, y, z in zip(a, b, c)):
            jacobi = False
            break
    antisym = all(
        g.structure[i][j][k] == -g.structure[j][i][k] for i in range(d) for j in range(d) for k in range(d)
    )
    symmetric = all(g.metric[i][j] == g.metric[j][i] for i in range(d) for j in range(d))
    inv = True
    for i in range(d):
        for j in range(d):
            bij = g.bracket(E[i], E[j])
            for k in range(d):
                if g.pair(bij, E[k]) + g.pair(E[j], g.bracket(E[i], E[k])):
                    inv = False
                    break
            if not inv:
                break
        if not inv:
            break
    nondeg = span_dim(g.metric) == d
    sig = signature(g.metric) if nondeg else None
    brackets = [g.bracket(E[i], E[j]) for i in range(d) for j in range(i + 1, d)]
    perfect = span_dim(brackets) == d if brackets else d == 0
    ad_rank = span_dim([[x for row in g.ad_matrix(E[k]) for x in row] for k in range(d)])
    essential = bool(jacobi and inv and ad_rank == d and der_sk_dim(g) == d)
    return {
        "jacobi": bool(jacobi and antisym),
        "adInvariance": bool(inv and symmetric),
        "nondegenerate": bool(nondeg),
        "signature": list(sig) if sig is not None else None,
        "perfect": bool(perfect),
        "essential": essential,
    }


# ---------------------------------------------------------------------------
# root systems


def _charpoly(A):
    """Coefficients [c_0, ..., c_n] of det(x I - A) (Faddeev-LeVerrier)."""
    n = len(A)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    M = [[ZERO] * n for _ in range(n)]
    for k in range(1, n + 1):
        AM = [[sum((A[i][m] * M[m][j] for m in range(n) if A[i][m] and M[m][j]), ZERO) for j in range(n)] for i in range(n)]
        for i in range(n):
            AM[i][i] = AM[i][i] + coeffs[n - k + 1]
        M = AM
        tr = sum((sum((A[i][m] * M[m][i] for m in range(n) if A[i][m] and M[m][i]), ZERO) for i in range(n)), ZERO)
        coeffs[n - k] = -tr / k
    return coeffs


def _divisors(n: int):
    n = abs(n)
    out = set()
    for a in range(1, math.isqrt(n) + 1):
        if n % a == 0:
            out.add(a)
            out.add(n // a)
    return out


def _rational_roots(coeffs):
    """Rational roots (with multiplicity) of a polynomial given by rational
    coefficients [c_0..c_n]."""
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    roots = []
    while cs and cs[0] == 0:
        roots.append(Fraction(0))
        cs.pop(0)
    if len(cs) <= 1:
        return roots
    lcm = 1
    for c in cs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in cs]
    cands = {Fraction(s * p, q) for p in _divisors(ints[0]) for q in _divisors(ints[-1]) for s in (1, -1)}
    for r in sorted(cands):
        while len(ints) > 1:
            # synthetic division by (x - r)
            val, quot = Fraction(0), []
            for c in reversed(ints):
                val = val * r + c
                quot.append(val)
            if quot[-1] != 0:
                break
            roots.append(r)
            q = list(reversed(quot[:-1]))
            den = 1
            for c in q:
                den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
            ints = [int(Fraction(c) * den) for c in q]
    return roots


def _imaginary_eigenvalues(A):
    """Eigenvalues of A known to be of the form i*lambda, lambda rational."""
    cp = _charpoly(A)
    n = len(cp) - 1
    # p(i y) = sum c_k i^k y^k; split into real and imaginary parts
    ipow = [ONE, I, -ONE, -I]
    q = [cp[k] * ipow[k % 4] for k in range(n + 1)]
    re_part = [c.re for c in q]
    im_part = [c.im for c in q]
    base = re_part if any(re_part) else im_part
    roots = _rational_roots(base)
    good = []
    for r in roots:
        val_re = sum((c * r ** k for k, c in enumerate(re_part)), Fraction(0))
        val_im = sum((c * r ** k for k, c in enumerate(im_part)), Fraction(0))
        if val_re == 0 and val_im == 0:
            good.append(r)
    return sorted(set(good))


_SMALL_PRIMES = [q for q in range(2, 2000) if all(q % r for r in range(2, math.isqrt(q) + 1))]


def _probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES[:20]:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in _SMALL_PRIMES[:20]:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _partial_factor(n: int):
    """(factors, cofactor): prime powers found by trial division and a probable
    prime test, plus whatever composite part is left unfactored."""
    fac = {}
    for q in _SMALL_PRIMES:
        if q * q > n:
            break
        while n % q == 0:
            fac[q] = fac.get(q, 0) + 1
            n //= q
    if n > 1 and (n < _SMALL_PRIMES[-1] ** 2 or _probable_prime(n)):
        fac[n] = fac.get(n, 0) + 1
        n = 1
    return fac, n


def _two_squares_prime(p: int):
    """x^2 + y^2 = p for a prime p = 1 mod 4 (Cornacchia), or None."""
    if p == 2:
        return 1, 1
    for c in range(2, 200):
        t = pow(c, (p - 1) // 4, p)
        if t * t % p == p - 1:
            break
    else:
        return None
    a, b = p, t
    while b * b > p:
        a, b = b, a % b
    rest = p - b * b
    r = math.isqrt(rest)
    return (b, r) if r * r == rest else None


def _norm_part(n: int):
    """Split n = z * conj(z) * residual with z a Gaussian integer, making the
    residual as small as the partial factorisation allows."""
    fac, cof = _partial_factor(n)
    z = GaussianRational(1)
    residual = cof
    for q, e in fac.items():
        if q % 4 == 3 or (q > 2 and _two_squares_prime(q) is None):
            z = z * q ** (e // 2)
            residual *= q ** (e % 2)
            continue
        x, y = (1, 1) if q == 2 else _two_squares_prime(q)
        z = z * GaussianRational(x, y) ** e
    return z, residual


def _sum_two_squares(n: int):
    z, residual = _norm_part(n)
    if residual != 1:
        return None
    return abs(z.re.numerator), abs(z.im.numerator)


def _norm_scale(N: Fraction) -> tuple[GaussianRational, Fraction]:
    """c in Q(i) making |c|^2 * N as small as possible; returns (c, |c|^2 N).

    The result is 1 exactly when N is a norm from Q(i) (up to composite
    cofactors that resist the cheap factorisation)."""
    p, q = N.numerator, N.denominator
    # N = (pq) / q^2 and pq = |z|^2 * residual
    z, residual = _norm_part(p * q)
    c = GaussianRational(q) / z
    return c, Fraction(residual)


def _phase_fix(v):
    """Multiply by a unit of Q(i) so that the first non-zero coordinate is a
    positive rational when its modulus is rational, otherwise has positive
    real part (positive imaginary part if the real part vanishes)."""
    z = next(x for x in v if x)
    n2 = z.norm2()
    r = Fraction(math.isqrt(n2.numerator), math.isqrt(n2.denominator))
    if r * r == n2:
        u = z.conj() / r
        return [u * x for x in v]
    for u in (ONE, -ONE, I, -I):
        w = u * z
        if w.re > 0 or (w.re == 0 and w.im > 0):
            return [u * x for x in v]
    return v


@dataclass(frozen=True)
class RootSystem:
    algebra: QuadraticLieAlgebra
    cartan: tuple  # real basis vectors of the Cartan subalgebra
    roots: tuple  # each root: tuple of values on the Cartan basis
    positive: tuple
    simple: tuple
    root_vectors: dict
    dual_vectors: dict  # H_alpha, <H_alpha, h> = alpha(h)
    dual_basis: dict  # tilde H for simple roots: alpha_j(tilde H_i) = delta_ij
    structure_constants: dict  # (alpha, beta) -> N with [E_a, E_b] = N E_{a+b}
    pairing: dict  # alpha -> <E_alpha, E_-alpha>
    tau_pairing: dict  # alpha -> <E_alpha, tau E_alpha>

    def __hash__(self):
        return hash((self.algebra, self.cartan, self.roots))

    @property
    def rank(self) -> int:
        return len(self.cartan)

    def neg(self, a):
        return tuple(-x for x in a)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def is_root(self, a) -> bool:
        return a in self.root_vectors

    def value(self, alpha, h):
        """alpha(h) for h in the complexified Cartan (given in algebra
        coordinates)."""
        coords = self.cartan_coords(h)
        return sum((a * c for a, c in zip(alpha, coords)), ZERO)

    def cartan_coords(self, h):
        x = solve(transpose([list(c) for c in self.cartan]), [as_gr(v) for v in h])
        if x is None:
            raise InvalidInput("vector is not in the Cartan subalgebra")
        return x

    def cartan_complex_basis(self):
        return [list(c) for c in self.cartan]

    def span_vectors(self, roots):
        return [list(self.root_vectors[a]) for a in roots]

    def root_label(self, a) -> str:
        return "(" + ",".join(str(x) for x in a) + ")"

    def to_json(self) -> dict:
        lab = self.root_label
        return {
            "cartan": [[str(x) for x in c] for c in self.cartan],
            "roots": [lab(a) for a in self.roots],
            "positive": [lab(a) for a in self.positive],
            "simple": [lab(a) for a in self.simple],
            "rootVectors": {lab(a): [str(x) for x in v] for a, v in self.root_vectors.items()},
            "dualVectors": {lab(a): [str(x) for x in v] for a, v in self.dual_vectors.items()},
            "dualBasis": {lab(a): [str(x) for x in v] for a, v in self.dual_basis.items()},
            "pairing": {lab(a): str(v) for a, v in self.pairing.items()},
            "tauPairing": {lab(a): str(v) for a, v in self.tau_pairing.items()},
            "structureConstants": {
                f"{lab(a)}|{lab(b)}": str(v) for (a, b), v in self.structure_constants.items()
            },
        }


def _restrict(A, S):
    """Matrix of A restricted to the invariant subspace spanned by S."""
    cols = transpose(S) if S else []
    out = []
    for s in S:
        x = solve(cols, mat_vec(A, s))
        if x is None:
            raise UnsupportedCartan("Cartan elements do not preserve a joint eigenspace")
        out.append(x)
    return transpose(out)


def _lex_positive(alpha) -> bool:
    for x in alpha:
        v = (x / I).re if x else Fraction(0)
        if v:
            return v > 0
    return False


def root_space_decomposition(g: QuadraticLieAlgebra, cartan=None, positive=None) -> RootSystem:
    """Joint eigenspace decomposition for a compact Cartan basis, with root
    vectors normalized so that tau(E_a) = -E_{-a} and structure constants
    are real."""
    cartan = [list(map(as_gr, h)) for h in (cartan if cartan is not None else g.standard_cartan())]
    if not cartan:
        raise InvalidInput("empty Cartan basis")
    if not g.is_real():
        raise InvalidInput("only compact real forms given in a real basis are supported")
    for h in cartan:
        if any(not x.is_real() for x in h):
            raise InvalidInput("Cartan basis must be real")
    for h1, h2 in itertools.combinations(cartan, 2):
        if any(g.bracket(h1, h2)):
            raise InvalidInput("Cartan basis elements do not commute")
    d = g.dim
    pieces = [((), [g.basis_vector(k) for k in range(d)])]
    for h in cartan:
        A = g.ad_matrix(h)
        new = []
        for label, S in pieces:
            B = _restrict(A, S)
            found = 0
            for lam in _imaginary_eigenvalues(B):
                mu = I * lam
                shifted = [[B[i][j] - (mu if i == j else ZERO) for j in range(len(B))] for i in range(len(B))]
                K = kernel(shifted)
                if K:
                    vecs = [[sum((k[a] * S[a][m] for a in range(len(S))), ZERO) for m in range(d)] for k in K]
                    new.append((label + (mu,), vecs))
                    found += len(K)
            if found != len(S):
                raise UnsupportedCartan(
                    "ad(h) is not diagonalizable with eigenvalues in i*Q on a joint eigenspace",
                    witness={"h": [str(x) for x in h]},
                )
        pieces = new
    zero = tuple(ZERO for _ in cartan)
    roots, spaces = [], {}
    for label, vecs in pieces:
        if label == zero:
            if len(vecs) != len(cartan):
                raise UnsupportedCartan("centralizer of the Cartan basis is larger than its span")
            continue
        if len(vecs) > 1:
            raise NotSemisimpleCartan(
                "root space of dimension > 1", witness={"root": [str(x) for x in label]}
            )
        roots.append(label)
        spaces[label] = vecs[0]
    neg = lambda a: tuple(-x for x in a)
    add = lambda a, b: tuple(x + y for x, y in zip(a, b))
    if any(neg(a) not in spaces for a in roots):
        raise UnsupportedCartan("roots do not come in +/- pairs")
    if positive is None:
        positive = [a for a in roots if _lex_positive(a)]
    positive = sorted((tuple(a) for a in positive), key=lambda a: [-(x / I).re for x in a])
    pos_set = set(positive)
    simple = [a for a in positive if not any(add(b, c) == a for b in positive for c in positive)]
    roots.sort(key=lambda a: (a not in pos_set, [-abs((x / I).re) for x in a], [-(x / I).re for x in a]))

    # Gram matrix of the Cartan basis, for H_alpha
    G = [[g.pair(a, b) for b in cartan] for a in cartan]

    def dual(alpha):
        x = solve(G, list(alpha))
        return [sum((x[k] * cartan[k][m] for k in range(len(cartan))), ZERO) for m in range(d)]

    E: dict = {}

    def set_pair(a, v):
        E[a] = v
        E[neg(a)] = [-x for x in g.tau(v)]

    # simple roots: phase-fixed eigenvectors
    height = {}
    for a in simple:
        v = spaces[a]
        N = -g.pair(v, g.tau(v))
        if not N.is_real() or N.re == 0:
            raise UnsupportedCartan("metric degenerates on a root space pair")
        c, _ = _norm_scale(abs(N.re))
        set_pair(a, _phase_fix([c * x for x in v]))
        height[a] = 1
    # remaining positive roots by height, as brackets with simple roots
    pending = [a for a in positive if a not in E]
    guard = 0
    while pending:
        guard += 1
        if guard > len(positive) + 2:
            raise UnsupportedCartan("positive roots are not generated by the simple roots")
        for a in list(pending):
            for s in simple:
                b = tuple(x - y for x, y in zip(a, s))
                if b in E and b in pos_set:
                    v = g.bracket(E[s], E[b])
                    N = -g.pair(v, g.tau(v))
                    p, q = abs(N.re.numerator), N.re.denominator
                    m = p * q
                    sq = 1
                    for f in range(2, math.isqrt(m) + 1):
                        while m % (f * f) == 0:
                            m //= f * f
                            sq *= f
                    # real positive rescaling removes square factors of the pairing
                    set_pair(a, [x * Fraction(q, sq) for x in v])
                    pending.remove(a)
                    break
    for a in roots:
        if a not in E:
            raise UnsupportedCartan("root not reached from the simple roots")

    pairing = {a: g.pair(E[a], E[neg(a)]) for a in roots}
    tau_pairing = {a: g.pair(E[a], g.tau(E[a])) for a in roots}
    Hd = {a: dual(a) for a in roots}
    rset = set(roots)
    Ntab = {}
    for a in roots:
        for b in roots:
            s = add(a, b)
            if s in rset:
                v = g.bracket(E[a], E[b])
                target = E[s]
                k = next(i for i, x in enumerate(target) if x)
                Ntab[(a, b)] = v[k] / target[k]
    # tilde H: alpha_j(tH_i) = delta_ij, inside the Cartan
    r = len(cartan)
    tH = {}
    if len(simple) == r:
        Amat = [list(s) for s in simple]  # rows: alpha_j values on cartan basis
        for i, s in enumerate(simple):
            x = solve(Amat, [ONE if j == i else ZERO for j in range(r)])
            tH[s] = [sum((x[k] * cartan[k][m] for k in range(r)), ZERO) for m in range(d)]
    return RootSystem(
        g, tuple(tuple(h) for h in cartan), tuple(roots), tuple(positive), tuple(simple),
        {a: tuple(v) for a, v in E.items()}, {a: tuple(v) for a, v in Hd.items()},
        {a: tuple(v) for a, v in tH.items()}, Ntab, pairing, tau_pairing,
    )


@lru_cache(maxsize=None)
def standard_roots(g: QuadraticLieAlgebra) -> RootSystem:
    return root_space_decomposition(g)


def root_space_basis(R: RootSystem, roots):
    return [list(R.root_vectors[a]) for a in roots]


def check_positive_system(R0, R: RootSystem) -> bool:
    R0 = {tuple(a) for a in R0}
    allr = set(R.roots)
    if not R0 <= allr:
        return False
    negs = {R.neg(a) for a in R0}
    if R0 & negs:
        return False
    if R0 | negs != allr:
        return False
    for a in R0:
        for b in R0:
            s = R.add(a, b)
            if s in allr and s not in R0:
                return False
    return True
