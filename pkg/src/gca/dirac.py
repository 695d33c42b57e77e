"""Pointwise Dirac structures of (V + V* + g)^C.

A vector of V + V* + g is stored as one coordinate list [X | xi | r] of
length 2m + dim g, m = dim V.  The pairing is
<X + xi + r, Y + eta + s> = (1/2)(xi(Y) + eta(X)) + <r, s>.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidInput
from .exactnum import (
    I as IMAG,
    ONE,
    ZERO,
    GaussianRational,
    as_gr,
    kernel,
    mat_inv,
    random_scalar,
    rref,
    solve,
    span_basis,
    span_dim,
    span_equal,
    span_intersection,
    transpose,
)
from .liealg import QuadraticLieAlgebra, _norm_scale, get_algebra
from .report import Certificate

HALF = GaussianRational(Fraction(1, 2))


# ---------------------------------------------------------------------------
# small vector helpers


def _dot(x, y):
    return sum((a * b for a, b in zip(x, y) if a and b), ZERO)


def _bil(G, x, y):
    """x^T G y."""
    acc = ZERO
    for i, xi in enumerate(x):
        if xi:
            row = G[i]
            for j, yj in enumerate(y):
                if yj and row[j]:
                    acc = acc + xi * row[j] * yj
    return acc


def _comb(coeffs, vectors, dim):
    out = [ZERO] * dim
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in enumerate(v):
                if x:
                    out[k] = out[k] + c * x
    return out


def _conj(v):
    return [x.conj() for x in v]


def _re(v):
    return [x.real for x in v]


def _im(v):
    return [x.imag for x in v]


def _g(v):
    return [as_gr(x) for x in v]


def ambient_gram(m: int, G):
    """Gram matrix of the pairing on V + V* + g."""
    d = len(G)
    N = 2 * m + d
    Q = [[ZERO] * N for _ in range(N)]
    for k in range(m):
        Q[k][m + k] = HALF
        Q[m + k][k] = HALF
    for i in range(d):
        for j in range(d):
            Q[2 * m + i][2 * m + j] = as_gr(G[i][j])
    return Q


# ---------------------------------------------------------------------------
# quadruples


@dataclass(frozen=True)
class DiracQuadruple:
    """(W, sigma, D, eps): ``sigma[i]`` is the image of ``W[i]`` and ``eps`` is
    the Gram matrix of the 2-form on the basis of W."""

    m: int
    algebra: QuadraticLieAlgebra
    W: tuple
    sigma: tuple
    D: tuple
    eps: tuple

    def __post_init__(self):
        d = self.algebra.dim
        W = tuple(tuple(_g(v)) for v in self.W)
        sigma = tuple(tuple(_g(v)) for v in self.sigma)
        D = tuple(tuple(_g(v)) for v in self.D)
        eps = tuple(tuple(_g(r)) for r in self.eps)
        k = len(W)
        if any(len(v) != self.m for v in W) or span_dim(W) != k:
            raise InvalidInput("W must be a basis of vectors in V^C")
        if len(sigma) != k or any(len(v) != d for v in sigma):
            raise InvalidInput("sigma needs one algebra vector per basis vector of W")
        if len(eps) != k or any(len(r) != k for r in eps):
            raise InvalidInput("eps must be a k x k matrix on the basis of W")
        if any(eps[i][j] != -eps[j][i] for i in range(k) for j in range(k)):
            raise InvalidInput("eps must be antisymmetric")
        if 2 * len(D) != d or span_dim(D) != len(D):
            raise InvalidInput("D must be a basis of a half-dimensional subspace")
        G = self.algebra.metric
        for a in range(len(D)):
            for b in range(a, len(D)):
                if _bil(G, D[a], D[b]):
                    raise InvalidInput("D is not isotropic", witness={"pair": [a + 1, b + 1]})
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "eps", eps)

    @property
    def k(self):
        return len(self.W)

    def with_(self, **kw) -> "DiracQuadruple":
        base = dict(m=self.m, algebra=self.algebra, W=self.W, sigma=self.sigma, D=self.D, eps=self.eps)
        base.update(kw)
        return DiracQuadruple(**base)

    def to_json(self) -> dict:
        s = lambda M: [[str(x) for x in r] for r in M]  # noqa: E731
        g = self.algebra
        return {
            "V_dim": self.m,
            "algebraRef": g.ident if g.ident != "custom" else g.to_json(),
            "W": s(self.W),
            "sigma": s(self.sigma),
            "D": s(self.D),
            "eps": s(self.eps),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DiracQuadruple":
        try:
            ref = data["algebraRef"]
            g = get_algebra(ref) if isinstance(ref, str) else QuadraticLieAlgebra.from_json(ref)
            conv = lambda M: [[as_gr(x) for x in r] for r in M]  # noqa: E731
            W = conv(data.get("W", []))
            k = len(W)
            sigma = conv(data.get("sigma", [])) or [[ZERO] * g.dim for _ in range(k)]
            eps = conv(data.get("eps", [])) or [[ZERO] * k for _ in range(k)]
            return cls(int(data["V_dim"]), g, W, sigma, conv(data["D"]), eps)
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed quadruple file: {exc}") from exc


def _xi_solve(W, values, m):
    """Some covector xi in (V^C)^* with xi(W[j]) = values[j]."""
    if not W:
        return [ZERO] * m
    x = solve([list(w) for w in W], list(values))
    if x is None:
        raise InvalidInput("W is not linearly independent")
    return x


def annihilator(W, m: int):
    return kernel([list(w) for w in W]) if W else [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]


def build_L(q: DiracQuadruple) -> list[list[GaussianRational]]:
    """Basis of L(W, sigma, D, eps), of length m + dim(g)/2."""
    g, m, d = q.algebra, q.m, q.algebra.dim
    G = g.metric
    out = []
    for i, X in enumerate(q.W):
        vals = [2 * q.eps[i][j] - _bil(G, q.sigma[j], q.sigma[i]) for j in range(q.k)]
        xi = _xi_solve(q.W, vals, m)
        out.append(list(X) + xi + list(q.sigma[i]))
    for r in q.D:
        vals = [-2 * _bil(G, q.sigma[j], r) for j in range(q.k)]
        xi = _xi_solve(q.W, vals, m)
        out.append([ZERO] * m + xi + list(r))
    for a in annihilator(q.W, m):
        out.append([ZERO] * m + list(a) + [ZERO] * d)
    return out


def is_isotropic(basis, Q) -> bool:
    return all(not _bil(Q, u, v) for u, v in itertools.combinations_with_replacement(basis, 2))


def is_maximal_isotropic(basis, m: int, G) -> bool:
    N = 2 * m + len(G)
    return 2 * span_dim(basis) == N and is_isotropic(basis, ambient_gram(m, G))


def extract_quadruple(L, m: int, algebra, complement=None) -> DiracQuadruple:
    """Recover (W, sigma, D, eps) from a maximal isotropic L.

    The complement of ker(pi_V|L) is chosen greedily in the order of the
    given basis; ``complement`` (a basis of a complement of D in g^C) then
    optionally moves sigma into it."""
    G = algebra.metric
    d = algebra.dim
    L = [_g(v) for v in L]
    if not L or not is_maximal_isotropic(L, m, G):
        raise InvalidInput("input is not a maximal isotropic subspace")
    L = span_basis(L)
    Xs = [v[:m] for v in L]
    picked, acc = [], []
    for i, X in enumerate(Xs):
        if span_dim(acc + [X]) > len(acc):
            acc.append(X)
            picked.append(i)
    kerc = kernel(transpose(Xs)) if Xs else []
    Dvecs = span_basis([_comb(c, [v[2 * m:] for v in L], d) for c in kerc]) if kerc else []
    W = [L[i][:m] for i in picked]
    sigma0 = [L[i][2 * m:] for i in picked]
    xis = [L[i][m:2 * m] for i in picked]
    k = len(W)
    eps = [[ZERO] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            # eps'(X_i, X_j) = xi_i(X_j)/2 since the r-part of the picked element is sigma0(X_i)
            e_ij = HALF * _dot(xis[i], W[j])
            e_ji = HALF * _dot(xis[j], W[i])
            eps[i][j] = HALF * (e_ij - e_ji)
    q = DiracQuadruple(m, algebra, W, sigma0, Dvecs, eps)
    if complement is not None:
        q = normalize_sigma(q, complement)
    return q


def _wedge_pair(G, gamma, sigma):
    """<gamma ^ sigma>(X_i, X_j) = <gamma X_i, sigma X_j> - <gamma X_j, sigma X_i>."""
    k = len(gamma)
    return [[_bil(G, gamma[i], sigma[j]) - _bil(G, gamma[j], sigma[i]) for j in range(k)] for i in range(k)]


def affine_action(q: DiracQuadruple, gamma) -> DiracQuadruple:
    """T_gamma(W, sigma, D, eps) = (W, sigma + gamma, D, eps - <gamma ^ sigma>/2)."""
    gamma = [_g(v) for v in gamma]
    if len(gamma) != q.k:
        raise InvalidInput("gamma needs one image per basis vector of W")
    for v in gamma:
        if any(v) and solve(transpose([list(x) for x in q.D]), v) is None:
            raise InvalidInput("gamma must take values in D")
    G = q.algebra.metric
    wp = _wedge_pair(G, gamma, q.sigma)
    sigma = [[a + b for a, b in zip(s, c)] for s, c in zip(q.sigma, gamma)]
    eps = [[q.eps[i][j] - HALF * wp[i][j] for j in range(q.k)] for i in range(q.k)]
    return q.with_(sigma=sigma, eps=eps)


def normalize_sigma(q: DiracQuadruple, complement) -> DiracQuadruple:
    """The unique orbit representative with sigma taking values in ``complement``."""
    C = [_g(v) for v in complement]
    nd = len(q.D)
    if len(C) + nd != q.algebra.dim:
        raise InvalidInput("complement has the wrong dimension")
    cols = transpose([list(v) for v in q.D] + C)
    gamma = []
    for s in q.sigma:
        x = solve(cols, list(s))
        if x is None:
            raise InvalidInput("complement and D do not span the algebra")
        gamma.append([-c for c in _comb(x[:nd], q.D, q.algebra.dim)])
    return affine_action(q, gamma)


# ---------------------------------------------------------------------------
# adapted bases


@dataclass
class AdaptedBasis:
    """v, w span D; v, vt are real; <v_a, vt_b> = delta_ab and
    <w_c, tau w_c> = eps_c * kappa_c, where w_c / sqrt(kappa_c) is the
    normalised vector (kappa_c = 1 unless kappa_c is not a norm from Q(i))."""

    v: list
    vt: list
    w: list
    signs: list
    kappa: list
    gram_ok: bool = True

    @property
    def p(self):
        return len(self.v)

    @property
    def q(self):
        return len(self.w)

    @property
    def tau_w(self):
        return [_conj(x) for x in self.w]

    def complement(self):
        return self.vt + self.tau_w

    def basis(self):
        return self.v + self.w + self.vt + self.tau_w

    def h(self, c):
        """<w_c, tau w_c> of the stored (unnormalised) vector."""
        return self.signs[c] * self.kappa[c]

    def to_json(self) -> dict:
        s = lambda M: [[str(x) for x in r] for r in M]  # noqa: E731
        return {
            "p": self.p,
            "q": self.q,
            "v": s(self.v),
            "vTilde": s(self.vt),
            "w": s(self.w),
            "tauW": s(self.tau_w),
            "signs": list(self.signs),
            "kappa": [str(k) for k in self.kappa],
        }


def _real_part_of_intersection(D):
    """Real basis of the real form of D cap tau(D)."""
    I = span_intersection(D, [_conj(v) for v in D])
    if not I:
        return []
    reals = []
    for v in I:
        reals.append(_re(v))
        reals.append(_im(v))
    return span_basis([r for r in reals if any(r)])


def adapted_basis(D, G) -> AdaptedBasis:
    """Adapted basis of a maximal isotropic D in (R^N)^C with metric G."""
    D = [_g(v) for v in D]
    N = len(G)
    if 2 * len(D) != N or span_dim(D) != len(D):
        raise InvalidInput("D must be a basis of a half-dimensional subspace")
    for a, b in itertools.combinations_with_replacement(range(len(D)), 2):
        if _bil(G, D[a], D[b]):
            raise InvalidInput("D is not isotropic")
    V = _real_part_of_intersection(D)
    p = len(V)
    vt = []
    if p:
        # u_b in span{G v_c}; <v_a, u_b> = delta_ab; then make them isotropic
        Gv = [[_dot(row, v) for row in G] for v in V]
        M = [[_bil(G, V[a], Gv[c]) for c in range(p)] for a in range(p)]
        Minv = mat_inv(M)
        U = [_comb([Minv[c][b] for c in range(p)], Gv, N) for b in range(p)]
        for b in range(p):
            corr = [-HALF * _bil(G, U[b], U[c]) for c in range(p)]
            vt.append([x + y for x, y in zip(U[b], _comb(corr, V, N))])
    # D-tilde = D cap ((N + P)^perp)^C
    if p:
        rows = [[_dot(v, col) for col in zip(*G)] for v in V + vt]
        perp = kernel(rows)
        Dt = span_intersection(D, perp)
    else:
        Dt = [list(v) for v in D]
    w, hs = [], []
    rest = Dt
    while rest:
        cand = _pick_w(rest, G)
        if cand is None:
            raise InvalidInput("hermitian form vanishes on the remaining isotropic piece",
                               witness={"remaining": len(rest)})
        x, h = cand
        c, kappa = _norm_scale(abs(h.re))
        x = [c * t for t in x]
        h = _bil(G, x, _conj(x))
        w.append(x)
        hs.append(h.re)
        # remaining piece: {y in rest : <y, tau x> = 0}
        if len(rest) == 1:
            break
        coeff_rows = [[_bil(G, y, _conj(x)) for y in rest]]
        K = kernel(coeff_rows)
        rest = span_basis([_comb(kv, rest, N) for kv in K])
    order = sorted(range(len(w)), key=lambda c: 0 if hs[c] > 0 else 1)
    w = [w[c] for c in order]
    hs = [hs[c] for c in order]
    signs = [1 if h > 0 else -1 for h in hs]
    kappa = [abs(h) for h in hs]
    ab = AdaptedBasis([list(v) for v in V], vt, w, signs, kappa)
    ab.gram_ok = adapted_gram_ok(ab, G, D)
    return ab


def _pick_w(rest, G):
    """A vector x in span(rest) with <x, tau x> != 0, preferring values
    whose modulus is a norm from Q(i) (else the smallest leftover factor);
    polarization over sums with coefficients 1 and i guarantees a hit when
    one exists."""
    cands = list(rest)
    for a, b in itertools.combinations(range(len(rest)), 2):
        for c in (ONE, IMAG):
            cands.append([x + c * y for x, y in zip(rest[a], rest[b])])
    best, best_res = None, None
    for x in cands:
        h = _bil(G, x, _conj(x))
        if not h:
            continue
        _, res = _norm_scale(abs(h.re))
        if res == 1:
            return x, h
        if best is None or res < best_res:
            best, best_res = (x, h), res
    return best


def adapted_gram(ab: AdaptedBasis, G):
    """Gram matrix of the normalised basis (v, w, vt, tau w); entries with a
    sqrt(kappa) factor are divided through, which is exact since they only
    pair w_c with tau w_c."""
    B = ab.basis()
    p, q = ab.p, ab.q
    scale = [Fraction(1)] * (2 * p + 2 * q)
    for c in range(q):
        scale[p + c] = ab.kappa[c]
        scale[2 * p + q + c] = ab.kappa[c]
    n = len(B)
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            x = _bil(G, B[i], B[j])
            if not x:
                continue
            if scale[i] != 1 or scale[j] != 1:
                # only the (w_c, tau w_c) blocks may carry a radical; their product is kappa_c
                if scale[i] != scale[j]:
                    out[i][j] = None
                    continue
                x = x / scale[i]
            out[i][j] = x
    return out


def expected_gram(p: int, q: int, signs):
    n = 2 * (p + q)
    M = [[ZERO] * n for _ in range(n)]
    for a in range(p):
        M[a][p + q + a] = ONE
        M[p + q + a][a] = ONE
    for c in range(q):
        M[p + c][2 * p + q + c] = as_gr(signs[c])
        M[2 * p + q + c][p + c] = as_gr(signs[c])
    return M


def adapted_gram_ok(ab: AdaptedBasis, G, D) -> bool:
    if not span_equal(ab.v + ab.w, D):
        return False
    if any(any(x.imag for x in v) for v in ab.v + ab.vt):
        return False
    # the radical-carrying pairing entries must be the only non-zero ones off the expected blocks
    gram = adapted_gram(ab, G)
    exp = expected_gram(ab.p, ab.q, ab.signs)
    for i in range(len(exp)):
        for j in range(len(exp)):
            if gram[i][j] is None or gram[i][j] != exp[i][j]:
                return False
    return True


# ---------------------------------------------------------------------------
# real index


def real_index(L) -> int:
    """dim_C(L cap conj L) = 2 dim L - rank[L; conj L]."""
    L = [_g(v) for v in L]
    return 2 * span_dim(L) - span_dim(L + [_conj(v) for v in L])


@dataclass
class IndexZeroReport:
    verdict: bool
    condition: str | None
    p: int
    q: int
    delta: list
    delta0: list
    lambdas: list
    betas: list
    omega: list | None
    oracle_index: int
    adapted: AdaptedBasis | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        s = lambda M: [[str(x) for x in r] for r in M]  # noqa: E731
        out = {
            "verdict": self.verdict,
            "failingCondition": self.condition,
            "p": self.p,
            "q": self.q,
            "dimDelta": len(self.delta),
            "dimDelta0": len(self.delta0),
            "Delta": s(self.delta),
            "Delta0": s(self.delta0),
            "lambdas": s(self.lambdas),
            "betas": s(self.betas),
            "omega": s(self.omega) if self.omega is not None else None,
            "oracleRealIndex": self.oracle_index,
            "oracleAgrees": (self.oracle_index == 0) == self.verdict,
        }
        out.update(self.details)
        return out


def _real_subspace(S):
    """Real basis of S cap R^m for a conjugation-invariant complex subspace S."""
    reals = []
    for v in S:
        reals.append(_re(v))
        reals.append(_im(v))
    return span_basis([r for r in reals if any(r)])


def check_index_zero(q: DiracQuadruple, adapted: AdaptedBasis | None = None) -> IndexZeroReport:
    """Real-index-zero test in the adapted complement, with the kernel oracle
    computed alongside."""
    g, m = q.algebra, q.m
    G = g.metric
    oracle = real_index(build_L(q))
    ab = adapted if adapted is not None else adapted_basis(q.D, G)
    qn = normalize_sigma(q, ab.complement())
    W, k = [list(v) for v in qn.W], qn.k
    Wbar = [_conj(v) for v in W]

    def report(verdict, cond, delta=(), delta0=(), lam=(), bet=(), omega=None, **details):
        return IndexZeroReport(verdict, cond, ab.p, ab.q, list(delta), list(delta0), list(lam), list(bet),
                               omega, oracle, ab, details)

    if span_dim(W + Wbar) != m:
        return report(False, "A: W + conj(W) != V^C")
    # coefficients of sigma in the basis (vt, tau w)
    C = ab.complement()
    Ccols = transpose(C) if C else []
    lam = [[ZERO] * k for _ in range(ab.p)]
    bet = [[ZERO] * k for _ in range(ab.q)]
    for i, s in enumerate(qn.sigma):
        if not C:
            continue
        x = solve(Ccols, list(s))
        for a in range(ab.p):
            lam[a][i] = x[a]
        for c in range(ab.q):
            bet[c][i] = x[ab.p + c]
    delta = _real_subspace(span_intersection(W, Wbar))
    if not delta:
        ok = ab.p == 0
        return report(ok, None if ok else "i: Delta = 0 but D meets its conjugate", lam=lam, bet=bet)
    # W-coordinates of the Delta basis
    Wcols = transpose(W)
    coords = [solve(Wcols, list(x)) for x in delta]

    def on(form_row, c):
        return _dot(form_row, c)

    im_lam = [[on(lam[a], c).imag for c in coords] for a in range(ab.p)]
    if ab.p and span_dim(im_lam) != ab.p:
        return report(False, "B: Im(lambda_i) restricted to Delta are dependent", delta, lam=lam, bet=bet)
    nd = len(delta)
    if ab.p:
        K0 = kernel(im_lam)
        delta0 = [_comb(kv, delta, m) for kv in K0]
    else:
        delta0 = [list(x) for x in delta]
    coords0 = [solve(Wcols, list(x)) for x in delta0]

    def omega(cx, cy):
        e = _bil(qn.eps, cx, cy).imag
        for c in range(ab.q):
            bx, by = on(bet[c], cx), on(bet[c], cy)
            e = e + GaussianRational(ab.h(c)) * (bx * by.conj()).imag
        return e

    om = [[omega(cx, cy) for cy in coords] for cx in coords]
    om0 = [[omega(cx, cy) for cy in coords0] for cx in coords0]
    nondeg = span_dim(om0) == len(delta0) if delta0 else True
    if not nondeg:
        return report(False, "C: omega degenerate on Delta0", delta, delta0, lam, bet, om)
    return report(True, None, delta, delta0, lam, bet, om, dimDeltaEven=len(delta0) % 2 == 0)


def J_from_L(L, m: int, G):
    """Real skew complex structure with +i eigenspace L."""
    L = span_basis([_g(v) for v in L])
    if real_index(L) != 0:
        raise InvalidInput("L has non-zero real index")
    N = 2 * m + len(G)
    if 2 * len(L) != N:
        raise InvalidInput("L is not half-dimensional")
    P = transpose(L + [_conj(v) for v in L])
    Pinv = mat_inv(P)
    h = len(L)
    D = [IMAG] * h + [-IMAG] * h
    PD = [[P[i][j] * D[j] for j in range(N)] for i in range(N)]
    return [[sum((PD[i][k] * Pinv[k][j] for k in range(N)), ZERO) for j in range(N)] for i in range(N)]


def check_J(J, L, m: int, G) -> Certificate:
    cert = Certificate("complex-structure")
    N = len(J)
    Q = ambient_gram(m, G)
    J2 = [[sum((J[i][k] * J[k][j] for k in range(N)), ZERO) for j in range(N)] for i in range(N)]
    cert.record("square", all(J2[i][j] == (-1 if i == j else 0) for i in range(N) for j in range(N)))
    skew = all(
        sum((J[k][i] * Q[k][j] + Q[i][k] * J[k][j] for k in range(N)), ZERO) == 0
        for i in range(N) for j in range(N)
    )
    cert.record("skew", skew)
    cert.record("real", all(x.is_real() for r in J for x in r))
    eig = all(
        [sum((J[i][k] * v[k] for k in range(N)), ZERO) for i in range(N)] == [IMAG * x for x in v]
        for v in L
    )
    cert.record("eigenspace", eig)
    return cert


# ---------------------------------------------------------------------------
# random generation


def cayley_orthogonal(G, rng: random.Random, complex_coeffs: bool = False, bound: int = 2):
    """(I - S)(I + S)^{-1} for a random G-skew S: preserves G."""
    N = len(G)
    Ginv = mat_inv(G)
    while True:
        A = [[ZERO] * N for _ in range(N)]
        for i in range(N):
            for j in range(i + 1, N):
                if rng.random() < 0.6:
                    x = random_scalar(rng, complex_coeffs, bound)
                    A[i][j], A[j][i] = x, -x
        S = [[sum((Ginv[i][k] * A[k][j] for k in range(N)), ZERO) for j in range(N)] for i in range(N)]
        IpS = [[(ONE if i == j else ZERO) + S[i][j] for j in range(N)] for i in range(N)]
        if span_dim(IpS) < N:
            continue
        ImS = [[(ONE if i == j else ZERO) - S[i][j] for j in range(N)] for i in range(N)]
        inv = mat_inv(IpS)
        return [[sum((ImS[i][k] * inv[k][j] for k in range(N)), ZERO) for j in range(N)] for i in range(N)]


def _diagonal_frame(G):
    """Rational basis f with G(f_i, f_j) = d_i delta_ij (congruence)."""
    N = len(G)
    G = [[as_gr(x) for x in r] for r in G]
    basis = [[ONE if i == j else ZERO for j in range(N)] for i in range(N)]
    out = []
    rest = basis
    while rest:
        x = next((v for v in rest if _bil(G, v, v)), None)
        if x is None:
            for a, b in itertools.combinations(range(len(rest)), 2):
                y = [s + t for s, t in zip(rest[a], rest[b])]
                if _bil(G, y, y):
                    x = y
                    break
        if x is None:
            raise InvalidInput("degenerate metric")
        out.append(x)
        K = kernel([[_bil(G, y, x) for y in rest]])
        rest = span_basis([_comb(kv, rest, N) for kv in K]) if len(rest) > 1 else []
    return out, [_bil(G, f, f).re for f in out]


def _sqrt_q(x: Fraction):
    from math import isqrt
    a, b = x.numerator, x.denominator
    if a < 0:
        return None
    ra, rb = isqrt(a), isqrt(b)
    return Fraction(ra, rb) if ra * ra == a and rb * rb == b else None


def standard_isotropic(G, p: int):
    """A maximal isotropic D with dim_R of the real part of D cap tau(D)
    equal to p, from a diagonal frame whose entries have square ratios."""
    f, d = _diagonal_frame(G)
    pos = [i for i in range(len(d)) if d[i] > 0]
    neg = [i for i in range(len(d)) if d[i] < 0]
    if len(pos) != len(neg):
        raise InvalidInput("metric is not neutral")
    k = len(pos)
    if (k - p) % 2 or p > k:
        raise InvalidInput("p must have the parity of half the dimension")
    N = len(G)
    out = []

    def ratio(i, j, sign):
        r = _sqrt_q(sign * d[i] / d[j])
        if r is None:
            raise InvalidInput("diagonal entries do not have square ratios")
        return r

    for t in range(p):
        i, j = pos[t], neg[t]
        c = ratio(i, j, -1)
        out.append([a + c * b for a, b in zip(f[i], f[j])])
    for t in range(p, k, 2):
        for group in (pos, neg):
            i, j = group[t], group[t + 1]
            c = ratio(i, j, 1)
            out.append([a + IMAG * c * b for a, b in zip(f[i], f[j])])
    assert len(out) == N // 2
    return out


def random_max_isotropic(G, rng: random.Random, p: int | None = None):
    """Random maximal isotropic subspace with prescribed p (random if None)."""
    N = len(G)
    k = N // 2
    if p is None:
        p = rng.choice([x for x in range(k + 1) if (k - x) % 2 == 0])
    D0 = standard_isotropic(G, p)
    O = cayley_orthogonal(G, rng)
    D = [[sum((O[i][j] * v[j] for j in range(N)), ZERO) for i in range(N)] for v in D0]
    # hide the construction behind a random change of basis inside D
    while True:
        C = [[random_scalar(rng, True, 2) for _ in range(k)] for _ in range(k)]
        if span_dim(C) == k:
            break
    return [_comb(C[a], D, N) for a in range(k)], p


def random_quadruple(m: int, algebra, rng: random.Random, k: int | None = None, p: int | None = None,
                     real_W: bool = False) -> DiracQuadruple:
    d = algebra.dim
    k = rng.randint(0, m) if k is None else k
    while True:
        W = [[random_scalar(rng, not real_W, 2) for _ in range(m)] for _ in range(k)]
        if span_dim(W) == k:
            break
    sigma = [[random_scalar(rng, True, 2) if rng.random() < 0.5 else ZERO for _ in range(d)] for _ in range(k)]
    eps = [[ZERO] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            x = random_scalar(rng, True, 2)
            eps[i][j], eps[j][i] = x, -x
    D, _ = random_max_isotropic(algebra.metric, rng, p)
    return DiracQuadruple(m, algebra, W, sigma, D, eps)


def _structured_W(m, d, rng):
    """W with real part Delta of dimension d and W + conj(W) = V^C; needs
    m - d even.  Returns (W basis, m)."""
    while True:
        basis = [[random_scalar(rng, False, 3) for _ in range(m)] for _ in range(m)]
        if span_dim(basis) == m:
            break
    W = basis[:d]
    rest = basis[d:]
    for j in range(0, len(rest), 2):
        W.append([a + IMAG * b for a, b in zip(rest[j], rest[j + 1])])
    return W


NEGATIVE_KINDS = ("A", "i", "B", "parity", "C")


def engineered_quadruple(m: int, algebra, rng: random.Random, positive: bool, kind: str | None = None):
    """Quadruple built to have (positive) or to miss (negative) real index zero.

    Positives take dim Delta - p even and generic sigma, eps.  Negatives
    break one condition on purpose: ``kind`` picks A (W too small), i
    (Delta = 0 while D meets its conjugate), B (Im sigma vanishes on Delta),
    parity (odd dim Delta_0) or C (omega = 0 on Delta_0).  Returns None when
    the requested kind does not fit the dimensions."""
    G = algebra.metric
    d_g = algebra.dim
    half = d_g // 2
    ps = [x for x in range(half + 1) if (half - x) % 2 == 0]
    p = rng.choice(ps)
    D, p = random_max_isotropic(G, rng, p)
    ab = adapted_basis(D, G)
    C = ab.complement()

    def gen_sigma(k, real=False):
        return [_comb([random_scalar(rng, not real, 2) for _ in C], C, d_g) for _ in range(k)]

    def gen_eps(k, real=False):
        e = [[ZERO] * k for _ in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                x = random_scalar(rng, not real, 2)
                e[i][j], e[j][i] = x, -x
        return e

    if positive:
        dims = [d for d in range(p, m + 1) if (m - d) % 2 == 0 and (d - p) % 2 == 0 and (d > 0 or p == 0)]
        if not dims:
            return None
        d = rng.choice(dims)
        W = _structured_W(m, d, rng)
        k = len(W)
        # Im(lambda)|Delta = [I | 0], beta = 0 on Delta_0, Im(eps) symplectic there
        sigma = []
        for b in range(k):
            lam = [random_scalar(rng, b >= d, 2) + (IMAG if b == a else ZERO) for a in range(ab.p)]
            bet = [ZERO if p <= b < d else random_scalar(rng, True, 2) for _ in range(ab.q)]
            sigma.append(_comb(lam + bet, C, d_g))
        eps = gen_eps(k)
        for b in range(p, d):
            for c in range(p, d):
                if b != c:
                    eps[b][c] = eps[b][c].real
        for b in range(p, d - 1, 2):
            eps[b][b + 1] = eps[b][b + 1] + IMAG
            eps[b + 1][b] = -eps[b][b + 1]
        return DiracQuadruple(m, algebra, W, sigma, D, eps)
    kind = kind or rng.choice(NEGATIVE_KINDS)
    if kind == "A":
        k = rng.randint(0, (m - 1) // 2)
        W = [[random_scalar(rng, True, 2) for _ in range(m)] for _ in range(k)]
        if span_dim(W) < k:
            return None
        return DiracQuadruple(m, algebra, W, gen_sigma(k), D, gen_eps(k))
    if kind == "i":
        if p == 0 or m % 2:
            return None
        W = _structured_W(m, 0, rng)
        return DiracQuadruple(m, algebra, W, gen_sigma(len(W)), D, gen_eps(len(W)))
    dims = [d for d in range(1, m + 1) if (m - d) % 2 == 0]
    if kind == "B":
        if p == 0 or not dims:
            return None
        d = rng.choice(dims)
        W = _structured_W(m, d, rng)
        # sigma real on the real part, so Im(lambda) vanishes on Delta
        sigma = gen_sigma(d, real=True) + gen_sigma(len(W) - d)
        return DiracQuadruple(m, algebra, W, sigma, D, gen_eps(len(W)))
    if kind == "parity":
        dims = [d for d in dims if (d - p) % 2 == 1 and d >= p]
        if not dims:
            return None
        d = rng.choice(dims)
        W = _structured_W(m, d, rng)
        return DiracQuadruple(m, algebra, W, gen_sigma(len(W)), D, gen_eps(len(W)))
    if kind == "C":
        dims = [d for d in dims if (d - p) % 2 == 0 and d > p]
        if not dims or ab.q:
            return None
        # q = 0: omega reduces to Im(eps), which vanishes for real eps on Delta
        d = rng.choice(dims)
        W = _structured_W(m, d, rng)
        k = len(W)
        eps = gen_eps(k, real=True)
        for i in range(d, k):
            for j in range(k):
                if i != j:
                    eps[i][j] = ZERO
                    eps[j][i] = ZERO
        return DiracQuadruple(m, algebra, W, gen_sigma(k), D, eps)
    raise InvalidInput(f"unknown negative kind {kind!r}")
