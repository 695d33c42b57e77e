"""Parabolic subalgebras, admissible systems and Lagrangian subalgebras of
the complexified double g + g with metric (K, -K).

Vectors of the double are stored as length 2d coordinate lists, the first
d entries for the first factor.  Both factors share one root system R; the
second parabolic may use a different positive system.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .dirac import adapted_basis, random_max_isotropic, standard_isotropic
from .errors import InvalidInput
from .exactnum import (
    ONE,
    ZERO,
    GaussianRational,
    as_gr,
    in_span,
    kernel,
    parse_scalar,
    solve,
    span_basis,
    span_dim,
    span_equal,
    span_intersection,
    transpose,
)
from .liealg import QuadraticLieAlgebra, RootSystem, check_positive_system, neutral_double, standard_roots
from .report import Certificate

HALF = GaussianRational(Fraction(1, 2))


def _lin(coeffs, vecs, d):
    out = [ZERO] * d
    for c, v in zip(coeffs, vecs):
        if c:
            for i, x in enumerate(v):
                if x:
                    out[i] = out[i] + c * x
    return out


def _conj(v):
    return [x.conj() for x in v]


def _embed(x, y, d):
    return [as_gr(a) for a in (x if x is not None else [ZERO] * d)] + [
        as_gr(a) for a in (y if y is not None else [ZERO] * d)
    ]


def simple_roots_of(Rplus):
    pos = set(Rplus)
    add = lambda a, b: tuple(x + y for x, y in zip(a, b))
    return tuple(a for a in Rplus if not any(add(b, c) == a for b in pos for c in pos))


# ---------------------------------------------------------------------------
# parabolic data


@dataclass(frozen=True)
class ParabolicData:
    R: RootSystem
    Rplus: tuple
    S: tuple
    bracket_S: tuple  # roots in the integer span of S
    nilradical: tuple
    levi: tuple  # H_alpha (alpha in S) followed by E_alpha (alpha in [S])
    center: tuple

    @property
    def algebra(self) -> QuadraticLieAlgebra:
        return self.R.algebra

    @property
    def dim(self) -> int:
        return len(self.nilradical) + len(self.levi) + len(self.center)

    def basis(self):
        return [list(v) for v in self.nilradical + self.levi + self.center]

    def s_coords(self, alpha):
        """Integer coordinates of a root of [S] in terms of S, or None."""
        if not self.S:
            return None
        x = solve(transpose([list(s) for s in self.S]), list(alpha))
        if x is None or any(not c.is_real() or c.re.denominator != 1 for c in x):
            return None
        return x

    def check(self) -> Certificate:
        g = self.algebra
        cert = Certificate("parabolic")
        B = self.basis()
        cert.record("directSum", span_dim(B) == len(B))
        exp = self.R.rank + len(self.Rplus) + sum(1 for a in self.bracket_S if a not in set(self.Rplus))
        cert.record("dimension", len(B) == exp, {"dim": len(B), "expected": exp})
        parts = {"n": self.nilradical, "mm": self.levi, "xi": self.center}
        for (na, A), (nb, Bs) in itertools.combinations(parts.items(), 2):
            bad = next(((i, j) for (i, x), (j, y) in itertools.product(enumerate(A), enumerate(Bs))
                        if g.pair(x, y)), None)
            cert.record(f"orthogonal:{na},{nb}", bad is None, bad and [bad[0] + 1, bad[1] + 1])
        bad = next(((i, j) for i, x in enumerate(self.nilradical) for j, y in enumerate(self.nilradical)
                    if g.pair(x, y)), None)
        cert.record("nilradicalIsotropic", bad is None, bad and [bad[0] + 1, bad[1] + 1])
        # p is a subalgebra and n an ideal in it
        nil = [list(v) for v in self.nilradical]
        ok_p = all(in_span(B, g.bracket(x, y)) for x, y in itertools.combinations(B, 2))
        ok_n = all(in_span(nil, g.bracket(x, y)) for x in B for y in nil) if nil else True
        cert.record("subalgebra", ok_p)
        cert.record("nilradicalIdeal", ok_n)
        return cert

    def to_json(self) -> dict:
        lab = self.R.root_label
        return {
            "Rplus": [lab(a) for a in self.Rplus],
            "S": [lab(a) for a in self.S],
            "bracketS": [lab(a) for a in self.bracket_S],
            "dims": {"n": len(self.nilradical), "mm": len(self.levi), "xi": len(self.center)},
        }


def build_parabolic(R: RootSystem, Rplus=None, S=()) -> ParabolicData:
    Rplus = tuple(tuple(a) for a in (Rplus if Rplus is not None else R.positive))
    if not check_positive_system(Rplus, R):
        raise InvalidInput("Rplus is not a positive system of R")
    simple = simple_roots_of(Rplus)
    S = tuple(tuple(a) for a in S)
    lab = R.root_label
    for a in S:
        if a not in simple:
            raise InvalidInput("S must consist of simple roots of Rplus", witness={"root": lab(a)})
    if len(set(S)) != len(S):
        raise InvalidInput("S has repeated roots")
    cols = transpose([list(s) for s in S]) if S else None

    def in_S_span(a):
        if not S:
            return False
        x = solve(cols, list(a))
        return x is not None and all(c.is_real() and c.re.denominator == 1 for c in x)

    bS = tuple(a for a in R.roots if in_S_span(a))
    nil = tuple(R.root_vectors[a] for a in Rplus if a not in bS)
    levi = tuple(R.dual_vectors[a] for a in S) + tuple(R.root_vectors[a] for a in bS)
    d = R.algebra.dim
    if S:
        ker = kernel([list(a) for a in S])
        center = tuple(tuple(_lin(k, R.cartan, d)) for k in ker)
    else:
        center = tuple(R.cartan)
    return ParabolicData(R, Rplus, S, bS, nil, levi, center)


def levi_center_split(p: ParabolicData, x):
    """(x_n, x_[m,m], x_xi) with x = x_n + x_[m,m] + x_xi."""
    x = [as_gr(v) for v in x]
    B = p.basis()
    c = solve(transpose(B), x)
    if c is None:
        raise InvalidInput("element is not in the parabolic subalgebra")
    a, b = len(p.nilradical), len(p.levi)
    d = p.algebra.dim
    xn = _lin(c[:a], p.nilradical, d)
    xm = _lin(c[a:a + b], p.levi, d)
    xz = _lin(c[a + b:], p.center, d)
    return xn, xm, xz


# ---------------------------------------------------------------------------
# admissible systems


@dataclass(frozen=True)
class AdmissibleSystem:
    p: ParabolicData
    pPrime: ParabolicData
    d: dict  # simple root in S -> simple root in T
    phases: dict  # root in [S] -> mu_alpha
    V: tuple  # basis of a subspace of xi + xi', double coordinates
    _dbar: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.p.R.algebra != self.pPrime.R.algebra:
            raise InvalidInput("both parabolics must live in the same algebra")
        dd = {tuple(a): tuple(b) for a, b in self.d.items()}
        ph = {tuple(a): as_gr(v) for a, v in self.phases.items()}
        object.__setattr__(self, "d", dd)
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "V", tuple(tuple(as_gr(x) for x in v) for v in self.V))
        ext = {}
        for a in self.p.bracket_S:
            c = self.p.s_coords(a)
            img = None
            if c is not None and all(s in dd for s in self.p.S):
                img = tuple(sum((ci * dd[s][k] for ci, s in zip(c, self.p.S)), ZERO)
                            for k in range(self.p.R.rank))
            ext[a] = img
        object.__setattr__(self, "_dbar", ext)

    @property
    def algebra(self) -> QuadraticLieAlgebra:
        return self.p.algebra

    @property
    def double(self) -> QuadraticLieAlgebra:
        return neutral_double(self.algebra)

    @property
    def T(self):
        return self.pPrime.S

    def d_of(self, alpha):
        return self._dbar.get(tuple(alpha))

    def image_basis(self):
        """mu applied to the Levi basis of p, or None where d is undefined."""
        R = self.pPrime.R
        out = []
        for a in self.p.S:
            b = self.d.get(a)
            out.append(None if b not in R.dual_vectors else list(R.dual_vectors[b]))
        for a in self.p.bracket_S:
            b = self.d_of(a)
            if b is None or b not in R.root_vectors or a not in self.phases:
                out.append(None)
            else:
                out.append([self.phases[a] * x for x in R.root_vectors[b]])
        return out

    def mu(self, x):
        """mu on an element of [m,m]."""
        x = [as_gr(v) for v in x]
        L = [list(v) for v in self.p.levi]
        c = solve(transpose(L), x) if L else ([] if not any(x) else None)
        if c is None:
            raise InvalidInput("element is not in the Levi part [m,m]")
        imgs = self.image_basis()
        if any(v is None for v in imgs):
            raise InvalidInput("mu is not defined on all of [m,m]")
        return _lin(c, imgs, self.algebra.dim)

    def validate(self) -> Certificate:
        g, R = self.algebra, self.p.R
        lab = R.root_label
        cert = Certificate("admissible-system")
        S, T = self.p.S, self.pPrime.S
        vals = list(self.d.values())
        bij = set(self.d) == set(S) and set(vals) == set(T) and len(set(vals)) == len(vals) == len(T)
        if not cert.record("dBijection", bij, {"S": [lab(a) for a in S], "T": [lab(a) for a in T]}):
            return cert
        bT = set(self.pPrime.bracket_S)
        imgs = [self.d_of(a) for a in self.p.bracket_S]
        ok = all(b in bT for b in imgs) and len(set(imgs)) == len(bT)
        bad = next((lab(a) for a, b in zip(self.p.bracket_S, imgs) if b not in bT), None)
        if not cert.record("dOnRoots", ok, bad and {"root": bad}):
            return cert
        missing = [lab(a) for a in self.p.bracket_S if a not in self.phases]
        if not cert.record("phasesComplete", not missing, missing and {"missing": missing}):
            return cert
        ph = self.phases
        bad = next((a for a in self.p.bracket_S if ph[a] * ph[a].conj() != 1), None)
        cert.record("unit", bad is None, bad and {"root": lab(bad), "phase": str(ph[bad])})
        bad = next((a for a in self.p.bracket_S if ph[R.neg(a)] != ph[a].conj()), None)
        cert.record("conjugation", bad is None, bad and {"root": lab(bad), "phase": str(ph[bad]),
                                                         "negPhase": str(ph[R.neg(bad)])})
        Np = self.pPrime.R.structure_constants
        bad = None
        for a, b in itertools.product(self.p.bracket_S, repeat=2):
            s = R.add(a, b)
            if s in ph:
                lhs = ph[s] * R.structure_constants[(a, b)]
                rhs = Np[(self.d_of(a), self.d_of(b))] * ph[a] * ph[b]
                if lhs != rhs:
                    bad = {"alpha": lab(a), "beta": lab(b)}
                    break
        cert.record("cocycle", bad is None, bad)
        # mu is a Lie algebra map on the Levi basis
        L, imgs = [list(v) for v in self.p.levi], self.image_basis()
        bad = None
        for i, j in itertools.combinations(range(len(L)), 2):
            lhs = self.mu(g.bracket(L[i], L[j]))
            if lhs != g.bracket(imgs[i], imgs[j]):
                bad = {"pair": [i + 1, j + 1]}
                break
        cert.record("homomorphism", bad is None, bad)
        cert.record("isometry", all(g.pair(L[i], L[j]) == g.pair(imgs[i], imgs[j])
                                    for i in range(len(L)) for j in range(len(L))))
        self._check_V(cert)
        return cert

    def center_space(self):
        d = self.algebra.dim
        return [_embed(z, None, d) for z in self.p.center] + [_embed(None, z, d) for z in self.pPrime.center]

    def _check_V(self, cert):
        dbl = self.double
        Z = self.center_space()
        V = [list(v) for v in self.V]
        inside = all(in_span(Z, v) for v in V) if V else True
        cert.record("VInCenter", inside)
        cert.record("VIndependent", span_dim(V) == len(V) if V else True)
        cert.record("VHalfDimension", 2 * len(V) == len(Z), {"dimV": len(V), "dimCenter": len(Z)})
        bad = next(((i, j) for i, j in itertools.combinations_with_replacement(range(len(V)), 2)
                    if dbl.pair(V[i], V[j])), None)
        cert.record("VIsotropic", bad is None, bad and {"pair": [bad[0] + 1, bad[1] + 1]})

    def to_json(self) -> dict:
        lab = self.p.R.root_label
        return {
            "algebraRef": self.algebra.ident,
            "Rplus": [lab(a) for a in self.p.Rplus],
            "RplusPrime": [lab(a) for a in self.pPrime.Rplus],
            "S": [lab(a) for a in self.p.S],
            "T": [lab(a) for a in self.pPrime.S],
            "d": {lab(a): lab(b) for a, b in self.d.items()},
            "phases": {lab(a): str(v) for a, v in self.phases.items()},
            "V": [[str(x) for x in v] for v in self.V],
        }


def _parse_root(R: RootSystem, text: str):
    for a in R.roots:
        if R.root_label(a) == text.replace(" ", ""):
            return a
    raise InvalidInput(f"unknown root label {text!r}")


def system_from_json(data: dict, g: QuadraticLieAlgebra) -> AdmissibleSystem:
    try:
        R = standard_roots(g)
        pr = lambda t: _parse_root(R, t)
        Rp = [pr(t) for t in data["Rplus"]] if "Rplus" in data else None
        Rpp = [pr(t) for t in data["RplusPrime"]] if "RplusPrime" in data else [R.neg(a) for a in R.positive]
        p = build_parabolic(R, Rp, [pr(t) for t in data.get("S", [])])
        pp = build_parabolic(R, Rpp, [pr(t) for t in data.get("T", [])])
        d = {pr(a): pr(b) for a, b in data.get("d", {}).items()}
        ph = {pr(a): parse_scalar(str(v)) for a, v in data.get("phases", {}).items()}
        V = [[parse_scalar(str(x)) for x in v] for v in data.get("V", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed lagrangian system: {exc}") from exc
    return AdmissibleSystem(p, pp, d, ph, V)


# ---------------------------------------------------------------------------
# Lagrangian subalgebras


def lagrangian_certificate(dbl: QuadraticLieAlgebra, basis) -> Certificate:
    """Dimension, isotropy and bracket closure of a subspace of the double."""
    cert = Certificate("lagrangian")
    B = [list(v) for v in basis]
    cert.record("dimension", 2 * span_dim(B) == dbl.dim and len(B) == span_dim(B),
                {"dim": span_dim(B), "ambient": dbl.dim})
    bad = next(((i, j) for i, j in itertools.combinations_with_replacement(range(len(B)), 2)
                if dbl.pair(B[i], B[j])), None)
    cert.record("isotropic", bad is None, bad and {"pair": [bad[0] + 1, bad[1] + 1]})
    bad = next(((i, j) for i, j in itertools.combinations(range(len(B)), 2)
                if not in_span(B, dbl.bracket(B[i], B[j]))), None)
    cert.record("closed", bad is None, bad and {"pair": [bad[0] + 1, bad[1] + 1]})
    return cert


def build_lagrangian(sys: AdmissibleSystem):
    """Solve the defining conditions on p x p'.  Returns (basis or None,
    certificate)."""
    val = sys.validate()
    cert = Certificate("lagrangian")
    cert.details["system"] = val.to_json()
    if not val.ok:
        cert.record("admissible", False, {"failure": val.failure, "witness": val.witness})
        return None, cert
    cert.record("admissible", True)
    g = sys.algebra
    d = g.dim
    P, Q = sys.p, sys.pPrime
    nP, nQ, nV = P.dim, Q.dim, len(sys.V)
    a, b = len(P.nilradical), len(P.levi)
    a2, b2 = len(Q.nilradical), len(Q.levi)
    imgs = sys.image_basis()
    Pb, Qb = P.basis(), Q.basis()
    # unknowns: coefficients on the basis of p, of p', and of V
    rows = []
    # mu(x_[m,m]) - x'_[m',m'] = 0
    for k in range(d):
        row = [ZERO] * (nP + nQ + nV)
        for j in range(b):
            row[a + j] = imgs[j][k]
        for j in range(b2):
            row[nP + a2 + j] = -Q.levi[j][k]
        rows.append(row)
    # (x_xi, x'_xi') - sum t_j V_j = 0
    for k in range(2 * d):
        row = [ZERO] * (nP + nQ + nV)
        if k < d:
            for j, z in enumerate(P.center):
                row[a + b + j] = as_gr(z[k])
        else:
            for j, z in enumerate(Q.center):
                row[nP + a2 + b2 + j] = as_gr(z[k - d])
        for j, v in enumerate(sys.V):
            row[nP + nQ + j] = -v[k]
        rows.append(row)
    sols = kernel(rows)
    vecs = [_embed(_lin(s[:nP], Pb, d), _lin(s[nP:nP + nQ], Qb, d), 2 * d) for s in sols]
    basis = span_basis(vecs)
    lc = lagrangian_certificate(sys.double, basis)
    for k, v in lc.checks.items():
        cert.record(k, v, lc.witness if lc.failure == k else None)
    return basis, cert


def is_weak_regular(sys: AdmissibleSystem) -> bool:
    """mu is a Levi isomorphism that commutes with conjugation; both Cartans
    are compact by construction."""
    try:
        imgs = sys.image_basis()
    except InvalidInput:
        return False
    if any(v is None for v in imgs):
        return False
    val = sys.validate()
    if not (val.checks.get("dOnRoots") and val.checks.get("homomorphism")):
        return False
    for x, mx in zip(sys.p.levi, imgs):
        try:
            if sys.mu(sys.algebra.tau(list(x))) != sys.algebra.tau(mx):
                return False
        except InvalidInput:
            return False
    return True


def isotropic_complement(V, Z, G_pair):
    """An isotropic complement of a Lagrangian V inside the nondegenerate
    space Z."""
    V = [list(v) for v in V]
    Z = [list(z) for z in Z]
    k = len(V)
    if not k:
        return []
    M = [[G_pair(v, z) for z in Z] for v in V]
    U = []
    for j in range(k):
        c = solve(M, [ONE if i == j else ZERO for i in range(k)])
        if c is None:
            raise InvalidInput("V is not dual to a complement; the center is degenerate")
        U.append(_lin(c, Z, len(Z[0])))
    n = len(U[0])
    out = []
    for j in range(k):
        corr = [HALF * G_pair(U[j], U[l]) for l in range(k)]
        out.append([U[j][i] - sum((corr[l] * V[l][i] for l in range(k)), ZERO) for i in range(n)])
    return out


@dataclass
class WeakRegularSpan:
    D: list
    C: list
    DcapDbar: list
    certificate: Certificate

    def to_json(self) -> dict:
        s = lambda B: [[str(x) for x in v] for v in B]
        return {"D": s(self.D), "C": s(self.C), "DcapDbar": s(self.DcapDbar),
                "certificate": self.certificate.to_json()}


def weak_regular_span(sys: AdmissibleSystem) -> WeakRegularSpan:
    """Explicit D, its complement C and D cap conj(D) for a weak-regular
    system whose second positive system is the negative of the first."""
    R = sys.p.R
    if set(sys.pPrime.Rplus) != {R.neg(a) for a in sys.p.Rplus}:
        raise InvalidInput("the second positive system must be the negative of the first")
    if not is_weak_regular(sys):
        raise InvalidInput("system is not weak-regular")
    g, dbl = sys.algebra, sys.double
    d = g.dim
    E, H = R.root_vectors, R.dual_vectors
    P, Q = sys.p, sys.pPrime
    bS, bT = set(P.bracket_S), set(Q.bracket_S)
    ph = sys.phases
    V = [list(v) for v in sys.V]
    VC = isotropic_complement(V, sys.center_space(), dbl.pair)
    D = list(V)
    D += [_embed(H[a], H[sys.d[a]], d) for a in P.S]
    D += [_embed(E[a], None, d) for a in P.Rplus if a not in bS]
    D += [_embed(None, E[b], d) for b in Q.Rplus if b not in bT]
    D += [_embed(E[a], [ph[a] * x for x in E[sys.d_of(a)]], d) for a in P.bracket_S]
    neg_P = [R.neg(a) for a in P.Rplus]
    neg_Q = [R.neg(b) for b in Q.Rplus]
    C = list(VC)
    C += [_embed(H[a], [-x for x in H[sys.d[a]]], d) for a in P.S]
    C += [_embed(E[a], None, d) for a in neg_P if a not in bS]
    C += [_embed(None, E[b], d) for b in neg_Q if b not in bT]
    C += [_embed(E[a], [-ph[a] * x for x in E[sys.d_of(a)]], d) for a in P.bracket_S]
    VV = span_intersection(V, [_conj(v) for v in V]) if V else []
    X = list(VV)
    X += [_embed(H[a], H[sys.d[a]], d) for a in P.S]
    X += [_embed(E[a], [ph[a] * x for x in E[sys.d_of(a)]], d) for a in P.bracket_S]

    cert = Certificate("weak-regular-span")
    cert.record("Ddimension", 2 * span_dim(D) == dbl.dim and span_dim(D) == len(D))
    cert.record("transversal", span_dim(D + C) == dbl.dim and 2 * len(C) == dbl.dim)
    bad = next(((i, j) for i, j in itertools.combinations_with_replacement(range(len(C)), 2)
                if dbl.pair(C[i], C[j])), None)
    cert.record("Cisotropic", bad is None, bad and {"pair": [bad[0] + 1, bad[1] + 1]})
    lag, lc = build_lagrangian(sys)
    cert.record("matchesLagrangian", lag is not None and span_equal(D, lag))
    oracle = span_intersection(D, [_conj(v) for v in D])
    same = span_dim(oracle) == span_dim(X) and (not X or span_equal(oracle, X))
    cert.record("intersectionFormula", same, {"formula": span_dim(X), "oracle": span_dim(oracle)})
    cert.details["lagrangian"] = lc.to_json()
    return WeakRegularSpan([list(v) for v in D], C, span_basis(X) if X else [], cert)


# ---------------------------------------------------------------------------
# enumeration helpers


def center_gram(P: ParabolicData, Q: ParabolicData):
    d = P.algebra.dim
    dbl = neutral_double(P.algebra)
    Z = [_embed(z, None, d) for z in P.center] + [_embed(None, z, d) for z in Q.center]
    return Z, [[dbl.pair(x, y) for y in Z] for x in Z]


def v_catalogue(P: ParabolicData, Q: ParabolicData, rng: random.Random | None = None, samples: int = 4):
    """Lagrangian subspaces of xi + xi': the standard ones for every
    admissible p, random rotations of them, conjugates and images under the
    sign flip of the second factor; deduplicated, each with its adapted p."""
    Z, G = center_gram(P, Q)
    if not Z:
        return [([], 0)]
    d = P.algebra.dim
    N = len(Z)
    rng = rng or random.Random(0)
    raw = []
    for p in range(N // 2 + 1):
        if (N // 2 - p) % 2 == 0:
            try:
                raw.append(standard_isotropic(G, p))
            except InvalidInput:
                continue
            for _ in range(samples):
                try:
                    raw.append(random_max_isotropic(G, rng, p)[0])
                except InvalidInput:
                    break
    cands = []
    for c in raw:
        vecs = [_lin(v, Z, 2 * d) for v in c]
        flip = [v[:d] + [-x for x in v[d:]] for v in vecs]
        for W in (vecs, flip):
            cands.extend([W, [_conj(v) for v in W]])
    out = []
    for W in cands:
        if not any(span_equal(W, U) for U, _ in out):
            coords = [solve(transpose(Z), v) for v in W]
            out.append((W, adapted_basis(coords, G).p))
    return out


def unit_phases():
    return [ONE, -ONE, GaussianRational(0, 1), GaussianRational(0, -1)]


def simple_bijections(P: ParabolicData, Q: ParabolicData):
    """All bijections S -> T (validation decides which ones are admissible)."""
    if len(P.S) != len(Q.S):
        return []
    return [dict(zip(P.S, perm)) for perm in itertools.permutations(Q.S)]


def enumerate_systems(g: QuadraticLieAlgebra, phase_set=None, rng: random.Random | None = None):
    """Every (S, T, d, phases, V) over a finite phase set and the V
    catalogue, with the second positive system equal to R-minus."""
    R = standard_roots(g)
    phase_set = phase_set or unit_phases()
    simple = R.simple
    neg = [R.neg(a) for a in R.positive]
    neg_simple = simple_roots_of(tuple(neg))
    out = []
    for r in range(len(simple) + 1):
        for S in itertools.combinations(simple, r):
            P = build_parabolic(R, R.positive, S)
            for T in itertools.combinations(neg_simple, r):
                Q = build_parabolic(R, neg, T)
                cat = v_catalogue(P, Q, rng)
                for dmap in simple_bijections(P, Q):
                    for vals in itertools.product(phase_set, repeat=len(P.bracket_S)):
                        ph = dict(zip(P.bracket_S, vals))
                        for V, _ in cat:
                            out.append(AdmissibleSystem(P, Q, dmap, ph, V))
    return out
