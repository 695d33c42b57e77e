"""Generalized almost complex structures L(W, sigma, D, eps) over a box.

W is a constant complex frame of vector fields, sigma an algebra-valued
1-form (only its values on W matter), D a polynomial frame of a maximal
isotropic subbundle of M x g^C and eps a complex 2-form.

Membership in a maximal isotropic subbundle Z is decided exactly through
Z = Z^perp: a section lies in Z iff it pairs to the zero polynomial with a
frame of Z.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .courant import (
    AffineMap,
    CourantData,
    IsoData,
    Section,
    apply_isomorphism,
    dorfman,
    induced_data,
    pairing,
    pullback_data,
    pullback_section,
    _pvec,
    _pvec_to,
)
from .dirac import (
    DiracQuadruple,
    adapted_basis,
    check_index_zero,
    real_index,
    standard_isotropic,
)
from .errors import InvalidInput, NoAdaptedSplit
from .exactnum import (
    I as IMAG,
    ONE,
    ZERO,
    GaussianRational,
    Polynomial,
    as_gr,
    mat_inv,
    sample_points,
    span_dim,
    span_equal,
    span_intersection,
    transpose,
)
from .extcalc import Form, GForm, VectorField, c_phi, covariant_d, covariant_dir, wedge_pairing
from .liealg import QuadraticLieAlgebra, get_algebra, signature, standard_roots
from .report import Certificate

HALF = GaussianRational(Fraction(1, 2))


def default_grid(n: int, k: int = 3):
    """k equally spaced rational values per axis in [-1, 1]."""
    if k < 1:
        raise InvalidInput("grid needs at least one point per axis")
    vals = [GaussianRational(0)] if k == 1 else [GaussianRational(Fraction(2 * j, k - 1) - 1) for j in range(k)]
    return [tuple(p) for p in itertools.product(vals, repeat=n)]


def _poly(n, x):
    return x if isinstance(x, Polynomial) else Polynomial.const(n, x)


@dataclass(frozen=True)
class GCSField:
    courant: CourantData
    W: tuple
    sigma: GForm
    D: tuple
    eps: Form

    def __post_init__(self):
        n, g = self.courant.n, self.courant.algebra
        W = tuple(tuple(as_gr(x) for x in w) for w in self.W)
        if any(isinstance(x, Polynomial) for w in self.W for x in w):
            raise InvalidInput("only constant-coefficient W frames are supported")
        if any(len(w) != n for w in W) or span_dim(W) != len(W):
            raise InvalidInput("W must be a linearly independent constant frame on the base")
        if self.sigma.k != 1 or self.sigma.n != n or self.sigma.algebra != g:
            raise InvalidInput("sigma must be an algebra-valued 1-form on the base")
        if self.eps.k != 2 or self.eps.n != n:
            raise InvalidInput("eps must be a 2-form on the base")
        D = tuple(tuple(_poly(n, x) for x in v) for v in self.D)
        if 2 * len(D) != g.dim or any(len(v) != g.dim for v in D):
            raise InvalidInput("D frame must have half the algebra dimension")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "D", D)

    @property
    def algebra(self) -> QuadraticLieAlgebra:
        return self.courant.algebra

    @property
    def n(self) -> int:
        return self.courant.n

    def W_fields(self):
        return [VectorField.constant(w) for w in self.W]

    def quadruple_at(self, point) -> DiracQuadruple:
        Wf = self.W_fields()
        sig = [[p.eval(point) for p in self.sigma.value(X)] for X in Wf]
        eps = [[self.eps.value(X, Y).eval(point) for Y in Wf] for X in Wf]
        D = [[p.eval(point) for p in v] for v in self.D]
        return DiracQuadruple(self.n, self.algebra, self.W, sig, D, eps)

    def validate(self, points=None) -> Certificate:
        """Quadruple invariants and constant rank of D on sample points."""
        cert = Certificate("gcs-field")
        pts = list(points) if points is not None else sample_points(self.n) + default_grid(self.n)
        for pt in pts:
            try:
                q = self.quadruple_at(pt)
            except InvalidInput as exc:
                cert.record("quadruple", False, {"point": [str(x) for x in pt], "error": str(exc)})
                return cert
            del q
        cert.record("quadruple", True)
        return cert

    def conj(self) -> "GCSField":
        W = [[x.conj() for x in w] for w in self.W]
        D = [[p.conj() for p in v] for v in self.D]
        return GCSField(self.courant, W, self.sigma.conj(), D, self.eps.conj())

    def with_(self, **kw) -> "GCSField":
        base = dict(courant=self.courant, W=self.W, sigma=self.sigma, D=self.D, eps=self.eps)
        base.update(kw)
        return GCSField(**base)

    # L frame ----------------------------------------------------------
    def _xi_solver(self):
        """Covector with prescribed values on W: fixed pivot columns."""
        n, k = self.n, len(self.W)
        picked, acc = [], []
        for c in range(n):
            col = [w[c] for w in self.W]
            trial = acc + [col]
            if span_dim(trial) > len(acc):
                acc.append(col)
                picked.append(c)
            if len(picked) == k:
                break
        M = [[self.W[j][c] for c in picked] for j in range(k)]
        Minv = mat_inv(M) if k else []
        return picked, Minv

    def L_frame(self) -> list[Section]:
        n, g = self.n, self.algebra
        d = g.dim
        Wf = self.W_fields()
        k = len(Wf)
        picked, Minv = self._xi_solver()
        zero = Polynomial.zero(n)

        def covector(vals):
            x = [sum((Minv[c][j] * vals[j] for j in range(k) if vals[j]), zero) if k else zero
                 for c in range(len(picked))]
            return Form(n, 1, {(picked[c],): x[c] for c in range(len(picked)) if x[c]})

        sig = [_pvec_to(self.sigma.value(X), n) for X in Wf]
        out = []
        for i, X in enumerate(Wf):
            vals = [self.eps.value(X, Y).scale(2) - g.pair(sig[j], sig[i]) for j, Y in enumerate(Wf)]
            out.append(Section(X, covector(vals), sig[i]))
        for r in self.D:
            vals = [g.pair(sig[j], list(r)).scale(-2) for j in range(k)]
            out.append(Section(VectorField.zero(n), covector(vals), list(r)))
        from .dirac import annihilator

        for a in annihilator(self.W, n):
            xi = Form(n, 1, {(c,): Polynomial.const(n, a[c]) for c in range(n) if a[c]})
            out.append(Section(VectorField.zero(n), xi, [zero] * d))
        return out

    def L_at(self, point):
        return [u.at(point) for u in self.L_frame()]

    def to_json(self) -> dict:
        return {
            "courantRef": self.courant.to_json(),
            "W": [[str(x) for x in w] for w in self.W],
            "sigma": self.sigma.to_json(),
            "D": [[p.to_json() for p in v] for v in self.D],
            "eps": self.eps.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GCSField":
        try:
            ref = data["courantRef"]
            if isinstance(ref, str):
                courant = CourantData.untwisted(get_algebra(ref), int(data["n"]))
            else:
                courant = CourantData.from_json(ref)
            n, g = courant.n, courant.algebra
            W = [[as_gr(x) for x in w] for w in data["W"]]
            sigma = GForm.from_json(g, n, data["sigma"]) if "sigma" in data else GForm.zero(g, n, 1)
            D = [[Polynomial.from_json(n, p) if isinstance(p, list) else Polynomial.const(n, as_gr(p)) for p in v]
                 for v in data["D"]]
            eps = Form.from_json(n, data["eps"]) if "eps" in data else Form.zero(n, 2)
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed GCS field file: {exc}") from exc
        return cls(courant, W, sigma, D, eps)


# ---------------------------------------------------------------------------
# integrability


def _in_D(f: GCSField, r):
    """None if r is in D, else the first non-vanishing pairing (witness)."""
    g = f.algebra
    for b, v in enumerate(f.D):
        p = g.pair(list(r), list(v))
        if p:
            return {"Dindex": b + 1, "pairing": p.to_json()}
    return None


def check_integrability(f: GCSField, closure_oracle: bool = False) -> Certificate:
    """Conditions A to E; ``closure_oracle`` adds the direct check that
    Dorfman brackets of L-frame sections stay in L."""
    cert = Certificate("integrability")
    data, g, n = f.courant, f.algebra, f.n
    Wf = f.W_fields()
    k = len(Wf)
    A = None if data.A.is_zero() else data.A

    # A: constant frames commute
    badA = next(((i, j) for i, j in itertools.combinations(range(k), 2) if not Wf[i].bracket(Wf[j]).is_zero()), None)
    cert.record("condA", badA is None, None if badA is None else {"pair": [badA[0] + 1, badA[1] + 1]})

    witB = None
    for a, b in itertools.combinations_with_replacement(range(len(f.D)), 2):
        w = _in_D(f, g.bracket(list(f.D[a]), list(f.D[b])))
        if w is not None:
            witB = {"pair": [a + 1, b + 1], **w}
            break
    cert.record("condB", witB is None, witB)

    sig = [_pvec_to(f.sigma.value(X), n) for X in Wf]
    witC = None
    for i, X in enumerate(Wf):
        for b, r in enumerate(f.D):
            v = covariant_dir(A, X, list(r))
            v = [x + y for x, y in zip(v, g.bracket(sig[i], list(r)))]
            w = _in_D(f, v)
            if w is not None:
                witC = {"W": i + 1, "D": b + 1, **w}
                break
        if witC:
            break
    cert.record("condC", witC is None, witC)

    dsig = covariant_d(A, f.sigma)
    witD = None
    for i, j in itertools.combinations(range(k), 2):
        v = [x + y for x, y in zip(dsig.value(Wf[i], Wf[j]), g.bracket(sig[i], sig[j]))]
        if not data.R.is_zero():
            v = [x + y for x, y in zip(v, data.R.value(Wf[i], Wf[j]))]
        w = _in_D(f, v)
        if w is not None:
            witD = {"pair": [i + 1, j + 1], **w}
            break
    cert.record("condD", witD is None, witD)

    omega = f.eps.d().scale(2) + data.H + wedge_pairing(dsig, f.sigma) + c_phi(f.sigma).scale(2)
    if not data.R.is_zero():
        omega = omega + wedge_pairing(data.R, f.sigma).scale(2)
    witE = None
    for i, j, l in itertools.combinations(range(k), 3):
        v = omega.value(Wf[i], Wf[j], Wf[l])
        if v:
            witE = {"triple": [i + 1, j + 1, l + 1], "coefficient": v.to_json()}
            break
    cert.record("condE", witE is None, witE)

    if closure_oracle:
        cl = closure_check(f)
        cert.details["closureOracle"] = cl.to_json()
        cert.details["oracleAgrees"] = cl.ok == all(cert.checks[c] for c in ("condA", "condB", "condC", "condD", "condE"))
    return cert


def closure_check(f: GCSField) -> Certificate:
    """Direct test: [u, v] is orthogonal to L for all L-frame pairs."""
    cert = Certificate("closure")
    data, g = f.courant, f.algebra
    frame = f.L_frame()
    for a, b in itertools.product(range(len(frame)), repeat=2):
        br = dorfman(data, frame[a], frame[b])
        for c, u in enumerate(frame):
            p = pairing(g, br, u)
            if p:
                cert.record("closed", False, {"pair": [a + 1, b + 1], "against": c + 1, "pairing": p.to_json()})
                return cert
    cert.record("closed", True)
    return cert


# ---------------------------------------------------------------------------
# pointwise index and regularity


def _profile(f: GCSField, q: DiracQuadruple, rep):
    D = [list(v) for v in q.D]
    Dbar = [[x.conj() for x in v] for v in D]
    return (len(q.W), len(rep.delta), span_dim(D), len(span_intersection(D, Dbar)))


def pointwise_index_zero(f: GCSField, points=None) -> Certificate:
    pts = list(points) if points is not None else default_grid(f.n)
    cert = Certificate("pointwise-index-zero")
    profiles, reports = {}, []
    bad_oracle = None
    for pt in pts:
        q = f.quadruple_at(pt)
        rep = check_index_zero(q)
        profiles[pt] = _profile(f, q, rep)
        reports.append({"point": [str(x) for x in pt], "verdict": rep.verdict, "failingCondition": rep.condition,
                        "p": rep.p, "dimDelta0": len(rep.delta0), "profile": list(profiles[pt])})
        if (rep.oracle_index == 0) != rep.verdict and bad_oracle is None:
            bad_oracle = {"point": [str(x) for x in pt]}
    cert.record("oracleAgrees", bad_oracle is None, bad_oracle)
    bad = next((r for r in reports if not r["verdict"]), None)
    cert.record("indexZero", bad is None, bad)
    flagged = _scan(pts, profiles)
    cert.details["points"] = reports
    cert.details["flagged"] = [[str(x) for x in p] for p in flagged]
    cert.details["profileConstant"] = len(set(profiles.values())) <= 1
    return cert


def _scan(pts, profiles):
    """Points whose profile differs from a grid neighbour (one coordinate
    moved to the adjacent supplied value)."""
    n = len(pts[0]) if pts else 0
    axes = [sorted({p[i] for p in pts}, key=lambda x: (x.re, x.im)) for i in range(n)]
    pos = [{v: j for j, v in enumerate(ax)} for ax in axes]
    out = []
    for p in pts:
        for i in range(n):
            j = pos[i][p[i]]
            for jj in (j - 1, j + 1):
                if 0 <= jj < len(axes[i]):
                    q = p[:i] + (axes[i][jj],) + p[i + 1:]
                    if q in profiles and profiles[q] != profiles[p]:
                        out.append(p)
                        break
            else:
                continue
            break
    return out


def is_regular_wrt_cartan(f: GCSField, cartan=None) -> Certificate:
    """[h, D] in D for a constant commuting Cartan frame h."""
    g = f.algebra
    h = [list(map(as_gr, c)) for c in (cartan if cartan is not None else g.standard_cartan())]
    cert = Certificate("regular")
    comm = all(not any(g.bracket(a, b)) for a, b in itertools.combinations(h, 2))
    if not cert.record("commuting", comm):
        return cert
    wit = None
    for a, x in enumerate(h):
        for b, r in enumerate(f.D):
            w = _in_D(f, g.bracket([Polynomial.const(f.n, c) for c in x], list(r)))
            if w is not None:
                wit = {"cartan": a + 1, "D": b + 1, **w}
                break
        if wit:
            break
    cert.record("normalized", wit is None, wit)
    return cert


# ---------------------------------------------------------------------------
# lifts


def _kmatrix(I: IsoData):
    K = I.K.poly()
    if K is None:
        raise InvalidInput("lifting needs a polynomial automorphism field")
    return K


def lift_iso(I: IsoData, f: GCSField, gamma: GForm | None = None) -> GCSField:
    """Canonical lift T_I; with ``gamma`` (values in the new D) it is
    followed by the affine action."""
    if I.n != f.n or I.algebra != f.algebra:
        raise InvalidInput("isomorphism and field live on different algebroids")
    n = f.n
    K = _kmatrix(I)
    data2 = induced_data(I, f.courant)
    Ksig = I.K.apply_gform(f.sigma)
    sigma = Ksig + I.Phi
    D = [_pvec(K, list(r), n) for r in f.D]
    eps = f.eps + (I.beta + wedge_pairing(I.Phi, Ksig)).scale(HALF)
    out = GCSField(data2, f.W, sigma, D, eps)
    return affine_lift(out, gamma) if gamma is not None else out


def affine_lift(f: GCSField, gamma: GForm) -> GCSField:
    """(sigma + gamma, eps - <gamma ^ sigma>/2); gamma must take values in D."""
    for X in f.W_fields():
        w = _in_D(f, _pvec_to(gamma.value(X), f.n))
        if w is not None:
            raise InvalidInput("gamma must take values in D on W", witness=w)
    eps = f.eps - wedge_pairing(gamma, f.sigma).scale(HALF)
    return f.with_(sigma=f.sigma + gamma, eps=eps)


def lift_pullback(fmap: AffineMap, f: GCSField, gamma: GForm | None = None) -> GCSField:
    """Canonical lift of an affine change of coordinates."""
    if fmap.n != f.n:
        raise InvalidInput("affine map and field have different base dimension")
    M, c = [list(r) for r in fmap.M], list(fmap.shift)
    Minv = [list(r) for r in fmap._Minv]
    W = [[sum((Minv[i][j] * w[j] for j in range(f.n)), ZERO) for i in range(f.n)] for w in f.W]
    D = [[p.compose_affine(M, c) for p in r] for r in f.D]
    out = GCSField(pullback_data(fmap, f.courant), W, f.sigma.pullback_affine(M, c), D, f.eps.pullback_affine(M, c))
    return affine_lift(out, gamma.pullback_affine(M, c)) if gamma is not None else out


def check_lift_iso(I: IsoData, f: GCSField, lifted: GCSField, points=None) -> Certificate:
    """L(T_I f)_x = I_x(L(f)_x) on the points."""
    cert = Certificate("lift-iso")
    pts = list(points) if points is not None else default_grid(f.n)
    images = [apply_isomorphism(I, u) for u in f.L_frame()]
    target = lifted.L_frame()
    for pt in pts:
        a = [u.at(pt) for u in images]
        b = [u.at(pt) for u in target]
        if not span_equal(a, b):
            cert.record("equivariant", False, {"point": [str(x) for x in pt]})
            return cert
    cert.record("equivariant", True)
    return cert


def check_lift_pullback(fmap: AffineMap, f: GCSField, lifted: GCSField, points=None) -> Certificate:
    cert = Certificate("lift-pullback")
    pts = list(points) if points is not None else default_grid(f.n)
    images = [pullback_section(fmap, u) for u in f.L_frame()]
    target = lifted.L_frame()
    for pt in pts:
        if not span_equal([u.at(pt) for u in images], [u.at(pt) for u in target]):
            cert.record("equivariant", False, {"point": [str(x) for x in pt]})
            return cert
    cert.record("equivariant", True)
    return cert


# ---------------------------------------------------------------------------
# normal forms


def _cartan_gram(g, cartan):
    return [[g.pair(a, b) for b in cartan] for a in cartan]


def adapted_cartan_split(g: QuadraticLieAlgebra, p: int, q: int, cartan=None):
    """Adapted basis (v, vt, w) of the complexified Cartan with the requested
    counts, or NoAdaptedSplit with the obstruction."""
    cartan = [list(c) for c in (cartan if cartan is not None else g.standard_cartan())]
    r = len(cartan)
    G = _cartan_gram(g, cartan)
    sig = signature(G)
    if sig is None or sig[0] != sig[1]:
        raise NoAdaptedSplit("Cartan metric is not neutral", witness={"signature": sig})
    if 2 * (p + q) != r:
        raise NoAdaptedSplit("need 2(p + q) = rank", witness={"rank": r, "p": p, "q": q})
    if q % 2:
        witness = {"signature": list(sig), "q": q}
        if r == 2:
            reason = "every isotropic Cartan line is real"
        else:
            reason = "D cap tau(D) has the parity of half the rank"
        raise NoAdaptedSplit(reason, witness=witness)
    try:
        Dc = standard_isotropic(G, p)
    except InvalidInput as exc:
        raise NoAdaptedSplit(f"no rational isotropic Cartan split: {exc}", witness={"p": p, "q": q}) from exc
    ab = adapted_basis(Dc, G)
    if ab.p != p or ab.q != q:
        raise NoAdaptedSplit("adapted split has the wrong counts", witness={"p": ab.p, "q": ab.q})
    lift = lambda c: [sum((c[i] * cartan[i][m] for i in range(r)), ZERO) for m in range(g.dim)]  # noqa: E731
    return ab, lift


def build_normal_form(g: QuadraticLieAlgebra, n: int, k: int, p: int, q: int, roots=None,
                      cartan_split=None, gamma: Form | None = None, omega_st: Form | None = None) -> GCSField:
    """Normal form over R^{n-2k} x C^k: W = span{d/dx^i, d/dzbar^j},
    D = span{v, w} + g(R+), sigma = i sum_j dx^j (x) vt_j, eps = i(omega_st + gamma)."""
    R = roots if roots is not None else standard_roots(g)
    # the Cartan obstruction is reported before any base-dimension complaint
    if cartan_split is None:
        ab, lift = adapted_cartan_split(g, p, q, R.cartan)
        v = [lift(x) for x in ab.v]
        vt = [lift(x) for x in ab.vt]
        w = [lift(x) for x in ab.w]
    else:
        v, vt, w = (list(map(list, cartan_split[key])) for key in ("v", "vt", "w"))
        _check_split(g, v, vt, w)
    if n < 2 * k or (n - 2 * k - p) % 2 or p > n - 2 * k:
        raise InvalidInput("need p <= n - 2k and n - 2k - p even")
    if p < 1 and n > 2 * k:
        raise InvalidInput("p must be positive when n > 2k")
    m = n - 2 * k
    W = _normal_W(n, k)
    zero1 = GForm.zero(g, n, 1)
    sigma = zero1
    for j in range(p):
        sigma = sigma + GForm.scalar_times(g, Form.dt(n, j).scale(IMAG), vt[j])
    if omega_st is None:
        omega_st = Form.zero(n, 2)
        for a in range(p, m - 1, 2):
            omega_st = omega_st + Form.dt(n, a, a + 1)
    if gamma is not None:
        _check_gamma(gamma, p)
        omega_st = omega_st + gamma
    eps = omega_st.scale(IMAG)
    D = [list(x) for x in v + w] + [list(R.root_vectors[a]) for a in R.positive]
    return GCSField(CourantData.untwisted(g, n), W, sigma, D, eps)


def _normal_W(n, k):
    m = n - 2 * k
    W = []
    for i in range(m):
        W.append([ONE if c == i else ZERO for c in range(n)])
    for j in range(k):
        a, b = m + 2 * j, m + 2 * j + 1
        # d/dzbar = (d/da + i d/db)/2, up to scale
        W.append([ONE if c == a else (IMAG if c == b else ZERO) for c in range(n)])
    return W


def _check_split(g, v, vt, w):
    for a, b in itertools.product(range(len(v)), repeat=2):
        if g.pair(v[a], vt[b]) != (1 if a == b else 0) or g.pair(v[a], v[b]) or g.pair(vt[a], vt[b]):
            raise InvalidInput("Cartan vectors violate the hyperbolic relations", witness={"pair": [a + 1, b + 1]})
    for a, b in itertools.product(range(len(w)), repeat=2):
        h = g.pair(w[a], g.tau(w[b]))
        if a != b and h or a == b and h not in (1, -1):
            raise InvalidInput("w vectors violate <w_i, tau w_j> = +-delta_ij", witness={"pair": [a + 1, b + 1]})
        if g.pair(w[a], w[b]):
            raise InvalidInput("w vectors are not isotropic")
    for x, y in itertools.product(v + vt, w):
        if g.pair(x, y):
            raise InvalidInput("v, vt not orthogonal to w")


def _check_gamma(gamma: Form, p: int):
    if gamma.k != 2:
        raise InvalidInput("gamma must be a 2-form")
    if not gamma.d().is_zero():
        raise InvalidInput("gamma must be closed")
    if any(f.conj() != f for f in gamma.coeffs.values()):
        raise InvalidInput("gamma must be real")
    for I in gamma.coeffs:
        if not any(i < p for i in I):
            raise InvalidInput("gamma must lie in the ideal generated by dx^1..dx^p", witness={"index": [i + 1 for i in I]})


def _reflection(Q, u):
    """h -> h - 2 B(h,u)/Q(u) u as a matrix."""
    r = len(Q)
    Qu = [sum((Q[i][j] * u[j] for j in range(r)), ZERO) for i in range(r)]
    quu = sum((u[i] * Qu[i] for i in range(r)), ZERO)
    return [[(ONE if i == j else ZERO) - 2 * u[i] * Qu[j] / quu for j in range(r)] for i in range(r)]


def wang_cartan_part(g: QuadraticLieAlgebra, cartan=None):
    """Maximal isotropic subspace of the complexified Cartan meeting its
    conjugate trivially.  For a neutral double (Q, -Q) this is the graph
    {(h, A h)} of a complex Q-isometry A with invertible imaginary part."""
    cartan = [list(c) for c in (cartan if cartan is not None else g.standard_cartan())]
    r = len(cartan)
    G = _cartan_gram(g, cartan)
    sig = signature(G)
    if sig is None or sig[0] != sig[1] or sig[0] % 2:
        raise NoAdaptedSplit("Cartan metric admits no skew complex structure", witness={"signature": sig})
    lift = lambda c: [sum((c[i] * cartan[i][m] for i in range(r)), ZERO) for m in range(g.dim)]  # noqa: E731
    half = r // 2
    # the neutral-double layout: Cartan = first-factor block then second-factor block
    Q1 = [row[:half] for row in G[:half]]
    Q2 = [row[half:] for row in G[half:]]
    cross = any(G[i][j] for i in range(half) for j in range(half, r))
    if not cross and all(Q1[i][j] == -Q2[i][j] for i in range(half) for j in range(half)):
        cands = []
        for a, b in itertools.product(range(-2, 3), repeat=2):
            for c in (1, 2):
                cands.append([as_gr(c)] + [GaussianRational(a, b)] + [ZERO] * (half - 2))
        for u, v in itertools.product(cands if half >= 2 else [], repeat=2):
            try:
                A1, A2 = _reflection(Q1, u), _reflection(Q1, v)
            except ZeroDivisionError:
                continue
            A = [[sum((A1[i][l] * A2[l][j] for l in range(half)), ZERO) for j in range(half)] for i in range(half)]
            imA = [[x.imag for x in row] for row in A]
            if span_dim(imA) < half:
                continue
            basis = []
            for j in range(half):
                e = [ONE if i == j else ZERO for i in range(half)]
                Ae = [A[i][j] for i in range(half)]
                basis.append(e + Ae)
            Dh = [lift(x) for x in basis]
            Dbar = [[x.conj() for x in v] for v in Dh]
            if span_intersection(Dh, Dbar):
                continue
            return Dh
    raise NoAdaptedSplit("no Gaussian-rational skew complex structure found on the Cartan",
                         witness={"signature": list(sig)})


def build_wang_case(g: QuadraticLieAlgebra, k: int, roots=None, cartan_part=None) -> GCSField:
    """n = 2k: W = T^{0,1}, D = h^{1,0} + g(R+), sigma = 0, eps = 0."""
    R = roots if roots is not None else standard_roots(g)
    if cartan_part is None:
        hD = wang_cartan_part(g, R.cartan)
    else:
        hD = [list(map(as_gr, v)) for v in cartan_part]
        r = len(R.cartan)
        if 2 * len(hD) != r:
            raise NoAdaptedSplit("Cartan part must be half-dimensional")
        if any(g.pair(a, b) for a, b in itertools.combinations_with_replacement(hD, 2)):
            raise NoAdaptedSplit("Cartan part is not isotropic")
        if span_intersection(hD, [[x.conj() for x in v] for v in hD]):
            raise NoAdaptedSplit("Cartan part meets its conjugate")
    n = 2 * k
    D = hD + [list(R.root_vectors[a]) for a in R.positive]
    return GCSField(CourantData.untwisted(g, n), _normal_W(n, k), GForm.zero(g, n, 1), D, Form.zero(n, 2))


def full_report(f: GCSField, points=None, cartan=None) -> dict:
    """Integrability (with closure oracle), pointwise index and regularity."""
    integ = check_integrability(f, closure_oracle=True)
    idx = pointwise_index_zero(f, points)
    reg = is_regular_wrt_cartan(f, cartan)
    return {
        "integrability": integ.to_json(),
        "indexZero": idx.to_json(),
        "regular": reg.to_json(),
        "ok": integ.ok and idx.ok and reg.ok and integ.details.get("oracleAgrees", True),
    }
