"""Standard Courant algebroids E = TM + T*M + (M x g) over a coordinate box.

Defining data are (A, R, H) with connection nabla = d + ad_A on the trivial
bundle, curvature-type 2-form R and 3-form H.  Isomorphisms are systems
(K, Phi, beta).  Everything is polynomial in the base coordinates, so all
identities below are checked as exact polynomial identities unless an
automorphism field is only known through its jets (phase fields, see
``PhaseAut``), in which case checks run pointwise on sample points.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InconsistentData, InvalidInput, UnsupportedAlgebra
from .exactnum import (
    ONE,
    ZERO,
    GaussianRational,
    Polynomial,
    as_gr,
    mat_inv,
    random_polynomial,
    sample_points,
    solve,
    sparse_rank,
    transpose,
)
from .extcalc import (
    Form,
    GForm,
    VectorField,
    bracket_square,
    c_phi,
    covariant_d,
    covariant_dir,
    curvature,
    nabla_form,
    poincare_antiderivative,
    wedge_pairing,
)
from .liealg import QuadraticLieAlgebra, get_algebra, validate_quadratic
from .report import Certificate

# ---------------------------------------------------------------------------
# polynomial matrix helpers (entries are Polynomial on R^n)


def _pconst(n, M):
    return [[x if isinstance(x, Polynomial) else Polynomial.const(n, x) for x in row] for row in M]


def _pmul(A, B, n):
    Bt = list(zip(*B))
    out = []
    for row in A:
        new = []
        for col in Bt:
            acc = Polynomial.zero(n)
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


def _pvec(A, v, n):
    out = []
    for row in A:
        acc = Polynomial.zero(n)
        for a, x in zip(row, v):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return out


def _pvec_to(v, n):
    return [x if isinstance(x, Polynomial) else Polynomial.const(n, x) for x in v]


def _is_identity(M) -> bool:
    return all((M[i][j] == (1 if i == j else 0)) for i in range(len(M)) for j in range(len(M)))


def _at(M, point):
    return [[x.eval(point) if isinstance(x, Polynomial) else as_gr(x) for x in row] for row in M]


# ---------------------------------------------------------------------------
# data and sections


@dataclass(frozen=True)
class CourantData:
    algebra: QuadraticLieAlgebra
    n: int
    A: GForm
    R: GForm
    H: Form

    def __post_init__(self):
        if self.A.k != 1 or self.R.k != 2 or self.H.k != 3:
            raise InvalidInput("CourantData needs A of degree 1, R of degree 2 and H of degree 3")
        if not (self.A.n == self.R.n == self.H.n == self.n):
            raise InvalidInput("CourantData components live on different base dimensions")

    @classmethod
    def untwisted(cls, algebra, n: int) -> "CourantData":
        return cls(algebra, n, GForm.zero(algebra, n, 1), GForm.zero(algebra, n, 2), Form.zero(n, 3))

    @classmethod
    def from_connection(cls, algebra, A: GForm, closed_H: Form | None = None) -> "CourantData":
        """Data with R = F_A and H = h(<R ^ R>) + closed_H, satisfying the
        defining relations by construction."""
        n = A.n
        R = curvature(A)
        RR = wedge_pairing(R, R)
        H = poincare_antiderivative(RR) if not RR.is_zero() else Form.zero(n, 3)
        if closed_H is not None:
            H = H + closed_H
        return cls(algebra, n, A, R, H)

    def is_untwisted(self) -> bool:
        return self.A.is_zero() and self.R.is_zero() and self.H.is_zero()

    def nabla(self, X: VectorField, r):
        return covariant_dir(None if self.A.is_zero() else self.A, X, r)

    def frame(self) -> list["Section"]:
        """Constant sections d/dt_k, dt_k, e_a spanning E over functions."""
        n, d = self.n, self.algebra.dim
        out = [Section.vector(VectorField.coordinate(n, k), d) for k in range(n)]
        out += [Section.form(Form.dt(n, k), d) for k in range(n)]
        out += [Section.fiber(n, self.algebra.basis_vector(a)) for a in range(d)]
        return out

    def to_json(self) -> dict:
        g = self.algebra
        return {
            "algebraRef": g.ident if g.ident != "custom" else g.to_json(),
            "n": self.n,
            "A": self.A.to_json(),
            "R": self.R.to_json(),
            "H": self.H.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CourantData":
        try:
            ref = data["algebraRef"]
            g = get_algebra(ref) if isinstance(ref, str) else QuadraticLieAlgebra.from_json(ref)
            n = int(data["n"])
            A = GForm.from_json(g, n, data["A"]) if "A" in data else GForm.zero(g, n, 1)
            R = GForm.from_json(g, n, data["R"]) if "R" in data else GForm.zero(g, n, 2)
            H = Form.from_json(n, data["H"]) if "H" in data else Form.zero(n, 3)
        except KeyError as exc:
            raise InvalidInput(f"CourantData file misses {exc}") from exc
        return cls(g, n, A, R, H)


class Section:
    """u = X + xi + r with polynomial components."""

    __slots__ = ("X", "xi", "r")

    def __init__(self, X: VectorField, xi: Form, r):
        if xi.k != 1 or xi.n != X.n:
            raise InvalidInput("section needs a 1-form on the same base as its vector part")
        self.X, self.xi = X, xi
        self.r = tuple(_pvec_to(r, X.n))

    @property
    def n(self) -> int:
        return self.X.n

    @classmethod
    def zero(cls, n: int, dim: int) -> "Section":
        return cls(VectorField.zero(n), Form.zero(n, 1), [Polynomial.zero(n)] * dim)

    @classmethod
    def vector(cls, X: VectorField, dim: int) -> "Section":
        return cls(X, Form.zero(X.n, 1), [Polynomial.zero(X.n)] * dim)

    @classmethod
    def form(cls, xi: Form, dim: int) -> "Section":
        return cls(VectorField.zero(xi.n), xi, [Polynomial.zero(xi.n)] * dim)

    @classmethod
    def fiber(cls, n: int, r) -> "Section":
        return cls(VectorField.zero(n), Form.zero(n, 1), _pvec_to(r, n))

    def __add__(self, other):
        return Section(self.X + other.X, self.xi + other.xi, [a + b for a, b in zip(self.r, other.r)])

    def __sub__(self, other):
        return Section(self.X - other.X, self.xi - other.xi, [a - b for a, b in zip(self.r, other.r)])

    def __neg__(self):
        return Section(-self.X, -self.xi, [-a for a in self.r])

    def scale(self, f) -> "Section":
        return Section(self.X.scale(f), self.xi.scale(f), [a * f for a in self.r])

    def __eq__(self, other):
        return isinstance(other, Section) and self.X == other.X and self.xi == other.xi and self.r == other.r

    def __hash__(self):
        return hash((self.X, self.xi, self.r))

    def is_zero(self) -> bool:
        return self.X.is_zero() and self.xi.is_zero() and all(not a for a in self.r)

    def at(self, point) -> list:
        """Coordinates (X, xi, r) at a point, as one flat vector."""
        xi = [self.xi.coeffs.get((k,), Polynomial.zero(self.n)).eval(point) for k in range(self.n)]
        return self.X.at(point) + xi + [a.eval(point) for a in self.r]

    def components(self) -> list[Polynomial]:
        z = Polynomial.zero(self.n)
        return list(self.X.comps) + [self.xi.coeffs.get((k,), z) for k in range(self.n)] + list(self.r)

    @classmethod
    def from_components(cls, n: int, comps) -> "Section":
        comps = _pvec_to(comps, n)
        return cls(VectorField(comps[:n]), Form(n, 1, {(k,): comps[n + k] for k in range(n)}), comps[2 * n:])

    def conj(self) -> "Section":
        return Section(self.X.conj(), self.xi.conj(), [a.conj() for a in self.r])

    def to_json(self) -> dict:
        return {"X": self.X.to_json(), "xi": self.xi.to_json(), "r": [a.to_json() for a in self.r]}

    @classmethod
    def from_json(cls, n: int, data: dict) -> "Section":
        return cls(VectorField.from_json(n, data["X"]), Form.from_json(n, data["xi"]),
                   [Polynomial.from_json(n, p) for p in data["r"]])

    def __repr__(self):
        return f"Section(X={self.X!r}, xi={self.xi!r}, r={[str(a) for a in self.r]})"


def pairing(algebra, u: Section, v: Section) -> Polynomial:
    """<u, v> = (1/2)(xi(Y) + eta(X)) + <r, s>."""
    half = GaussianRational(1, 0) / 2
    p = (u.xi.value(v.X) + v.xi.value(u.X)).scale(half)
    return p + algebra.pair(list(u.r), list(v.r))


def anchor(u: Section) -> VectorField:
    return u.X


def dorfman(data: CourantData, u: Section, v: Section) -> Section:
    """Dorfman bracket [u, v] of the standard Courant algebroid."""
    g, n = data.algebra, data.n
    X, Y, xi, eta, r, s = u.X, v.X, u.xi, v.xi, list(u.r), list(v.r)
    A = None if data.A.is_zero() else data.A
    twisted_R = not data.R.is_zero()

    vec = X.bracket(Y)

    one = eta.lie(X) - xi.d().interior(Y)
    if not data.H.is_zero():
        one = one + data.H.interior(X).interior(Y)
    if twisted_R:
        one = one - data.R.interior(X).pair_vector(s).scale(2) + data.R.interior(Y).pair_vector(r).scale(2)
    if any(r) and any(s):
        one = one + nabla_form(A, r, g, n).pair_vector(s).scale(2)

    fib = g.bracket(r, s)
    ns = covariant_dir(A, X, s)
    nr = covariant_dir(A, Y, r)
    fib = [a + b - c for a, b, c in zip(fib, ns, nr)]
    if twisted_R and not X.is_zero() and not Y.is_zero():
        fib = [a + b for a, b in zip(fib, data.R.value(X, Y))]
    return Section(vec, one, _pvec_to(fib, n))


def d_section(f: Polynomial, dim: int) -> Section:
    """The section df (pure 1-form)."""
    return Section.form(Form.function(f).d(), dim)


def validate_data(data: CourantData) -> Certificate:
    """Checks R^nabla = ad_R, d^nabla R = 0 and dH = <R ^ R>."""
    cert = Certificate("courant-data")
    g = data.algebra
    A = None if data.A.is_zero() else data.A
    delta = data.R - (curvature(data.A) if A is not None else GForm.zero(g, data.n, 2))
    central = True
    if not delta.is_zero():
        for b in range(g.dim):
            if not delta.bracket_vector(g.basis_vector(b)).is_zero():
                central = False
                break
    cert.record("curvature", central, {"R_minus_F": delta.to_json()} if not central else None)
    bianchi = covariant_d(A, data.R)
    cert.record("bianchi", bianchi.is_zero(), None if bianchi.is_zero() else bianchi.to_json())
    defect = data.H.d() - wedge_pairing(data.R, data.R)
    cert.record("dH", defect.is_zero(), None if defect.is_zero() else defect.to_json())
    return cert


def check_axioms(data: CourantData, triples) -> Certificate:
    cert = Certificate("courant-axioms")
    pre = validate_data(data)
    cert.details["validate"] = pre.to_json()
    if not cert.record("validate", pre.ok, pre.witness):
        return cert
    g = data.algebra
    names = ("jacobi", "anchorPairing", "symmetricPairing", "symmetricPart")
    for name in names:
        cert.checks[name] = True
    for idx, (u, v, w) in enumerate(triples):
        uv, vu, uw, vw = dorfman(data, u, v), dorfman(data, v, u), dorfman(data, u, w), dorfman(data, v, w)
        wit = {"triple": idx}
        lhs = dorfman(data, u, vw)
        rhs = dorfman(data, uv, w) + dorfman(data, v, uw)
        if lhs != rhs:
            cert.record("jacobi", False, wit)
            break
        if u.X.apply(pairing(g, v, w)) != pairing(g, uv, w) + pairing(g, v, uw):
            cert.record("anchorPairing", False, wit)
            break
        if pairing(g, uv + vu, w) != w.X.apply(pairing(g, u, v)):
            cert.record("symmetricPairing", False, wit)
            break
        if uv + vu != d_section(pairing(g, u, v).scale(2), g.dim):
            cert.record("symmetricPart", False, wit)
            break
    cert.details["triples"] = len(triples)
    return cert


def random_section(n: int, algebra, rng: random.Random, degree: int = 2, terms: int = 2,
                   complex_coeffs: bool = True) -> Section:
    def p():
        return random_polynomial(n, degree, rng, terms, complex_coeffs)

    return Section(VectorField([p() for _ in range(n)]), Form(n, 1, {(k,): p() for k in range(n)}),
                   [p() for _ in range(algebra.dim)])


def random_triples(data: CourantData, count: int, seed: int, degree: int = 2):
    rng = random.Random(seed)
    return [tuple(random_section(data.n, data.algebra, rng, degree) for _ in range(3)) for _ in range(count)]


# ---------------------------------------------------------------------------
# automorphism fields of M x g


class PolyAut:
    """Automorphism field given by a polynomial matrix (columns K e_j)."""

    def __init__(self, algebra, matrix, n: int, inverse=None):
        self.algebra, self.n = algebra, n
        self.matrix = _pconst(n, matrix)
        if inverse is None:
            inverse = self._orthogonal_inverse()
        self.inv_matrix = _pconst(n, inverse)

    def _orthogonal_inverse(self):
        g, n = self.algebra, self.n
        G = _pconst(n, g.metric)
        Ginv = _pconst(n, mat_inv(g.metric))
        Kt = [list(r) for r in zip(*self.matrix)]
        inv = _pmul(_pmul(Ginv, Kt, n), G, n)
        if not _is_identity(_pmul(self.matrix, inv, n)):
            if all(x.is_constant() for row in self.matrix for x in row):
                return mat_inv([[x.constant_term() for x in row] for row in self.matrix])
            raise InvalidInput("automorphism field is not metric-preserving, so no polynomial inverse is available")
        return inv

    @classmethod
    def identity(cls, algebra, n: int) -> "PolyAut":
        d = algebra.dim
        I = [[ONE if i == j else ZERO for j in range(d)] for i in range(d)]
        return cls(algebra, I, n, I)

    def is_identity(self) -> bool:
        return _is_identity(self.matrix)

    def is_polynomial(self) -> bool:
        return True

    def poly(self):
        return self.matrix

    def inv_poly(self):
        return self.inv_matrix

    def at(self, point):
        return _at(self.matrix, point)

    def taylor(self, point):
        return self.matrix, self.inv_matrix

    def log_derivative(self):
        """[K d_k(K^{-1}) for k < n]."""
        out = []
        for k in range(self.n):
            dinv = [[x.diff(k) for x in row] for row in self.inv_matrix]
            out.append(_pmul(self.matrix, dinv, self.n))
        return out

    def apply(self, v):
        return _pvec(self.matrix, _pvec_to(v, self.n), self.n)

    def apply_inv(self, v):
        return _pvec(self.inv_matrix, _pvec_to(v, self.n), self.n)

    def apply_gform(self, omega: GForm) -> GForm:
        return omega if self.is_identity() else omega.apply_matrix(self.matrix)

    def apply_inv_gform(self, omega: GForm) -> GForm:
        return omega if self.is_identity() else omega.apply_matrix(self.inv_matrix)

    def inverse(self) -> "PolyAut":
        return PolyAut(self.algebra, self.inv_matrix, self.n, self.matrix)

    def compose(self, other) -> "PolyAut":
        """self o other."""
        if not isinstance(other, PolyAut):
            if other.is_polynomial():
                other = other.as_poly_aut()
            else:
                raise InvalidInput("cannot compose a polynomial automorphism with a non-polynomial phase field")
        return PolyAut(self.algebra, _pmul(self.matrix, other.matrix, self.n), self.n,
                       _pmul(other.inv_matrix, self.inv_matrix, self.n))

    def to_json(self):
        return {"kind": "matrix", "matrix": [[x.to_json() for x in row] for row in self.matrix]}


class PhaseAut:
    """K = u_alpha exp(i theta_alpha) on g_alpha and Id on the Cartan part.

    ``theta`` assigns a real polynomial to each simple root and ``units`` a
    Gaussian rational of modulus 1; both extend additively (resp.
    multiplicatively) to all roots.  When some theta is non-constant the
    field is not polynomial: it is then handled through its first jets, with
    the value at a point represented by the unit part (that is, theta is
    shifted by the constant -theta(x), which is again a phase field with the
    same d theta).
    """

    def __init__(self, roots, theta: dict, units: dict | None, n: int):
        self.roots, self.n = roots, n
        self.algebra = roots.algebra
        simple = list(roots.simple)
        units = units or {}
        self.theta = {a: _pvec_to([theta.get(a, Polynomial.zero(n))], n)[0] for a in simple}
        self.units = {a: as_gr(units.get(a, ONE)) for a in simple}
        for a in simple:
            if self.theta[a].imag_part():
                raise InvalidInput("phase functions must have real coefficients")
            if self.units[a].norm2() != 1:
                raise InvalidInput("phase values must have modulus one (cos^2 + sin^2 = 1)")
        cols = transpose([list(s) for s in simple])
        self.coords = {}
        for a in roots.roots:
            m = solve(cols, list(a))
            if m is None or any(not x.is_real() or x.re.denominator != 1 for x in m):
                raise InvalidInput("root is not an integral combination of simple roots")
            self.coords[a] = [int(x.re) for x in m]
        self.P = [list(roots.root_vectors[a]) for a in roots.roots] + [list(c) for c in roots.cartan]
        self.P = transpose(self.P)
        self.Pinv = mat_inv(self.P)

    # per-root data
    def _theta_root(self, a):
        acc = Polynomial.zero(self.n)
        for s, m in zip(self.roots.simple, self.coords[a]):
            if m:
                acc = acc + self.theta[s].scale(m)
        return acc

    def _unit_root(self, a):
        acc = ONE
        for s, m in zip(self.roots.simple, self.coords[a]):
            u = self.units[s]
            acc = acc * (u ** m if m >= 0 else u.conj() ** (-m))
        return acc

    def is_polynomial(self) -> bool:
        return all(t.is_constant() for t in self.theta.values())

    def _const_diag(self, inverse=False):
        d = []
        for a in self.roots.roots:
            u = self._unit_root(a)
            d.append(u.conj() if inverse else u)
        d += [ONE] * len(self.roots.cartan)
        return d

    def _conj_diag(self, diag):
        """P diag Pinv with polynomial diagonal entries."""
        n = self.n
        P = _pconst(n, self.P)
        D = [[diag[i] if i == j else Polynomial.zero(n) for j in range(len(diag))] for i in range(len(diag))]
        return _pmul(_pmul(P, D, n), _pconst(n, self.Pinv), n)

    def as_poly_aut(self) -> PolyAut:
        if not self.is_polynomial():
            raise InvalidInput("phase field with non-constant theta is not polynomial")
        n = self.n
        K = self._conj_diag(_pvec_to(self._const_diag(), n))
        Kinv = self._conj_diag(_pvec_to(self._const_diag(True), n))
        return PolyAut(self.algebra, K, n, Kinv)

    def poly(self):
        return self.as_poly_aut().matrix if self.is_polynomial() else None

    def inv_poly(self):
        return self.as_poly_aut().inv_matrix if self.is_polynomial() else None

    def at(self, point):
        return _at(self._conj_diag(_pvec_to(self._const_diag(), self.n)), point)

    def taylor(self, point):
        """Degree-one polynomial matrices agreeing with K, K^{-1} to first order at point."""
        n = self.n
        point = [as_gr(x) for x in point]
        diag, idiag = [], []
        for a in self.roots.roots:
            th = self._theta_root(a)
            lin = Polynomial.zero(n)
            for k in range(n):
                c = th.diff(k).eval(point)
                if c:
                    lin = lin + (Polynomial.var(n, k) - Polynomial.const(n, point[k])).scale(c)
            u = self._unit_root(a)
            one = Polynomial.const(n, 1)
            diag.append((one + lin.scale(as_gr("i"))).scale(u))
            idiag.append((one - lin.scale(as_gr("i"))).scale(u.conj()))
        diag += [Polynomial.const(n, 1)] * len(self.roots.cartan)
        idiag += [Polynomial.const(n, 1)] * len(self.roots.cartan)
        return self._conj_diag(diag), self._conj_diag(idiag)

    def log_derivative(self):
        n = self.n
        out = []
        for k in range(n):
            diag = [self._theta_root(a).diff(k).scale(as_gr("-i")) for a in self.roots.roots]
            diag += [Polynomial.zero(n)] * len(self.roots.cartan)
            out.append(self._conj_diag(diag))
        return out

    def _apply_generic(self, v, inverse):
        n = self.n
        v = _pvec_to(v, n)
        coords = _pvec(_pconst(n, self.Pinv), v, n)
        roots = self.roots.roots
        for i, a in enumerate(roots):
            if not coords[i]:
                continue
            if not self._theta_root(a).is_constant():
                raise InvalidInput("phase field acts transcendentally on a root component")
            u = self._unit_root(a)
            coords[i] = coords[i].scale(u.conj() if inverse else u)
        return _pvec(_pconst(n, self.P), coords, n)

    def apply(self, v):
        return self._apply_generic(v, False)

    def apply_inv(self, v):
        return self._apply_generic(v, True)

    def _apply_gform(self, omega: GForm, inverse) -> GForm:
        keys = sorted({I for c in omega.comps for I in c.coeffs})
        terms = {}
        z = Polynomial.zero(omega.n)
        for I in keys:
            terms[I] = self._apply_generic([c.coeffs.get(I, z) for c in omega.comps], inverse)
        return GForm.from_terms(omega.algebra, omega.n, omega.k, terms)

    def apply_gform(self, omega):
        return self._apply_gform(omega, False)

    def apply_inv_gform(self, omega):
        return self._apply_gform(omega, True)

    def is_identity(self) -> bool:
        return all(t.is_zero() for t in self.theta.values()) and all(u == 1 for u in self.units.values())

    def inverse(self) -> "PhaseAut":
        return PhaseAut(self.roots, {a: -t for a, t in self.theta.items()},
                        {a: u.conj() for a, u in self.units.items()}, self.n)

    def compose(self, other):
        if isinstance(other, PhaseAut) and other.roots is self.roots:
            return PhaseAut(self.roots, {a: self.theta[a] + other.theta[a] for a in self.theta},
                            {a: self.units[a] * other.units[a] for a in self.units}, self.n)
        if self.is_polynomial():
            return self.as_poly_aut().compose(other)
        raise InvalidInput("cannot compose a non-polynomial phase field with this automorphism")

    def to_json(self):
        lab = self.roots.root_label
        return {
            "kind": "phase",
            "theta": {lab(a): t.to_json() for a, t in self.theta.items()},
            "units": {lab(a): str(u) for a, u in self.units.items()},
        }


def as_aut(algebra, K, n: int):
    if K is None:
        return PolyAut.identity(algebra, n)
    if isinstance(K, (PolyAut, PhaseAut)):
        return K
    return PolyAut(algebra, K, n)


@dataclass(frozen=True)
class IsoData:
    K: object
    Phi: GForm
    beta: Form

    def __post_init__(self):
        if self.Phi.k != 1 or self.beta.k != 2 or self.Phi.n != self.beta.n:
            raise InvalidInput("IsoData needs Phi of degree 1 and beta of degree 2 on one base")
        object.__setattr__(self, "K", as_aut(self.Phi.algebra, self.K, self.Phi.n))

    @property
    def algebra(self):
        return self.Phi.algebra

    @property
    def n(self):
        return self.Phi.n

    @classmethod
    def identity(cls, algebra, n: int) -> "IsoData":
        return cls(None, GForm.zero(algebra, n, 1), Form.zero(n, 2))

    def is_identity(self) -> bool:
        return self.K.is_identity() and self.Phi.is_zero() and self.beta.is_zero()

    def to_json(self) -> dict:
        return {"K": self.K.to_json(), "Phi": self.Phi.to_json(), "beta": self.beta.to_json()}

    @classmethod
    def from_json(cls, algebra, n: int, data: dict) -> "IsoData":
        K = data.get("K")
        if isinstance(K, dict):
            if K.get("kind") != "matrix":
                raise InvalidInput("only matrix automorphism fields can be read from JSON")
            K = [[Polynomial.from_json(n, p) for p in row] for row in K["matrix"]]
        return cls(K, GForm.from_json(algebra, n, data["Phi"]), Form.from_json(n, data["beta"]))


def _phi_star(Phi: GForm, s) -> Form:
    """(Phi^* s)(X) = <s, Phi(X)>."""
    return Phi.pair_vector(s)


def apply_isomorphism(I: IsoData, u: Section, point=None) -> Section:
    """I(X + xi + r).  Non-polynomial K needs ``point``; the result is then
    exact to first order at that point, which is all a bracket check there
    uses."""
    K = I.K
    if K.poly() is not None:
        Km = K.poly()
    elif point is not None:
        Km = K.taylor(point)[0]
    else:
        raise InvalidInput("non-polynomial automorphism field needs an evaluation point")
    n = I.n
    X, xi, r = u.X, u.xi, list(u.r)
    PhiX = _pvec_to(I.Phi.value(X), n)
    Kr = _pvec(Km, r, n)
    one = xi + I.beta.interior(X) - _phi_star(I.Phi, PhiX) - _phi_star(I.Phi, Kr).scale(2)
    fib = [a + b for a, b in zip(PhiX, Kr)]
    return Section(X, one, fib)


# ---------------------------------------------------------------------------
# inner derivations


@lru_cache(maxsize=None)
def _ad_inverse_data(g: QuadraticLieAlgebra):
    rep = validate_quadratic(g)
    if not rep["essential"] or not rep["perfect"]:
        raise UnsupportedAlgebra(f"algebra {g.ident} is not essential and perfect", witness=rep)
    d = g.dim
    G = g.metric
    rows, pairs = [], []
    for a in range(d):
        for b in range(a + 1, d):
            c = g.bracket(g.basis_vector(a), g.basis_vector(b))
            if not any(c):
                continue
            row = [sum((G[i][j] * c[j] for j in range(d)), ZERO) for i in range(d)]
            if sparse_rank([dict(enumerate(x)) for x in rows + [row]]) > len(rows):
                rows.append(row)
                pairs.append((a, b))
            if len(rows) == d:
                return tuple(pairs), tuple(map(tuple, mat_inv(rows)))
    raise UnsupportedAlgebra("brackets do not span the algebra")


def ad_inverse(g: QuadraticLieAlgebra, D, n: int):
    """The (polynomial) element psi with ad_psi = D, via
    <psi, [e_a, e_b]> = <D e_a, e_b>.  Raises InconsistentData when D is not
    an inner derivation."""
    pairs, Minv = _ad_inverse_data(g)
    d = g.dim
    D = _pconst(n, D)
    G = g.metric
    rhs = []
    for a, b in pairs:
        acc = Polynomial.zero(n)
        for i in range(d):
            if D[i][a] and G[i][b]:
                acc = acc + D[i][a].scale(G[i][b])
        rhs.append(acc)
    psi = _pvec(_pconst(n, Minv), rhs, n)
    for j in range(d):
        col = _pvec_to(g.bracket(psi, g.basis_vector(j)), n)
        if col != [D[i][j] for i in range(d)]:
            raise InconsistentData("operator is not an inner skew derivation", witness={"column": j + 1})
    return psi


def _gform_from_dirs(g, n, vecs) -> GForm:
    """1-form with A(d/dt_k) = vecs[k]."""
    comps = []
    for a in range(g.dim):
        comps.append(Form(n, 1, {(k,): vecs[k][a] for k in range(n) if vecs[k][a]}))
    return GForm(g, comps)


def _derivation_matrices(I: IsoData, data1: CourantData):
    """D_k = K nabla^1_k K^{-1} - d_k on constant sections, per direction."""
    g, n = I.algebra, I.n
    L = I.K.log_derivative()
    if data1.A.is_zero():
        return L
    KA = I.K.apply_gform(data1.A)
    out = []
    for k in range(n):
        a = _pvec_to(KA.value(VectorField.coordinate(n, k)), n)
        ad = [[Polynomial.zero(n)] * g.dim for _ in range(g.dim)]
        for j in range(g.dim):
            col = _pvec_to(g.bracket(a, g.basis_vector(j)), n)
            for i in range(g.dim):
                ad[i][j] = col[i]
        out.append([[L[k][i][j] + ad[i][j] for j in range(g.dim)] for i in range(g.dim)])
    return out


def induced_data(I: IsoData, data1: CourantData) -> CourantData:
    """Target data (A2, R2, H2) forced by the isomorphism conditions."""
    g, n = I.algebra, I.n
    D = _derivation_matrices(I, data1)
    psi = [ad_inverse(g, D[k], n) for k in range(n)]
    Phi = I.Phi
    phis = [_pvec_to(Phi.value(VectorField.coordinate(n, k)), n) for k in range(n)]
    A2 = _gform_from_dirs(g, n, [[p - q for p, q in zip(psi[k], phis[k])] for k in range(n)])
    KR1 = I.K.apply_gform(data1.R) if not data1.R.is_zero() else GForm.zero(g, n, 2)
    R2 = KR1 - covariant_d(A2, Phi) - bracket_square(Phi)
    H2 = data1.H - I.beta.d() - wedge_pairing(KR1 + R2, Phi) + c_phi(Phi)
    return CourantData(g, n, A2, R2, H2)


def _preserves_structure(K, g, n, points):
    """K[x, y] = [Kx, Ky] and <Kx, Ky> = <x, y> on basis vectors."""
    E = [g.basis_vector(a) for a in range(g.dim)]
    if K.poly() is not None:
        cols = [K.apply(e) for e in E]
        for a in range(g.dim):
            for b in range(a, g.dim):
                if _pvec_to([g.pair(cols[a], cols[b])], n)[0] != Polynomial.const(n, g.metric[a][b]):
                    return False, {"metric": [a + 1, b + 1]}
                if b > a and K.apply(g.bracket(E[a], E[b])) != _pvec_to(g.bracket(cols[a], cols[b]), n):
                    return False, {"bracket": [a + 1, b + 1]}
        return True, None
    for p in points:
        M = K.at(p)
        cols = [[M[i][a] for i in range(g.dim)] for a in range(g.dim)]
        for a in range(g.dim):
            for b in range(a, g.dim):
                if g.pair(cols[a], cols[b]) != g.metric[a][b]:
                    return False, {"metric": [a + 1, b + 1], "point": [str(x) for x in p]}
                br = g.bracket(E[a], E[b])
                lhs = [sum((M[i][j] * br[j] for j in range(g.dim)), ZERO) for i in range(g.dim)]
                if b > a and lhs != g.bracket(cols[a], cols[b]):
                    return False, {"bracket": [a + 1, b + 1], "point": [str(x) for x in p]}
    return True, None


def check_iso(I: IsoData, data1: CourantData, data2: CourantData, points=None,
              bracket_check: bool = True) -> Certificate:
    """Verify the three isomorphism conditions exactly; optionally spot-check
    I[u, v]_1 = [I u, I v]_2 on frame pairs at sample points."""
    cert = Certificate("courant-iso")
    g, n = I.algebra, I.n
    if data1.algebra != g or data2.algebra != g or data1.n != n or data2.n != n:
        raise InvalidInput("isomorphism and data disagree on base or fiber")
    if I.K.poly() is None and not (data1.A.is_zero() and data1.R.is_zero()):
        raise InvalidInput("non-polynomial phase fields are supported from flat, R = 0 data only")
    points = points if points is not None else sample_points(n)
    ok, wit = _preserves_structure(I.K, g, n, points)
    cert.record("automorphism", ok, wit)
    D = _derivation_matrices(I, data1)
    Phi = I.Phi
    rel1 = True
    for k in range(n):
        a2 = _pvec_to(data2.A.value(VectorField.coordinate(n, k)), n)
        ph = _pvec_to(Phi.value(VectorField.coordinate(n, k)), n)
        for j in range(g.dim):
            e = g.basis_vector(j)
            lhs = _pvec_to(g.bracket(a2, e), n)
            rhs = [D[k][i][j] for i in range(g.dim)]
            rhs = [x - y for x, y in zip(rhs, _pvec_to(g.bracket(ph, e), n))]
            if lhs != rhs:
                rel1 = False
                break
        if not rel1:
            cert.record("connection", False, {"relation": 1, "direction": k + 1, "basis": j + 1})
            break
    if rel1:
        cert.record("connection", True)
    KR1 = I.K.apply_gform(data1.R) if not data1.R.is_zero() else GForm.zero(g, n, 2)
    R2 = KR1 - covariant_d(data2.A, Phi) - bracket_square(Phi)
    cert.record("curvature", R2 == data2.R, None if R2 == data2.R else {"relation": 2})
    H2 = data1.H - I.beta.d() - wedge_pairing(KR1 + data2.R, Phi) + c_phi(Phi)
    cert.record("threeForm", H2 == data2.H, None if H2 == data2.H else {"relation": 3})
    if bracket_check:
        eq = check_bracket_preserved(I, data1, data2, points=points[:1])
        cert.details["bracketSpotCheck"] = eq.ok
    return cert


def check_bracket_preserved(I: IsoData, data1: CourantData, data2: CourantData, pairs=None, points=None) -> Certificate:
    """I[u, v]_1 = [I u, I v]_2 on the given section pairs (default: all
    pairs of the constant frame, which span since the defect is tensorial)."""
    cert = Certificate("bracket-preserved")
    frame = data1.frame()
    pairs = pairs if pairs is not None else [(u, v) for u in frame for v in frame]
    polynomial = I.K.poly() is not None
    pts = points if points is not None else sample_points(I.n)
    for idx, (u, v) in enumerate(pairs):
        if polynomial:
            lhs = apply_isomorphism(I, dorfman(data1, u, v))
            rhs = dorfman(data2, apply_isomorphism(I, u), apply_isomorphism(I, v))
            if lhs != rhs:
                cert.record("bracket", False, {"pair": idx})
                return cert
        else:
            for p in pts:
                lhs = apply_isomorphism(I, dorfman(data1, u, v), point=p).at(p)
                rhs = dorfman(data2, apply_isomorphism(I, u, point=p), apply_isomorphism(I, v, point=p)).at(p)
                if lhs != rhs:
                    cert.record("bracket", False, {"pair": idx, "point": [str(x) for x in p]})
                    return cert
    cert.record("bracket", True)
    cert.details["pairs"] = len(pairs)
    return cert


def compose_iso(I2: IsoData, I1: IsoData) -> IsoData:
    """I2 o I1 = (K2 K1, K2 Phi1 + Phi2, beta1 + beta2 - <K2 Phi1 ^ Phi2>)."""
    KPhi = I2.K.apply_gform(I1.Phi) if not I1.Phi.is_zero() else I1.Phi
    K = I2.K.compose(I1.K)
    Phi = KPhi + I2.Phi
    beta = I1.beta + I2.beta
    if not KPhi.is_zero() and not I2.Phi.is_zero():
        beta = beta - wedge_pairing(KPhi, I2.Phi)
    return IsoData(K, Phi, beta)


def invert_iso(I: IsoData) -> IsoData:
    return IsoData(I.K.inverse(), -I.K.apply_inv_gform(I.Phi), -I.beta)


def solve_phi_from_K(K, A1: GForm, A2: GForm) -> GForm:
    """The unique Phi with ad_Phi(X) = K nabla^1_X K^{-1} - nabla^2_X."""
    g, n = A1.algebra, A1.n
    K = as_aut(g, K, n)
    probe = IsoData(K, GForm.zero(g, n, 1), Form.zero(n, 2))
    D = _derivation_matrices(probe, CourantData(g, n, A1, GForm.zero(g, n, 2), Form.zero(n, 3)))
    psi = [ad_inverse(g, D[k], n) for k in range(n)]
    targets = [_pvec_to(A2.value(VectorField.coordinate(n, k)), n) for k in range(n)]
    return _gform_from_dirs(g, n, [[p - q for p, q in zip(psi[k], targets[k])] for k in range(n)])


def build_phase_automorphism(roots, theta: dict, n: int, units: dict | None = None) -> IsoData:
    """Automorphism of the untwisted algebroid extending the phase field
    K = u e^{i theta} (per simple root)."""
    g = roots.algebra
    K = PhaseAut(roots, theta, units, n)
    zero = GForm.zero(g, n, 1)
    Phi = solve_phi_from_K(K, zero, zero)
    c = c_phi(Phi)
    beta = poincare_antiderivative(c) if not c.is_zero() else Form.zero(n, 2)
    return IsoData(K, Phi, beta)


def untwist_locally(data: CourantData):
    """Chain [(Id, A, 0), (Id, 0, h(H1))] to untwisted data."""
    g, n = data.algebra, data.n
    step1 = IsoData(None, data.A, Form.zero(n, 2))
    data1 = induced_data(step1, data)
    if not data1.A.is_zero():
        raise InconsistentData("gauge step did not flatten the connection", witness=data1.A.to_json())
    if not data1.R.is_zero():
        raise InconsistentData("R does not match the curvature of nabla", witness=data1.R.to_json())
    H1 = data1.H
    beta = poincare_antiderivative(H1) if not H1.is_zero() else Form.zero(n, 2)
    step2 = IsoData(None, GForm.zero(g, n, 1), beta)
    data2 = induced_data(step2, data1)
    if not data2.is_untwisted():
        raise InconsistentData("untwisting left a residual 3-form", witness=data2.H.to_json())
    return [step1, step2], data2


def random_automorphism(roots, n: int, rng: random.Random, polynomial: bool = True):
    """Constant phase automorphism with Pythagorean units, optionally
    composed with exp(ad_N) for a nilpotent polynomial N = f E_alpha."""
    units = {}
    triples = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)]
    for a in roots.simple:
        x, y, z = rng.choice(triples)
        sx, sy = rng.choice((1, -1)), rng.choice((1, -1))
        units[a] = GaussianRational(Fraction(sx * x, z), Fraction(sy * y, z))
    K = PhaseAut(roots, {}, units, n).as_poly_aut()
    if polynomial:
        g = roots.algebra
        alpha = rng.choice(list(roots.positive))
        f = random_polynomial(n, 1, rng, 2, complex_coeffs=False)
        N = [f.scale(c) for c in roots.root_vectors[alpha]]
        ad = [[Polynomial.zero(n)] * g.dim for _ in range(g.dim)]
        for j in range(g.dim):
            col = _pvec_to(g.bracket(N, g.basis_vector(j)), n)
            for i in range(g.dim):
                ad[i][j] = col[i]
        half = GaussianRational(1, 0) / 2
        ad2 = _pmul(ad, ad, n)
        E = [[ad[i][j] + ad2[i][j].scale(half) + (Polynomial.const(n, 1) if i == j else Polynomial.zero(n))
              for j in range(g.dim)] for i in range(g.dim)]
        Einv = [[-ad[i][j] + ad2[i][j].scale(half) + (Polynomial.const(n, 1) if i == j else Polynomial.zero(n))
                 for j in range(g.dim)] for i in range(g.dim)]
        K = K.compose(PolyAut(g, E, n, Einv))
    return K


def random_iso(roots, n: int, rng: random.Random, degree: int = 1, polynomial_K: bool = True) -> IsoData:
    g = roots.algebra
    K = random_automorphism(roots, n, rng, polynomial_K)
    Phi = GForm(g, [Form(n, 1, {(k,): random_polynomial(n, degree, rng, 1) for k in range(n) if rng.random() < 0.5})
                    for _ in range(g.dim)])
    beta = Form(n, 2, {(i, j): random_polynomial(n, degree, rng, 1)
                       for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5})
    return IsoData(K, Phi, beta)


# ---------------------------------------------------------------------------
# pullbacks by affine maps


@dataclass(frozen=True)
class AffineMap:
    """f(s) = M s + shift."""

    M: tuple
    shift: tuple

    def __post_init__(self):
        M = tuple(tuple(as_gr(x) for x in row) for row in self.M)
        shift = tuple(as_gr(x) for x in self.shift)
        if len(M) != len(shift) or any(len(r) != len(M) for r in M):
            raise InvalidInput("affine map needs a square matrix and a matching shift")
        try:
            Minv = mat_inv([list(r) for r in M])
        except InvalidInput as exc:
            raise InvalidInput("affine map has a singular linear part") from exc
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "_Minv", tuple(map(tuple, Minv)))

    @property
    def n(self):
        return len(self.M)

    def __call__(self, s):
        return [sum((a * as_gr(x) for a, x in zip(row, s)), ZERO) + c for row, c in zip(self.M, self.shift)]

    def inverse(self) -> "AffineMap":
        Minv = [list(r) for r in self._Minv]
        shift = [-sum((a * c for a, c in zip(row, self.shift)), ZERO) for row in Minv]
        return AffineMap(Minv, shift)


def pullback_section(f: AffineMap, u: Section) -> Section:
    M, c = [list(r) for r in f.M], list(f.shift)
    X = u.X.pullback_affine(M, c, [list(r) for r in f._Minv])
    return Section(X, u.xi.pullback_affine(M, c), [a.compose_affine(M, c) for a in u.r])


def pullback_data(f: AffineMap, data: CourantData) -> CourantData:
    M, c = [list(r) for r in f.M], list(f.shift)
    return CourantData(data.algebra, data.n, data.A.pullback_affine(M, c), data.R.pullback_affine(M, c),
                       data.H.pullback_affine(M, c))


def pullback(f: AffineMap, data: CourantData, u: Section | None = None):
    """(f^* data, f^! u)."""
    return pullback_data(f, data), (pullback_section(f, u) if u is not None else None)
