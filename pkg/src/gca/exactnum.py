"""Exact scalars, polynomials and linear algebra over Q(i).

Everything downstream is built on three value types:

* ``GaussianRational``: a + b*i with a, b rational.
* ``Polynomial``: sparse multivariate polynomial with Gaussian-rational
  coefficients in real coordinates t1..tn.
* ``ExactMatrix``: thin wrapper over a list of rows whose entries are either
  of the above; rank, kernel, solve and span membership are exact.
"""
from __future__ import annotations

import random
import re as _re
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInput, RankDropAtPoint

DEFAULT_SAMPLE_SEED = 20240611
DEFAULT_SAMPLE_COUNT = 5


def _frac(x) -> Fraction:
    if type(x) is Fraction:
        return x
    if isinstance(x, bool):
        raise InvalidInput(f"boolean is not a scalar: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise InvalidInput(f"not an exact rational: {x!r}")


class GaussianRational:
    """Immutable element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        z = object.__new__(cls)
        object.__setattr__(z, "re", re)
        object.__setattr__(z, "im", im)
        return z

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Polynomial):
            return NotImplemented
        o = as_gr(other)
        return GaussianRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            return NotImplemented
        o = as_gr(other)
        return GaussianRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return as_gr(other) - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return NotImplemented
        o = as_gr(other)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b:
            if not d:
                return GaussianRational._make(a * c, d)
            return GaussianRational._make(a * c, a * d)
        if not d:
            return GaussianRational._make(a * c, b * c)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def inv(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise InvalidInput("division by zero in Q(i)")
        return GaussianRational._make(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return NotImplemented
        return self * as_gr(other).inv()

    def __rtruediv__(self, other):
        return as_gr(other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GaussianRational":
        return GaussianRational._make(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def real(self) -> "GaussianRational":
        return GaussianRational._make(self.re, Fraction(0))

    @property
    def imag(self) -> "GaussianRational":
        return GaussianRational._make(self.im, Fraction(0))

    def is_real(self) -> bool:
        return not self.im

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return not self.im and self.re == other
        if isinstance(other, Polynomial):
            return other == self
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # text -----------------------------------------------------------------
    def __str__(self):
        if not self.im:
            return str(self.re)
        sim = "" if abs(self.im) == 1 else str(abs(self.im)) + "*"
        if not self.re:
            return ("-" if self.im < 0 else "") + sim + "i"
        return f"{self.re}{'-' if self.im < 0 else '+'}{sim}i"

    def __repr__(self):
        return f"GaussianRational({self})"

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        return parse_scalar(text)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

_TERM = _re.compile(r"([+-])?(\d+(?:/\d+)?)?(\*?i)?")


def parse_scalar(text: str) -> GaussianRational:
    """Parse ``a/b``, ``a/b+c/d*i``, ``-i``, ``3/4*i`` and similar literals."""
    if not isinstance(text, str):
        raise InvalidInput(f"scalar literal must be a string, got {text!r}")
    s = "".join(text.split())
    if not s:
        raise InvalidInput("empty scalar literal")
    pos, re_, im_ = 0, Fraction(0), Fraction(0)
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, unit = m.groups()
        if m.end() == pos or (num is None and unit is None):
            raise InvalidInput(f"bad scalar literal {text!r} at offset {pos}")
        if sign is None and not first:
            raise InvalidInput(f"missing sign in scalar literal {text!r}")
        if unit == "*i" and num is None:
            raise InvalidInput(f"dangling '*' in scalar literal {text!r}")
        if num is not None and "/" in num and num.split("/")[1].strip("0") == "":
            raise InvalidInput(f"zero denominator in {text!r}")
        val = Fraction(num) if num is not None else Fraction(1)
        if sign == "-":
            val = -val
        if unit:
            im_ += val
        else:
            re_ += val
        pos = m.end()
        first = False
    return GaussianRational._make(re_, im_)


def as_gr(x) -> GaussianRational:
    if type(x) is GaussianRational:
        return x
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, Polynomial):
        if x.is_constant():
            return x.constant_term()
        raise InvalidInput("non-constant polynomial where a scalar is required")
    return GaussianRational._make(_frac(x), Fraction(0))


def scalar_arith(a, b=None, op: str = "add") -> GaussianRational:
    """Dispatch helper: op in {add, mul, inv, conj}."""
    a = as_gr(a)
    if op == "add":
        return a + as_gr(b)
    if op == "mul":
        return a * as_gr(b)
    if op == "inv":
        return a.inv()
    if op == "conj":
        return a.conj()
    raise InvalidInput(f"unknown scalar op {op!r}")


# ---------------------------------------------------------------------------
# polynomials


def _order_key(e):
    return (sum(e), e)


class Polynomial:
    """Sparse polynomial in real coordinates t1..tn with Q(i) coefficients.

    ``terms`` maps exponent tuples to non-zero GaussianRationals.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        clean = {}
        if terms:
            for e, c in dict(terms).items():
                e = tuple(int(k) for k in e)
                if len(e) != nvars or any(k < 0 for k in e):
                    raise InvalidInput(f"bad exponent {e} for {nvars} variables")
                c = as_gr(c)
                if c:
                    clean[e] = clean.get(e, ZERO) + c
                    if not clean[e]:
                        del clean[e]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _make(cls, nvars: int, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "nvars", nvars)
        object.__setattr__(p, "terms", terms)
        return p

    @classmethod
    def const(cls, nvars: int, c) -> "Polynomial":
        c = as_gr(c)
        return cls._make(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._make(nvars, {})

    @classmethod
    def var(cls, nvars: int, k: int, coeff=1) -> "Polynomial":
        """The coordinate t_{k+1} (k is 0-based)."""
        e = [0] * nvars
        e[k] = 1
        return cls._make(nvars, {tuple(e): as_gr(coeff)})

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(f"t{k + 1}" for k in range(self.nvars))

    # structure ------------------------------------------------------------
    def items(self):
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self.terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * self.nvars, ZERO)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self):
        e = max(self.terms, key=_order_key)
        return e, self.terms[e]

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise InvalidInput("polynomials over different variable counts")
            return other
        return Polynomial.const(self.nvars, other)

    def __add__(self, other):
        o = self._coerce(other)
        if not o.terms:
            return self
        if not self.terms:
            return o
        t = dict(self.terms)
        for e, c in o.terms.items():
            v = t.get(e)
            if v is None:
                t[e] = c
            else:
                v = v + c
                if v:
                    t[e] = v
                else:
                    del t[e]
        return Polynomial._make(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._make(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Polynomial":
        c = as_gr(c)
        if not c:
            return Polynomial._make(self.nvars, {})
        if c == ONE:
            return self
        return Polynomial._make(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        o = self._coerce(other)
        if not self.terms or not o.terms:
            return Polynomial._make(self.nvars, {})
        if o.is_constant():
            return self.scale(o.constant_term())
        if self.is_constant():
            return o.scale(self.constant_term())
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e)
                t[e] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._make(self.nvars, {e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.is_constant():
                return self.scale(other.constant_term().inv())
            return self.exact_div(other)
        return self.scale(as_gr(other).inv())

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidInput("negative power of a polynomial")
        out = Polynomial.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def exact_div(self, d: "Polynomial") -> "Polynomial":
        """Quotient by ``d``; raises if ``d`` does not divide exactly."""
        d = self._coerce(d)
        if not d.terms:
            raise InvalidInput("division by the zero polynomial")
        ed, cd = d.leading()
        inv_cd = cd.inv()
        q: dict = {}
        r = self
        while r.terms:
            er, cr = r.leading()
            if any(a < b for a, b in zip(er, ed)):
                raise InvalidInput("polynomial division is not exact")
            e = tuple(a - b for a, b in zip(er, ed))
            c = cr * inv_cd
            q[e] = c
            r = r - d * Polynomial._make(self.nvars, {e: c})
        return Polynomial._make(self.nvars, q)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (GaussianRational, int, Fraction)) and not isinstance(other, bool):
            o = as_gr(other)
            if not o:
                return not self.terms
            return self.is_constant() and self.constant_term() == o
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_term())
        return hash(frozenset(self.terms.items()))

    # calculus -------------------------------------------------------------
    def diff(self, k: int) -> "Polynomial":
        """Partial derivative in t_{k+1}."""
        if not 0 <= k < self.nvars:
            raise InvalidInput(f"variable index {k} out of range")
        t = {}
        for e, c in self.terms.items():
            m = e[k]
            if m:
                e2 = e[:k] + (m - 1,) + e[k + 1:]
                t[e2] = c * m
        return Polynomial._make(self.nvars, t)

    def eval(self, point: Sequence) -> GaussianRational:
        if len(point) != self.nvars:
            raise InvalidInput(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [as_gr(x) for x in point]
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for x, m in zip(pt, e):
                if m:
                    v = v * x ** m
            total = total + v
        return total

    def conj(self) -> "Polynomial":
        return Polynomial._make(self.nvars, {e: c.conj() for e, c in self.terms.items()})

    def real_part(self) -> "Polynomial":
        return Polynomial._make(self.nvars, {e: c.real for e, c in self.terms.items() if c.re})

    def imag_part(self) -> "Polynomial":
        return Polynomial._make(self.nvars, {e: c.imag for e, c in self.terms.items() if c.im})

    def homotopy_weight(self, k: int) -> "Polynomial":
        """Replace each monomial of degree m by itself divided by (m + k).

        This is the integral over s in [0,1] of s**(k-1) * p(s*t).
        """
        return Polynomial._make(
            self.nvars, {e: c * Fraction(1, sum(e) + k) for e, c in self.terms.items()}
        )

    def compose_affine(self, M, shift) -> "Polynomial":
        """p(M s + shift) as a polynomial in s (M is nvars x m)."""
        m = len(M[0]) if M else 0
        images = []
        for i in range(self.nvars):
            q = Polynomial.const(m, shift[i])
            for j in range(m):
                if as_gr(M[i][j]):
                    q = q + Polynomial.var(m, j, M[i][j])
            images.append(q)
        out = Polynomial.zero(m)
        cache: dict = {}
        for e, c in self.terms.items():
            term = Polynomial.const(m, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    # serialization --------------------------------------------------------
    def to_json(self) -> list:
        return [{"exponents": list(e), "coeff": str(c)} for e, c in self.items()]

    @classmethod
    def from_json(cls, nvars: int, data) -> "Polynomial":
        if isinstance(data, (str, int)):
            return cls.const(nvars, as_gr(data))
        if not isinstance(data, list):
            raise InvalidInput(f"polynomial must be a list of terms, got {type(data).__name__}")
        terms: dict = {}
        for item in data:
            try:
                e = tuple(item["exponents"])
                c = as_gr(item["coeff"])
            except (KeyError, TypeError) as exc:
                raise InvalidInput(f"bad polynomial term {item!r}") from exc
            terms[e] = terms.get(e, ZERO) + c
        return cls(nvars, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                f"t{k + 1}" + (f"^{m}" if m > 1 else "") for k, m in enumerate(e) if m
            )
            parts.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def poly_calculus(p: Polynomial, action: str, arg=None):
    """Dispatch helper: action in {eval, diff, mul}."""
    if action == "eval":
        return p.eval(arg)
    if action == "diff":
        return p.diff(arg)
    if action == "mul":
        return p * arg
    raise InvalidInput(f"unknown polynomial action {action!r}")


# ---------------------------------------------------------------------------
# entry helpers shared by linear algebra


def is_poly_entry(x) -> bool:
    return isinstance(x, Polynomial) and not x.is_constant()


def entry_nvars(rows) -> int | None:
    for row in rows:
        for x in row:
            if isinstance(x, Polynomial):
                return x.nvars
    return None


def eval_entry(x, point):
    if isinstance(x, Polynomial):
        return x.eval(point)
    return as_gr(x)


def conj_entry(x):
    if isinstance(x, Polynomial):
        return x.conj()
    return as_gr(x).conj()


def sample_points(nvars: int, count: int = DEFAULT_SAMPLE_COUNT, seed: int = DEFAULT_SAMPLE_SEED):
    """Deterministic rational sample points in the box [-2, 2]^n."""
    rng = random.Random(seed * 1009 + nvars)
    pts = []
    for _ in range(count):
        pts.append(tuple(
            GaussianRational(Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3))))
            for _ in range(nvars)
        ))
    return pts


def random_scalar(rng: random.Random, complex_coeffs: bool = True, bound: int = 3) -> GaussianRational:
    re = Fraction(rng.randint(-bound, bound), rng.choice((1, 1, 2)))
    im = Fraction(rng.randint(-bound, bound), rng.choice((1, 1, 2))) if complex_coeffs else Fraction(0)
    return GaussianRational._make(re, im)


def random_polynomial(nvars: int, degree: int, rng: random.Random, terms: int = 3,
                      complex_coeffs: bool = True) -> Polynomial:
    """A sparse random polynomial with at most ``terms`` monomials."""
    acc = {}
    for _ in range(terms):
        d = rng.randint(0, degree)
        e = [0] * nvars
        for _ in range(d):
            e[rng.randrange(nvars)] += 1
        acc[tuple(e)] = random_scalar(rng, complex_coeffs)
    return Polynomial(nvars, acc)


# ---------------------------------------------------------------------------
# linear algebra over Q(i)


def _scalar_rows(rows) -> list[list[GaussianRational]]:
    return [[as_gr(x) for x in row] for row in rows]


def rref(rows) -> tuple[list[list[GaussianRational]], list[int]]:
    """Reduced row echelon form over Q(i) and the pivot columns."""
    M = _scalar_rows(rows)
    if not M:
        return M, []
    nr, nc = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        p = next((i for i in range(r, nr) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inv()
        M[r] = [x * inv for x in M[r]]
        for i in range(nr):
            if i != r and M[i][c]:
                f = M[i][c]
                Mi, Mr = M[i], M[r]
                M[i] = [a - f * b if b else a for a, b in zip(Mi, Mr)]
        pivots.append(c)
        r += 1
    return M, pivots


def _bareiss(rows):
    """Fraction-free forward elimination; returns (echelon rows, pivots)."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    nr, nc = len(M), len(M[0])
    prev = None
    r = 0
    pivots = []
    for c in range(nc):
        if r == nr:
            break
        p = next((i for i in range(r, nr) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        for i in range(r + 1, nr):
            mic = M[i][c]
            for j in range(c + 1, nc):
                v = piv * M[i][j] - mic * M[r][j]
                if prev is not None:
                    v = v / prev
                M[i][j] = v
            M[i][c] = 0 * piv
        prev = piv
        pivots.append(c)
        r += 1
    return M, pivots


def _generic_rank(rows) -> int:
    n = entry_nvars(rows)
    if n is None or not any(is_poly_entry(x) for row in rows for x in row):
        return len(rref(rows)[1])
    P = [[x if isinstance(x, Polynomial) else Polynomial.const(n, x) for x in row] for row in rows]
    return len(_bareiss(P)[1])


def _points_for(rows, points):
    n = entry_nvars(rows)
    if n is None:
        return n, []
    return n, (sample_points(n) if points is None else points)


def rank(rows, points=None, check: bool = True) -> int:
    """Rank over the fraction field; with polynomial entries the rank is
    confirmed at sample points and a drop raises RankDropAtPoint."""
    if not rows or not rows[0]:
        return 0
    g = _generic_rank(rows)
    if check and any(is_poly_entry(x) for row in rows for x in row):
        _, pts = _points_for(rows, points)
        for pt in pts:
            rp = len(rref([[eval_entry(x, pt) for x in row] for row in rows])[1])
            if rp != g:
                raise RankDropAtPoint(f"rank {rp} at sample point, generic rank {g}", pt)
    return g


def kernel(rows) -> list[list]:
    """Basis of the right null space (fraction-field kernel for polynomial
    entries, returned with polynomial coordinates)."""
    if not rows:
        return []
    nc = len(rows[0])
    n = entry_nvars(rows)
    if n is None or not any(is_poly_entry(x) for row in rows for x in row):
        R, piv = rref(rows)
        basis = []
        for f in (c for c in range(nc) if c not in piv):
            v = [ZERO] * nc
            v[f] = ONE
            for i, c in enumerate(piv):
                v[c] = -R[i][f]
            basis.append(v)
        return basis
    P = [[x if isinstance(x, Polynomial) else Polynomial.const(n, x) for x in row] for row in rows]
    U, piv = _bareiss(P)
    one = Polynomial.const(n, 1)
    zero = Polynomial.zero(n)
    basis = []
    for f in (c for c in range(nc) if c not in piv):
        num = [zero] * nc
        den = [one] * nc
        num[f] = one
        for i in reversed(range(len(piv))):
            c = piv[i]
            # U[i][c] * x_c = -sum_{j>c} U[i][j] x_j, with x_j = num_j/den_j
            s_num, s_den = zero, one
            for j in range(c + 1, nc):
                if U[i][j] and num[j]:
                    s_num = s_num * den[j] + U[i][j] * num[j] * s_den
                    s_den = s_den * den[j]
            num[c] = -s_num
            den[c] = s_den * U[i][c]
        common = one
        for d in den:
            common = common * d
        basis.append([num[k] * common.exact_div(den[k]) if num[k] else zero for k in range(nc)])
    return basis


def solve(rows, b) -> list | None:
    """One solution x of M x = b over Q(i) (free variables zero), or None."""
    if not rows:
        return []
    nc = len(rows[0])
    aug = [list(r) + [bb] for r, bb in zip(rows, b)]
    R, piv = rref(aug)
    if nc in piv:
        return None
    x = [ZERO] * nc
    for i, c in enumerate(piv):
        x[c] = R[i][nc]
    return x


def transpose(rows):
    return [list(c) for c in zip(*rows)] if rows else []


def in_span(vectors, v, points=None) -> bool:
    """Is ``v`` in the span of ``vectors``?  Polynomial inputs are decided over
    the fraction field and confirmed at sample points."""
    if not vectors:
        return all(not x for x in v)
    rows = transpose(list(vectors))
    has_poly = any(is_poly_entry(x) for row in rows for x in row) or any(is_poly_entry(x) for x in v)
    if not has_poly:
        return solve(rows, v) is not None
    aug = transpose(list(vectors) + [list(v)])
    r0 = _generic_rank(rows)
    r1 = _generic_rank(aug)
    n = entry_nvars(aug)
    pts = sample_points(n) if points is None else points
    for pt in pts:
        Mp = [[eval_entry(x, pt) for x in row] for row in rows]
        rp = len(rref(Mp)[1]) if Mp and Mp[0] else 0
        if rp != r0:
            raise RankDropAtPoint(f"spanning set has rank {rp} at sample point, generic {r0}", pt)
        if r1 == r0 and solve(Mp, [eval_entry(x, pt) for x in v]) is None:
            raise RankDropAtPoint("generic membership fails at sample point", pt)
    return r1 == r0


def span_basis(vectors) -> list[list[GaussianRational]]:
    """Row-reduced basis of the span of scalar vectors."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    R, piv = rref(vecs)
    return [R[i] for i in range(len(piv))]


def span_dim(vectors) -> int:
    vecs = [list(v) for v in vectors]
    return len(rref(vecs)[1]) if vecs and vecs[0] else 0


def span_equal(A, B) -> bool:
    A, B = list(A), list(B)
    da, db = span_dim(A), span_dim(B)
    return da == db and span_dim(A + B) == da


def span_intersection(A, B) -> list[list[GaussianRational]]:
    """Basis of span(A) ∩ span(B) (scalar vectors)."""
    A, B = span_basis(A), span_basis(B)
    if not A or not B:
        return []
    # a.A = b.B  <=>  [A^T | -B^T] (a, b) = 0
    cols = [list(v) for v in A] + [[-x for x in v] for v in B]
    K = kernel(transpose(cols))
    out = [[sum((k[i] * A[i][j] for i in range(len(A))), ZERO) for j in range(len(A[0]))] for k in K]
    return span_basis(out)


def complement_indices(vectors, dim: int) -> list[int]:
    """Standard basis indices completing span(vectors) to the whole space
    (greedy in basis order)."""
    chosen = [list(v) for v in vectors]
    base = span_dim(chosen)
    out = []
    for k in range(dim):
        e = [ZERO] * dim
        e[k] = ONE
        if span_dim(chosen + [e]) > base:
            chosen.append(e)
            base += 1
            out.append(k)
    return out


def mat_mul(A, B):
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col)), ZERO * 0) for col in Bt] for row in A]


def mat_vec(A, v):
    out = []
    for row in A:
        s = None
        for a, x in zip(row, v):
            if a and x:
                s = a * x if s is None else s + a * x
        out.append(ZERO if s is None else s)
    return out


def identity(n: int):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def mat_inv(A):
    n = len(A)
    R, piv = rref([list(row) + e for row, e in zip(A, identity(n))])
    if piv[:n] != list(range(n)):
        raise InvalidInput("singular matrix")
    return [row[n:] for row in R]


def det(A):
    """Determinant by fraction-free elimination (scalars or polynomials)."""
    n = len(A)
    if n == 0:
        return ONE
    M = [list(r) for r in A]
    sign = 1
    prev = None
    for k in range(n - 1):
        p = next((i for i in range(k, n) if M[i][k]), None)
        if p is None:
            return 0 * M[0][0] if isinstance(M[0][0], Polynomial) else ZERO
        if p != k:
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = v if prev is None else v / prev
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return d if sign > 0 else -d


class ExactMatrix:
    """Row-major matrix with GaussianRational or Polynomial entries."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise InvalidInput("ragged matrix")

    @property
    def shape(self):
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def rank(self, points=None) -> int:
        return rank(self.rows, points)

    def kernel(self):
        return kernel(self.rows)

    def solve(self, b):
        return solve(self.rows, b)

    def contains(self, v, points=None) -> bool:
        """Column-span membership."""
        return in_span(transpose(self.rows), v, points)

    def T(self) -> "ExactMatrix":
        return ExactMatrix(transpose(self.rows))

    def conj(self) -> "ExactMatrix":
        return ExactMatrix([[conj_entry(x) for x in r] for r in self.rows])

    def at(self, point) -> "ExactMatrix":
        return ExactMatrix([[eval_entry(x, point) for x in r] for r in self.rows])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix(mat_mul(self.rows, other.rows))

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows


def linear_solve(M, mode: str, arg=None, points=None):
    """Dispatch helper: mode in {rank, kernel, solve, member}."""
    rows = M.rows if isinstance(M, ExactMatrix) else M
    if mode == "rank":
        return rank(rows, points)
    if mode == "kernel":
        return kernel(rows)
    if mode == "solve":
        return solve(rows, arg)
    if mode == "member":
        return in_span(transpose(rows), arg, points)
    raise InvalidInput(f"unknown linear_solve mode {mode!r}")


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, v):
    return [c * x for x in v]


def vec_conj(v):
    return [conj_entry(x) for x in v]


def is_zero_vec(v: Iterable) -> bool:
    return all(not x for x in v)


def sparse_rank(rows: Iterable[dict]) -> int:
    """Rank of a matrix given as sparse rows ``{col: GaussianRational}``.

    Rows are reduced one at a time against the pivots found so far, which
    keeps highly redundant systems (derivation equations) cheap.
    """
    pivots: dict[int, dict] = {}
    for row in rows:
        r = {k: as_gr(v) for k, v in row.items() if v}
        while r:
            c = min(r)
            if c not in pivots:
                inv = r[c].inv()
                pivots[c] = {k: v * inv for k, v in r.items()}
                break
            f = r[c]
            for k, v in pivots[c].items():
                nv = r.get(k, ZERO) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return len(pivots)
