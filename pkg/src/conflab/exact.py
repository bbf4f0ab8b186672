"""Exact arithmetic kernel: exponential scalars, polynomials, rational functions.

The coefficient ring is the group ring Q[Z^2]: finite sums

    sum_k  c_k * E1^(m_k) * E2^(n_k),        c_k in Q,  (m_k, n_k) in Z^2,

where E1 and E2 stand for exp(a) and exp(b) of two formal real parameters.
Keeping (a, b) formal lets scaling identities be verified once for every
parameter value; specializing them turns a scalar into a float.  Polynomials
over this ring carry metric components, rational functions carry inverse
metrics and curvature.

Canonical forms, used for structural equality:

* ExactScalar: no zero coefficients stored; zero is the empty sum.
* Polynomial: exponent multi-index -> ExactScalar, no zero coefficients.
* RationalFunction: numerator and denominator with their common
  rational-coefficient polynomial divisor removed, and the leading term of
  the denominator's leading coefficient normalized to 1.

Full multivariate GCD is implemented over rational coefficients only (via a
primitive pseudo-remainder sequence); for coefficients with E-terms the
reduction strips the common rational-polynomial divisor of all exponential
strata.  That is exhaustive for every fraction produced by the curvature
pipeline, whose denominators are powers of a metric determinant with
rational coefficients.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, DivisionByZeroFunction, PoleAtPoint

_F0 = Fraction(0)
_F1 = Fraction(1)


# ---------------------------------------------------------------------------
# Private engine: exponent-dict polynomials with Fraction coefficients.
# Used both for the scalar ring (2 exponents, after clearing Laurent shifts)
# and for rational-function reduction (n variables).
# ---------------------------------------------------------------------------


def _grlex_key(e: tuple[int, ...]) -> tuple:
    return (sum(e), e)


def _fd_add(f: dict, g: dict) -> dict:
    out = dict(f)
    for e, c in g.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s = s + c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _fd_neg(f: dict) -> dict:
    return {e: -c for e, c in f.items()}


def _fd_sub(f: dict, g: dict) -> dict:
    return _fd_add(f, _fd_neg(g))


def _fd_scale(f: dict, c: Fraction) -> dict:
    if not c:
        return {}
    return {e: c * v for e, v in f.items()}


def _fd_mul(f: dict, g: dict) -> dict:
    if not f or not g:
        return {}
    if len(g) < len(f):
        f, g = g, f
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            s = out.get(e)
            if s is None:
                out[e] = c1 * c2
            else:
                s = s + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
    return out


def _fd_leading(f: dict) -> tuple[tuple[int, ...], Fraction]:
    e = max(f, key=_grlex_key)
    return e, f[e]


def _fd_monic(f: dict) -> dict:
    if not f:
        return f
    _, c = _fd_leading(f)
    if c == 1:
        return f
    return _fd_scale(f, 1 / c)


def _fd_divexact(f: dict, g: dict) -> dict | None:
    """Exact quotient f / g, or None when g does not divide f."""
    if not g:
        raise DivisionByZeroFunction("division by zero polynomial")
    if not f:
        return {}
    ge, gc = _fd_leading(g)
    rem = dict(f)
    out: dict = {}
    while rem:
        re, rc = _fd_leading(rem)
        qe = tuple(a - b for a, b in zip(re, ge))
        if any(x < 0 for x in qe):
            return None
        qc = rc / gc
        out[qe] = qc
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(qe, e2))
            s = rem.get(e, _F0) - qc * c2
            if s:
                rem[e] = s
            else:
                rem.pop(e, None)
    return out


def _fd_degree_in(f: dict, v: int) -> int:
    return max((e[v] for e in f), default=0)


def _fd_is_constant(f: dict) -> bool:
    return all(not any(e) for e in f)


def _uni_coeffs(f: dict, v: int) -> list[dict]:
    """View f as univariate in variable v; coefficients keep full-width
    exponent tuples with the v slot zeroed."""
    d = _fd_degree_in(f, v)
    out: list[dict] = [dict() for _ in range(d + 1)]
    for e, c in f.items():
        low = e[:v] + (0,) + e[v + 1 :]
        out[e[v]][low] = c
    while out and not out[-1]:
        out.pop()
    return out


def _uni_collect(coeffs: list[dict], v: int) -> dict:
    out: dict = {}
    for d, cf in enumerate(coeffs):
        for e, c in cf.items():
            out[e[:v] + (d,) + e[v + 1 :]] = c
    return out


def _uni_prem(a: list[dict], b: list[dict]) -> list[dict]:
    """Pseudo-remainder of univariate polynomials over the coefficient ring.

    Multiplies by the leading coefficient of b at each elimination round, so
    the computation never leaves the ring.
    """
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    while r and len(r) - 1 >= db:
        d = len(r) - 1
        lead = r[-1]
        r = [_fd_mul(c, lb) for c in r[:-1]]
        off = d - db
        for i in range(db):
            r[off + i] = _fd_sub(r[off + i], _fd_mul(lead, b[i]))
        while r and not r[-1]:
            r.pop()
    return r


def _fd_gcd_many(polys: Iterable[dict]) -> dict:
    g: dict = {}
    for f in polys:
        g = _fd_gcd(g, f)
        if g and _fd_is_constant(g):
            return g  # already a unit
    return g


_ONE_CACHE: dict[int, dict] = {}


def _fd_one(width: int) -> dict:
    f = _ONE_CACHE.get(width)
    if f is None:
        f = {(0,) * width: _F1}
        _ONE_CACHE[width] = f
    return dict(f)


def _fd_gcd(f: dict, g: dict) -> dict:
    """Monic multivariate GCD over Q, primitive pseudo-remainder sequence."""
    if not f:
        return _fd_monic(dict(g))
    if not g:
        return _fd_monic(dict(f))
    width = len(next(iter(f)))
    if _fd_is_constant(f) or _fd_is_constant(g):
        return _fd_one(width)
    v = max(
        i
        for i in range(width)
        if _fd_degree_in(f, i) > 0 or _fd_degree_in(g, i) > 0
    )
    fu = _uni_coeffs(f, v)
    gu = _uni_coeffs(g, v)
    cf = _fd_gcd_many(fu)
    cg = _fd_gcd_many(gu)
    fp = [_fd_divexact(c, cf) for c in fu]
    gp = [_fd_divexact(c, cg) for c in gu]
    cont = _fd_gcd(cf, cg)
    a, b = (fp, gp) if len(fp) >= len(gp) else (gp, fp)
    while True:
        r = _uni_prem(a, b)  # type: ignore[arg-type]
        if not r:
            core = b
            break
        if len(r) == 1:
            # nonzero remainder of v-degree 0: primitive parts are coprime
            core = [_fd_one(width)]
            break
        rc = _fd_gcd_many(r)
        r = [_fd_divexact(c, rc) for c in r]
        a, b = b, r
    result = _uni_collect([_fd_mul(c, cont) for c in core], v)  # type: ignore[arg-type]
    return _fd_monic(result)


def _fd_eval(f: dict, point: Sequence[Fraction]) -> Fraction:
    total = _F0
    for e, c in f.items():
        m = c
        for x, k in zip(point, e):
            if k:
                m = m * x**k
        total += m
    return total


# ---------------------------------------------------------------------------
# ExactScalar
# ---------------------------------------------------------------------------


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _term_key(mn: tuple[int, int]) -> tuple:
    return (mn[0] + mn[1], mn)


class ExactScalar:
    """Finite rational combination of E1^m * E2^n with integer m, n.

    Immutable.  Structural equality is mathematical equality because zero
    coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Fraction | int] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            for mn, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[(int(mn[0]), int(mn[1]))] = c
        object.__setattr__(self, "_terms", clean)

    @staticmethod
    def _raw(terms: dict) -> "ExactScalar":
        s = ExactScalar.__new__(ExactScalar)
        object.__setattr__(s, "_terms", terms)
        return s

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "ExactScalar":
        return _SCALAR_ZERO

    @staticmethod
    def one() -> "ExactScalar":
        return _SCALAR_ONE

    @staticmethod
    def from_rational(c: Fraction | int) -> "ExactScalar":
        c = _as_fraction(c)
        return ExactScalar._raw({(0, 0): c} if c else {})

    @staticmethod
    def exp_term(m: int, n: int, coeff: Fraction | int = 1) -> "ExactScalar":
        c = _as_fraction(coeff)
        return ExactScalar._raw({(m, n): c} if c else {})

    # -- structure ----------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return all(mn == (0, 0) for mn in self._terms)

    @property
    def is_term(self) -> bool:
        return len(self._terms) == 1

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return _F0
        if self.is_rational:
            return self._terms[(0, 0)]
        raise ValueError(f"scalar {self} carries exponential terms")

    def leading(self) -> tuple[tuple[int, int], Fraction]:
        mn = max(self._terms, key=_term_key)
        return mn, self._terms[mn]

    def leading_unit(self) -> "ExactScalar":
        """The leading term alone, as a single-term (invertible) scalar."""
        mn, c = self.leading()
        return ExactScalar._raw({mn: c})

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mn, c in other._terms.items():
            s = out.get(mn)
            if s is None:
                out[mn] = c
            else:
                s = s + c
                if s:
                    out[mn] = s
                else:
                    del out[mn]
        return ExactScalar._raw(out)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar._raw({mn: -c for mn, c in self._terms.items()})

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return self + (-other)

    def __mul__(self, other) -> "ExactScalar":
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.from_rational(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return _SCALAR_ZERO
        if len(a) == 1:
            (m1, n1), c1 = next(iter(a.items()))
            return ExactScalar._raw(
                {(m1 + m2, n1 + n2): c1 * c2 for (m2, n2), c2 in b.items()}
            )
        out: dict = {}
        for (m1, n1), c1 in a.items():
            for (m2, n2), c2 in b.items():
                mn = (m1 + m2, n1 + n2)
                s = out.get(mn)
                if s is None:
                    out[mn] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        out[mn] = s
                    else:
                        del out[mn]
        return ExactScalar._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ExactScalar":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = _SCALAR_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "ExactScalar":
        """Multiplicative inverse; only single-term scalars are units."""
        if len(self._terms) != 1:
            raise DivisionByZeroFunction(
                f"scalar {self} is not invertible in the exact ring"
            )
        (m, n), c = next(iter(self._terms.items()))
        return ExactScalar._raw({(-m, -n): 1 / c})

    def divide_exact(self, divisor: "ExactScalar") -> "ExactScalar | None":
        """Quotient self / divisor if it exists in the ring, else None."""
        if divisor.is_zero:
            raise DivisionByZeroFunction("division by zero scalar")
        if self.is_zero:
            return _SCALAR_ZERO
        if divisor.is_term:
            return self * divisor.inverse()
        # clear Laurent shifts and do bivariate exact division over Q
        shift_m = min(m for (m, _) in self._terms) - min(
            m for (m, _) in divisor._terms
        )
        shift_n = min(n for (_, n) in self._terms) - min(
            n for (_, n) in divisor._terms
        )
        fm = min(m for (m, _) in self._terms)
        fn = min(n for (_, n) in self._terms)
        gm = min(m for (m, _) in divisor._terms)
        gn = min(n for (_, n) in divisor._terms)
        f = {(m - fm, n - fn): c for (m, n), c in self._terms.items()}
        g = {(m - gm, n - gn): c for (m, n), c in divisor._terms.items()}
        q = _fd_divexact(f, g)
        if q is None:
            return None
        return ExactScalar._raw(
            {(m + shift_m, n + shift_n): c for (m, n), c in q.items()}
        )

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, a: float, b: float) -> float:
        """Specialize E1 -> exp(a), E2 -> exp(b).

        Raises OverflowError when a term exponent exceeds the float range.
        """
        total = 0.0
        for (m, n), c in self._terms.items():
            total += float(c) * math.exp(m * a + n * b)
        return total

    # -- protocol -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.from_rational(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mn in sorted(self._terms, key=_term_key, reverse=True):
            c = self._terms[mn]
            factors = []
            if c != 1 or mn == (0, 0):
                factors.append(str(c))
            for name, k in zip(("E1", "E2"), mn):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts).replace("+ -", "- ")


_SCALAR_ZERO = ExactScalar._raw({})
_SCALAR_ONE = ExactScalar._raw({(0, 0): _F1})


def _coerce_scalar(value) -> ExactScalar:
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactScalar.from_rational(value)
    raise TypeError(f"cannot treat {type(value).__name__} as an exact scalar")


# ---------------------------------------------------------------------------
# Polynomial
# ---------------------------------------------------------------------------


class Polynomial:
    """Multivariate polynomial in x1..xn with ExactScalar coefficients.

    Immutable; monomials are exponent tuples of length ``nvars``; zero
    coefficients are never stored, so structural equality is mathematical
    equality.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        clean: dict[tuple[int, ...], ExactScalar] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise DimensionMismatch(
                        f"monomial {e} does not have {nvars} exponents"
                    )
                s = _coerce_scalar(c)
                if not s.is_zero:
                    clean[tuple(int(k) for k in e)] = s
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", clean)

    @staticmethod
    def _raw(nvars: int, terms: dict) -> "Polynomial":
        p = Polynomial.__new__(Polynomial)
        object.__setattr__(p, "nvars", nvars)
        object.__setattr__(p, "_terms", terms)
        return p

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial._raw(nvars, {})

    @staticmethod
    def one(nvars: int) -> "Polynomial":
        return Polynomial.constant(nvars, _F1)

    @staticmethod
    def constant(nvars: int, value) -> "Polynomial":
        s = _coerce_scalar(value)
        if s.is_zero:
            return Polynomial._raw(nvars, {})
        return Polynomial._raw(nvars, {(0,) * nvars: s})

    @staticmethod
    def variable(nvars: int, index: int) -> "Polynomial":
        """The coordinate x_{index+1} (0-based index)."""
        if not 0 <= index < nvars:
            raise DimensionMismatch(f"variable index {index} out of range")
        e = tuple(1 if i == index else 0 for i in range(nvars))
        return Polynomial._raw(nvars, {e: _SCALAR_ONE})

    # -- structure ----------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], ExactScalar]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return all(c.is_rational for c in self._terms.values())

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> ExactScalar:
        return self._terms.get((0,) * self.nvars, _SCALAR_ZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def leading(self) -> tuple[tuple[int, ...], ExactScalar]:
        e = max(self._terms, key=_grlex_key)
        return e, self._terms[e]

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise DimensionMismatch(
                f"polynomials over {self.nvars} and {other.nvars} variables"
            )

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s.is_zero:
                    del out[e]
                else:
                    out[e] = s
        return Polynomial._raw(self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scalar_mul(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial.zero(self.nvars)
        if len(b) < len(a):
            a, b = b, a
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                prod = c1 * c2
                s = out.get(e)
                if s is None:
                    if not prod.is_zero:
                        out[e] = prod
                else:
                    s = s + prod
                    if s.is_zero:
                        del out[e]
                    else:
                        out[e] = s
        return Polynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def scalar_mul(self, value) -> "Polynomial":
        s = _coerce_scalar(value)
        if s.is_zero or not self._terms:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(
            self.nvars, {e: c * s for e, c in self._terms.items()}
        )

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        out = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self, var: int) -> "Polynomial":
        """Partial derivative with respect to x_{var+1} (0-based var)."""
        out: dict = {}
        for e, c in self._terms.items():
            k = e[var]
            if k:
                e2 = e[:var] + (k - 1,) + e[var + 1 :]
                s = out.get(e2)
                term = c * Fraction(k)
                out[e2] = term if s is None else s + term
        return Polynomial._raw(
            self.nvars, {e: c for e, c in out.items() if not c.is_zero}
        )

    def scale_coords(self, factors: Sequence[ExactScalar]) -> "Polynomial":
        """Substitute x_i -> factors[i] * x_i.  Exact."""
        if len(factors) != self.nvars:
            raise DimensionMismatch("one scale factor per variable required")
        out: dict = {}
        for e, c in self._terms.items():
            scale = _SCALAR_ONE
            for f, k in zip(factors, e):
                if k:
                    scale = scale * f**k
            prod = c * scale
            s = out.get(e)
            out[e] = prod if s is None else s + prod
        return Polynomial._raw(
            self.nvars, {e: c for e, c in out.items() if not c.is_zero}
        )

    # -- evaluation ---------------------------------------------------------

    def eval_exact(self, point: Sequence[Fraction | int]) -> ExactScalar:
        if len(point) != self.nvars:
            raise DimensionMismatch("point size does not match variable count")
        pt = [_as_fraction(x) for x in point]
        total = _SCALAR_ZERO
        for e, c in self._terms.items():
            m = _F1
            for x, k in zip(pt, e):
                if k:
                    m = m * x**k
            total = total + c * m
        return total

    def eval_float(self, point: Sequence[float], params: tuple[float, float] | None = None) -> float:
        if len(point) != self.nvars:
            raise DimensionMismatch("point size does not match variable count")
        total = 0.0
        for e, c in self._terms.items():
            if params is None:
                coeff = float(c.as_fraction())
            else:
                coeff = c.evaluate(*params)
            m = coeff
            for x, k in zip(point, e):
                if k:
                    m *= x**k
            total += m
        return total

    # -- exponential strata --------------------------------------------------

    def strata(self) -> dict[tuple[int, int], dict]:
        """Split by E1/E2 exponent: the (m, n) stratum is the rational-
        coefficient polynomial multiplying E1^m E2^n."""
        out: dict[tuple[int, int], dict] = {}
        for e, c in self._terms.items():
            for mn, q in c._terms.items():
                out.setdefault(mn, {})[e] = q
        return out

    @staticmethod
    def from_strata(nvars: int, strata: Mapping[tuple[int, int], dict]) -> "Polynomial":
        acc: dict[tuple[int, ...], dict] = {}
        for mn, poly in strata.items():
            for e, q in poly.items():
                if q:
                    acc.setdefault(e, {})[mn] = acc.setdefault(e, {}).get(mn, _F0) + q
        terms = {}
        for e, mnmap in acc.items():
            s = ExactScalar._raw({mn: q for mn, q in mnmap.items() if q})
            if not s.is_zero:
                terms[e] = s
        return Polynomial._raw(nvars, terms)

    # -- protocol -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=_grlex_key, reverse=True):
            c = self._terms[e]
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}"
                for i, k in enumerate(e)
                if k
            )
            if not mono:
                parts.append(f"({c})" if not (c.is_rational or c.is_term) else str(c))
                continue
            if c == _SCALAR_ONE:
                parts.append(mono)
            elif c.is_rational:
                q = c.as_fraction()
                parts.append(f"-{mono}" if q == -1 else f"{q}*{mono}")
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def polynomial_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic multivariate GCD of rational-coefficient polynomials."""
    if f.nvars != g.nvars:
        raise DimensionMismatch("gcd operands over different variable counts")
    if not (f.is_rational and g.is_rational):
        raise ValueError("gcd is implemented over rational coefficients only")
    fd = {e: c.as_fraction() for e, c in f._terms.items()}
    gd = {e: c.as_fraction() for e, c in g._terms.items()}
    return Polynomial._raw(
        f.nvars, {e: ExactScalar.from_rational(c) for e, c in _fd_gcd(fd, gd).items()}
    )


# ---------------------------------------------------------------------------
# RationalFunction
# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient of polynomials, kept in reduced canonical form.

    Construction removes the common rational-coefficient polynomial divisor
    of all exponential strata of numerator and denominator, then scales both
    so the leading term of the denominator's leading coefficient is exactly
    1.  Structural equality of reduced forms is used throughout the test
    suite as mathematical equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.one(num.nvars)
        if num.nvars != den.nvars:
            raise DimensionMismatch("numerator/denominator variable mismatch")
        if den.is_zero:
            raise DivisionByZeroFunction("zero denominator")
        num, den = _reduce_fraction(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @staticmethod
    def _raw(num: Polynomial, den: Polynomial) -> "RationalFunction":
        r = RationalFunction.__new__(RationalFunction)
        object.__setattr__(r, "num", num)
        object.__setattr__(r, "den", den)
        return r

    @staticmethod
    def zero(nvars: int) -> "RationalFunction":
        return RationalFunction._raw(Polynomial.zero(nvars), Polynomial.one(nvars))

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFunction":
        return RationalFunction._raw(p, Polynomial.one(p.nvars))

    @staticmethod
    def constant(nvars: int, value) -> "RationalFunction":
        return RationalFunction.from_polynomial(Polynomial.constant(nvars, value))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def is_polynomial(self) -> bool:
        return self.den == Polynomial.one(self.nvars)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "RationalFunction":
        other = _coerce_rf(other, self.nvars)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        other = _coerce_rf(other, self.nvars)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        other = _coerce_rf(other, self.nvars)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other) -> "RationalFunction":
        other = _coerce_rf(other, self.nvars)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return RationalFunction.zero(self.nvars)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = _coerce_rf(other, self.nvars)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZeroFunction("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def derivative(self, var: int) -> "RationalFunction":
        """Quotient-rule derivative with respect to x_{var+1}."""
        if self.is_polynomial():
            return RationalFunction.from_polynomial(self.num.derivative(var))
        n, d = self.num, self.den
        return RationalFunction(
            n.derivative(var) * d - n * d.derivative(var), d * d
        )

    # -- evaluation ---------------------------------------------------------

    def eval_exact(self, point: Sequence[Fraction | int]) -> ExactScalar:
        dv = self.den.eval_exact(point)
        if dv.is_zero:
            raise PoleAtPoint(f"denominator vanishes at {tuple(point)}")
        nv = self.num.eval_exact(point)
        if nv.is_zero:
            return _SCALAR_ZERO
        q = nv.divide_exact(dv)
        if q is None:
            raise ValueError(
                "evaluated denominator is not invertible in the exact ring"
            )
        return q

    def eval_float(self, point: Sequence[float], params: tuple[float, float] | None = None) -> float:
        dv = self.den.eval_float(point, params)
        if dv == 0.0:
            raise PoleAtPoint(f"denominator vanishes at {tuple(point)}")
        return self.num.eval_float(point, params) / dv

    # -- protocol -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce_rf(other, self.nvars)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.is_polynomial():
            return repr(self.num)
        return f"({self.num}) / ({self.den})"


def _coerce_rf(value, nvars: int):
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction.from_polynomial(value)
    if isinstance(value, (int, Fraction, ExactScalar)):
        return RationalFunction.constant(nvars, value)
    return NotImplemented


def _reduce_fraction(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    nvars = num.nvars
    if num.is_zero:
        return Polynomial.zero(nvars), Polynomial.one(nvars)
    num_strata = num.strata()
    den_strata = den.strata()
    g = _fd_gcd_many(list(den_strata.values()) + list(num_strata.values()))
    if g and not _fd_is_constant(g):
        num = Polynomial.from_strata(
            nvars, {mn: _fd_divexact(f, g) for mn, f in num_strata.items()}
        )
        den = Polynomial.from_strata(
            nvars, {mn: _fd_divexact(f, g) for mn, f in den_strata.items()}
        )
    # pin the unit: leading term of the denominator's leading coefficient -> 1
    _, lc = den.leading()
    unit = lc.leading_unit()
    if unit != _SCALAR_ONE:
        inv = unit.inverse()
        num = num.scalar_mul(inv)
        den = den.scalar_mul(inv)
    return num, den


def fraction_over_power(
    num: Polynomial,
    base: Polynomial,
    power: int,
    base_power: Polynomial | None = None,
) -> RationalFunction:
    """Reduced fraction num / base**power.

    Same value and same canonical form as RationalFunction(num, base**power),
    but the common divisor is collected by iterated gcds against the small
    base: with d1 = gcd(num, base), f1 = num/d1, d_{k+1} = gcd(f_k, d_k),
    the product d1 d2 ... (at most ``power`` factors) equals
    gcd(num, base**power).  Curvature denominators are determinant powers,
    where gcd runs against the determinant itself instead of its fourth
    power.  ``base_power`` may pass in a precomputed base**power.
    """
    if power < 0:
        raise ValueError("negative denominator power")
    nvars = num.nvars
    if base.nvars != nvars:
        raise DimensionMismatch("numerator/denominator variable mismatch")
    if base.is_zero:
        raise DivisionByZeroFunction("zero denominator")
    if num.is_zero:
        return RationalFunction.zero(nvars)
    if power == 0:
        return RationalFunction.from_polynomial(num)
    base_strata = base.strata()
    if len(base_strata) != 1:
        # several exponential strata in the base: no single rational dict to
        # iterate against, fall back to the generic constructor
        return RationalFunction(num, base_power if base_power is not None else base**power)
    base_dict = next(iter(base_strata.values()))
    num_strata = num.strata()
    f = _fd_gcd_many(list(num_strata.values()))
    g_total: dict | None = None
    d = _fd_gcd(f, base_dict)
    rounds = 0
    while rounds < power and d and not _fd_is_constant(d):
        g_total = d if g_total is None else _fd_mul(g_total, d)
        f = _fd_divexact(f, d)
        rounds += 1
        d = _fd_gcd(f, d)
    if base_power is None:
        base_power = base**power
    if g_total is None:
        out_num, den = num, base_power
    else:
        out_num = Polynomial.from_strata(
            nvars, {mn: _fd_divexact(s, g_total) for mn, s in num_strata.items()}
        )
        (den_mn, den_dict), = base_power.strata().items()
        den = Polynomial.from_strata(
            nvars, {den_mn: _fd_divexact(den_dict, g_total)}
        )
    _, lc = den.leading()
    unit = lc.leading_unit()
    if unit != _SCALAR_ONE:
        inv = unit.inverse()
        out_num = out_num.scalar_mul(inv)
        den = den.scalar_mul(inv)
    return RationalFunction._raw(out_num, den)


# ---------------------------------------------------------------------------
# Polynomial expression parsing (x1..xn, +, -, *, /, ^ or **, rationals)
# ---------------------------------------------------------------------------


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Parse an expression like ``x3^2 + 2*x1*x2 - 1/2`` into a Polynomial.

    Division is allowed only by nonzero constants; exponents must be
    nonnegative integer literals.
    """
    text = text.strip().replace("^", "**")
    if not text:
        raise ValueError("empty polynomial expression")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"malformed polynomial expression: {text!r}") from exc
    return _ast_to_poly(tree.body, nvars)


def _ast_to_poly(node: ast.AST, nvars: int) -> Polynomial:
    if isinstance(node, ast.BinOp):
        op = node.op
        if isinstance(op, ast.Pow):
            base = _ast_to_poly(node.left, nvars)
            if not (
                isinstance(node.right, ast.Constant)
                and isinstance(node.right.value, int)
                and node.right.value >= 0
            ):
                raise ValueError("exponents must be nonnegative integer literals")
            return base ** node.right.value
        left = _ast_to_poly(node.left, nvars)
        right = _ast_to_poly(node.right, nvars)
        if isinstance(op, ast.Add):
            return left + right
        if isinstance(op, ast.Sub):
            return left - right
        if isinstance(op, ast.Mult):
            return left * right
        if isinstance(op, ast.Div):
            if not right.is_constant():
                raise ValueError("division only by constants is supported")
            c = right.constant_value().as_fraction()
            if not c:
                raise ValueError("division by zero in polynomial expression")
            return left.scalar_mul(1 / c)
        raise ValueError(f"unsupported operator {type(op).__name__}")
    if isinstance(node, ast.UnaryOp):
        val = _ast_to_poly(node.operand, nvars)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
        raise ValueError("unsupported unary operator")
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int):
            return Polynomial.constant(nvars, node.value)
        raise ValueError(f"non-integer literal {node.value!r}; use fractions like 1/2")
    if isinstance(node, ast.Name):
        name = node.id
        if name.startswith("x") and name[1:].isdigit():
            idx = int(name[1:])
            if 1 <= idx <= nvars:
                return Polynomial.variable(nvars, idx - 1)
            raise ValueError(f"variable {name} outside x1..x{nvars}")
        raise ValueError(f"unknown symbol {name!r}")
    raise ValueError(f"unsupported syntax element {type(node).__name__}")
