"""Exact coefficients: polynomials over Q in formal logarithm symbols L_p.

A value of this ring is one of three canonical Python objects:

* ``int`` for integral rationals (including 0),
* ``fractions.Fraction`` for non-integral rationals,
* :class:`Coefficient` when at least one non-constant monomial is present.

Every arithmetic result is normalised into that form, so equality is plain
``==`` and the rational fast path never touches the dictionary machinery.
The symbols L_p stand for log p and are treated as algebraically independent.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Union

import mpmath

# A monomial is a tuple of (prime, exponent) pairs sorted by prime; () is 1.
Monomial = tuple

Scalar = Union[int, Fraction, "Coefficient"]

RATIONAL_TYPES = (int, Fraction)


def _norm_rational(q):
    if isinstance(q, Fraction) and q.denominator == 1:
        return q.numerator
    return q


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for p, e in b:
        exps[p] = exps.get(p, 0) + e
    return tuple(sorted(exps.items()))


def mono_div(a: Monomial, b: Monomial):
    """Return a/b as a monomial, or None when b does not divide a."""
    exps = dict(a)
    for p, e in b:
        left = exps.get(p, 0) - e
        if left < 0:
            return None
        if left:
            exps[p] = left
        else:
            del exps[p]
    return tuple(sorted(exps.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    # graded lex with L2 > L3 > L5 > ...; a term order (compatible with products)
    return (mono_degree(m), tuple((-p, e) for p, e in m))


def _make(terms: dict) -> Scalar:
    """Canonicalise a term dict (zeros already removed) into a scalar."""
    if not terms:
        return 0
    if len(terms) == 1 and () in terms:
        return _norm_rational(terms[()])
    c = Coefficient.__new__(Coefficient)
    c._terms = terms
    c._hash = None
    return c


def terms_of(x: Scalar) -> dict:
    """Monomial -> rational view of any scalar (a fresh dict for rationals)."""
    if isinstance(x, Coefficient):
        return x._terms
    if isinstance(x, RATIONAL_TYPES):
        return {(): Fraction(x)} if x else {}
    raise TypeError(f"not a coefficient: {x!r}")


class Coefficient:
    """A polynomial in the L_p with at least one non-constant term.

    Build values with :func:`L`, :func:`from_terms` or arithmetic on those;
    results that collapse to rationals come back as ``int``/``Fraction``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms):
        raise TypeError("use arithring.coeff.from_terms() or L(p) to build coefficients")

    @property
    def terms(self):
        return dict(self._terms)

    def monomials(self):
        return sorted(self._terms, key=mono_key)

    def degree(self):
        return max(mono_degree(m) for m in self._terms)

    def primes(self):
        return sorted({p for m in self._terms for p, _ in m})

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, Coefficient):
            return self._terms == other._terms
        if isinstance(other, RATIONAL_TYPES):
            return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            if not other:
                return self
            terms = dict(self._terms)
            c = terms.get((), 0) + other
            if c:
                terms[()] = Fraction(c)
            else:
                terms.pop((), None)
            return _make(terms)
        if not isinstance(other, Coefficient):
            return NotImplemented
        terms = dict(self._terms)
        for m, c in other._terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                del terms[m]
        return _make(terms)

    __radd__ = __add__

    def __neg__(self):
        return _make({m: -c for m, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Coefficient,) + RATIONAL_TYPES):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            if not other:
                return 0
            return _make({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Coefficient):
            return NotImplemented
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return _make(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            if not other:
                raise ZeroDivisionError("coefficient division by zero")
            return _make({m: c / other for m, c in self._terms.items()})
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers of non-rational coefficients exist")
        result, base = 1, self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __float__(self):
        total = 0.0
        for m, c in self._terms.items():
            v = float(c)
            for p, e in m:
                v *= math.log(p) ** e
            total += v
        return total

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Coefficient({format_scalar(self)!r})"


def from_terms(terms) -> Scalar:
    """Build a canonical scalar from a mapping monomial -> rational.

    Monomials may be given as tuples of (prime, exponent) pairs in any order
    or as dicts prime -> exponent.
    """
    out = {}
    for m, c in dict(terms).items():
        if isinstance(m, dict):
            m = m.items()
        mono = tuple(sorted((p, e) for p, e in m if e))
        s = out.get(mono, 0) + Fraction(c)
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return _make(out)


def L(p: int) -> Coefficient:
    """The formal symbol L_p (stands for log p)."""
    return _make({((p, 1),): Fraction(1)})


def log_of(factors) -> Scalar:
    """Symbolic log n = sum_p v_p(n) L_p from a prime -> exponent mapping."""
    return _make({((p, 1),): Fraction(e) for p, e in dict(factors).items() if e})


def is_rational(x: Scalar) -> bool:
    return isinstance(x, RATIONAL_TYPES)


def is_zero(x: Scalar) -> bool:
    return not x


def coeff_is_zero(a: Scalar) -> bool:
    """Exact zero test, no tolerance."""
    return not a


def coeff_arith(op: str, a: Scalar, b: Scalar) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown coefficient operation {op!r}")


def as_rational(x: Scalar) -> Fraction:
    if isinstance(x, RATIONAL_TYPES):
        return Fraction(x)
    raise TypeError(f"{format_scalar(x)} is not rational")


def inverse(x: Scalar) -> Scalar:
    """Multiplicative inverse inside Q[L_p]; only nonzero rationals are units."""
    if isinstance(x, RATIONAL_TYPES):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        return _norm_rational(Fraction(1) / x)
    raise ZeroDivisionError(f"{format_scalar(x)} is not a unit of Q[L_p]")


def exact_div(a: Scalar, b: Scalar) -> Scalar:
    """a / b when the quotient lies in Q[L_p]; raises ArithmeticError otherwise."""
    if not b:
        raise ZeroDivisionError("exact_div by zero")
    if isinstance(b, RATIONAL_TYPES):
        if isinstance(a, RATIONAL_TYPES):
            return _norm_rational(Fraction(a) / b)
        return a / b
    if not a:
        return 0
    bt = b._terms
    lead_b = max(bt, key=mono_key)
    lead_c = bt[lead_b]
    rem = dict(terms_of(a))
    quot = {}
    while rem:
        lead = max(rem, key=mono_key)
        m = mono_div(lead, lead_b)
        if m is None:
            raise ArithmeticError(f"{format_scalar(b)} does not divide {format_scalar(a)}")
        c = rem[lead] / lead_c
        quot[m] = quot.get(m, 0) + c
        for mb, cb in bt.items():
            mm = mono_mul(m, mb)
            s = rem.get(mm, 0) - c * cb
            if s:
                rem[mm] = s
            else:
                rem.pop(mm, None)
    return _make({m: c for m, c in quot.items() if c})


def _format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _format_monomial(m: Monomial) -> str:
    return "*".join(f"L{p}" if e == 1 else f"L{p}^{e}" for p, e in m)


def format_scalar(x: Scalar) -> str:
    """Textual form, e.g. ``5/6 + 2*L2*L3^2``; parses back through the DSL."""
    if isinstance(x, RATIONAL_TYPES):
        return _format_rational(x)
    parts = []
    for m in sorted(x._terms, key=mono_key):
        c = x._terms[m]
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _format_rational(a)
        elif a == 1:
            body = _format_monomial(m)
        else:
            body = f"{_format_rational(a)}*{_format_monomial(m)}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


class NumericValue(NamedTuple):
    value: mpmath.mpf
    radius: mpmath.mpf

    def __str__(self):
        digits = max(1, -int(mpmath.floor(mpmath.log10(self.radius))))
        return f"{mpmath.nstr(self.value, digits + 1)} ± {mpmath.nstr(self.radius, 2)}"


def coeff_eval_numeric(a: Scalar, precision: int = 12) -> NumericValue:
    """Substitute L_p -> log p with |error| <= 10**-precision.

    The working precision gets enough guard digits to cover the size of the
    coefficients and degrees, so the returned radius is a genuine bound.
    """
    if precision < 1:
        raise ValueError("precision must be >= 1")
    terms = terms_of(a)
    if not terms:
        return NumericValue(mpmath.mpf(0), mpmath.mpf(10) ** -precision)
    # crude magnitude bound of the sum of |c| * prod (log p)^e
    size = 1.0
    for m, c in terms.items():
        mag = abs(float(c)) + 1.0
        for p, e in m:
            mag *= (math.log(p) + 1.0) ** e * (e + 1)
        size += mag
    guard = int(math.log10(size)) + 10
    with mpmath.workdps(precision + guard):
        total = mpmath.mpf(0)
        for m, c in terms.items():
            v = mpmath.mpf(c.numerator) / c.denominator
            for p, e in m:
                v *= mpmath.log(p) ** e
            total += v
        return NumericValue(+total, mpmath.mpf(10) ** -precision)


def to_complex(x: Scalar) -> complex:
    return complex(float(x))
