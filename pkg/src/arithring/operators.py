"""Linear operators on truncated arithmetic functions.

Every operator knows its horizon shrink: the basic derivation d_p reads
f(np), so an input known up to N yields an output known up to N // p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import coeff as _c
from .arithfun import ArithFun, _norm, builtin
from .errors import DivisionByZeroValue, HorizonExhausted, InvalidParams, NotInvertible
from .numtheory import factor_pairs, factor_table, is_prime


def _shrunk(f, shrink):
    n = f.horizon // shrink
    if n < 1:
        raise HorizonExhausted(f"horizon {f.horizon} is too small for an operator of shrink {shrink}")
    return n


class Operator:
    """Base class; subclasses define ``shrink``, ``label`` and ``_apply``."""

    shrink = 1

    def apply(self, f):
        return self._apply(f)

    def __call__(self, f):
        return self.apply(f)

    def is_derivation(self, horizon=None):
        return False

    def power(self, j):
        """The j-fold composite (j >= 0)."""
        return compose([self] * j) if j else IDENTITY

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class LogDeriv(Operator):
    """(dL f)(n) = log(n) f(n) with log n kept as sum_p v_p(n) L_p."""

    @property
    def label(self):
        return "dL"

    def is_derivation(self, horizon=None):
        return True

    def _apply(self, f):
        table = factor_table(f.horizon)
        out = []
        for n, v in enumerate(f.values, 1):
            out.append(_norm(v * _c.log_of(table[n])) if v and n > 1 else 0)
        return ArithFun._raw(out)


@dataclass(frozen=True)
class BasicDeriv(Operator):
    """(d_p f)(n) = f(np) v_p(np)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise InvalidParams(f"basic derivation needs a prime, got {self.p!r}")

    @property
    def shrink(self):
        return self.p

    @property
    def label(self):
        return f"dp{self.p}"

    def is_derivation(self, horizon=None):
        return True

    def _apply(self, f):
        p = self.p
        n = _shrunk(f, p)
        vals = f.values
        out = []
        for m in range(1, n + 1):
            x = vals[m * p - 1]
            if x:
                k, v = m, 1
                while k % p == 0:
                    k //= p
                    v += 1
                out.append(_norm(v * x))
            else:
                out.append(0)
        return ArithFun._raw(out)


@dataclass(frozen=True)
class CompositeDk(Operator):
    """d_k = prod_p d_p^{v_p(k)}: (d_k f)(n) = f(kn) prod_p prod_{j<=v_p(k)} (v_p(n) + j)."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidParams(f"d_k needs k >= 1, got {self.k!r}")

    @property
    def shrink(self):
        return self.k

    @property
    def label(self):
        return "id" if self.k == 1 else f"dk{self.k}"

    def is_derivation(self, horizon=None):
        return is_prime(self.k)

    def _weights(self, n):
        kf = factor_pairs(self.k)
        out = []
        for m in range(1, n + 1):
            w = 1
            for p, e in kf:
                v = 0
                while m % p ** (v + 1) == 0:
                    v += 1
                for j in range(1, e + 1):
                    w *= v + j
            out.append(w)
        return out

    def _apply(self, f):
        if self.k == 1:
            return f
        n = _shrunk(f, self.k)
        vals = f.values
        k = self.k
        return ArithFun._raw(
            _norm(w * vals[k * m - 1]) if vals[k * m - 1] else 0
            for m, w in zip(range(1, n + 1), self._weights(n))
        )


@dataclass(frozen=True)
class NormalizedDkHat(Operator):
    """d_k divided by prod_p v_p(k)!, so that (dhat_k f)(1) = f(k)."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidParams(f"dhat_k needs k >= 1, got {self.k!r}")

    @property
    def shrink(self):
        return self.k

    @property
    def label(self):
        return f"dhat{self.k}"

    def is_derivation(self, horizon=None):
        return is_prime(self.k)

    def normaliser(self):
        return math.prod(math.factorial(e) for _, e in factor_pairs(self.k))

    def _apply(self, f):
        g = CompositeDk(self.k).apply(f)
        c = self.normaliser()
        if c == 1:
            return g
        return ArithFun._raw(_norm(Fraction(v, c)) if type(v) is int else _norm(v / c) for v in g.values)


@dataclass(frozen=True, eq=False)
class PointwiseMul(Operator):
    """m_g^i: f -> g^i . f (pointwise).  ``g`` is an ArithFun or a builtin name."""

    g: object
    i: int = 1

    def __post_init__(self):
        if not isinstance(self.i, int):
            raise InvalidParams("pointwise multiplier exponent must be an integer")

    def __eq__(self, other):
        if not isinstance(other, PointwiseMul) or self.i != other.i:
            return False
        if isinstance(self.g, ArithFun) and isinstance(other.g, ArithFun):
            return self.g.horizon == other.g.horizon and self.g == other.g
        return self.g is other.g or self.g == other.g

    __hash__ = None

    @property
    def label(self):
        name = self.g if isinstance(self.g, str) else "g"
        return f"mg({name},{self.i})"

    def multiplier(self, horizon):
        if isinstance(self.g, str):
            return builtin(self.g, (), horizon)
        return self.g

    def is_derivation(self, horizon=None):
        if self.i != 1:
            return False
        g = self.multiplier(horizon or (self.g.horizon if isinstance(self.g, ArithFun) else 64))
        return is_completely_additive(g)

    def _apply(self, f):
        g = self.multiplier(f.horizon)
        n = min(f.horizon, g.horizon)
        i = self.i
        out = []
        for m in range(n):
            gm = g.values[m]
            x = f.values[m]
            if i < 0:
                # index 1 is exempt when f(1) = 0, so m_Omega^{-1} acts on A_0
                if not gm and m == 0 and not x:
                    out.append(0)
                    continue
                if not gm:
                    raise DivisionByZeroValue(f"m_g^{i} needs g nonvanishing, but g({m + 1}) = 0")
                try:
                    gm = _c.inverse(gm)
                except ZeroDivisionError:
                    raise NotInvertible(f"g({m + 1}) = {_c.format_scalar(gm)} has no inverse in Q[L_p]") from None
            out.append(_norm(gm ** abs(i) * x) if x else 0)
        return ArithFun._raw(out)


@dataclass(frozen=True)
class Shift(Operator):
    """T^alpha = m_{I(alpha)}: f(n) -> n^alpha f(n) (integer alpha)."""

    alpha: int

    @property
    def label(self):
        return f"T{self.alpha}"

    def _apply(self, f):
        a = self.alpha
        out = []
        for n, v in enumerate(f.values, 1):
            if not v:
                out.append(0)
            elif a >= 0:
                out.append(_norm(n**a * v))
            else:
                out.append(_norm(Fraction(v, n**-a)) if type(v) is int else _norm(v / n**-a))
        return ArithFun._raw(out)


@dataclass(frozen=True)
class Chain(Operator):
    """Heterogeneous composite, applied right to left like function composition."""

    ops: tuple

    @property
    def shrink(self):
        return math.prod(op.shrink for op in self.ops)

    @property
    def label(self):
        return "∘".join(op.label for op in self.ops)

    def _apply(self, f):
        for op in reversed(self.ops):
            f = op.apply(f)
        return f


IDENTITY = CompositeDk(1)


def apply(op, f):
    return op.apply(f)


def apply_dk_hat(k, f):
    return NormalizedDkHat(k).apply(f)


def compose(ops):
    """Composite of ``ops`` (rightmost applied first); basic derivations fold into d_k."""
    flat = []
    for op in ops:
        if isinstance(op, Chain):
            flat.extend(op.ops)
        elif isinstance(op, CompositeDk) and op.k == 1:
            continue
        else:
            flat.append(op)
    if not flat:
        return IDENTITY
    if all(isinstance(op, (BasicDeriv, CompositeDk)) for op in flat):
        k = math.prod(op.shrink for op in flat)
        if is_prime(k):
            return BasicDeriv(k)
        return CompositeDk(k)
    if len(flat) == 1:
        return flat[0]
    return Chain(tuple(flat))


def is_completely_additive(g):
    """g(1) = 0 and g(nm) = g(n) + g(m) for all nm <= N."""
    v = g.values
    n = g.horizon
    if v[0]:
        return False
    for a in range(2, math.isqrt(n) + 1):
        for b in range(a, n // a + 1):
            if v[a * b - 1] != v[a - 1] + v[b - 1]:
                return False
    return True


def is_completely_multiplicative(g):
    """g(1) = 1 and g(nm) = g(n) g(m) for all nm <= N."""
    v = g.values
    n = g.horizon
    if v[0] != 1:
        return False
    for a in range(2, math.isqrt(n) + 1):
        for b in range(a, n // a + 1):
            if v[a * b - 1] != v[a - 1] * v[b - 1]:
                return False
    return True
