"""Truncated arithmetic functions and the Dirichlet convolution ring.

An :class:`ArithFun` stores exact values f(1), ..., f(N) for a horizon N.
Nothing is known past N, so every "zero" conclusion drawn from one is
"zero up to horizon".  Operations return the largest horizon at which their
result is still exact (for ring operations: the minimum of the inputs).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import coeff as _c
from .coeff import Coefficient, format_scalar, is_rational
from .errors import InvalidParams, NotInvertible, UnknownBuiltin, ZeroToThePowerZero
from .numtheory import HORIZON_CAP, factor_table, is_prime

DEFAULT_HORIZON = 1024

# common denominators wider than this fall back to plain Fraction arithmetic
_SCALED_DEN_BITS = 256


def check_horizon(n):
    if not isinstance(n, int) or n < 1:
        raise InvalidParams(f"horizon must be a positive integer, got {n!r}")
    if n > HORIZON_CAP:
        raise InvalidParams(f"horizon {n} exceeds the cap {HORIZON_CAP}")
    return n


def _norm(x):
    if type(x) is int:
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Coefficient):
        return x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return int(x)
    raise TypeError(f"arithmetic function values must be exact coefficients, got {x!r}")


class ArithFun:
    """Values f(1..N) of an arithmetic function, immutable.

    ``f * g`` is Dirichlet convolution (or scaling when one side is a
    coefficient), ``f ** k`` a convolution power and ``f.pointwise(g)`` the
    pointwise product.  ``==`` compares on the common horizon only, so it is
    not transitive across different horizons and instances are unhashable.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        vals = tuple(_norm(v) for v in values)
        if not vals:
            raise InvalidParams("an arithmetic function needs horizon >= 1")
        check_horizon(len(vals))
        self._values = vals

    @classmethod
    def _raw(cls, vals):
        f = cls.__new__(cls)
        f._values = tuple(vals)
        return f

    @classmethod
    def from_function(cls, fn, horizon):
        check_horizon(horizon)
        return cls(fn(n) for n in range(1, horizon + 1))

    @classmethod
    def scalar(cls, c, horizon):
        """The constant c identified with c*eps (value c at 1, zero elsewhere)."""
        check_horizon(horizon)
        return cls([c] + [0] * (horizon - 1))

    @property
    def horizon(self):
        return len(self._values)

    @property
    def values(self):
        return self._values

    def __getitem__(self, n):
        if isinstance(n, slice):
            start, stop, step = n.start or 1, n.stop, n.step or 1
            stop = self.horizon + 1 if stop is None else stop
            return [self[k] for k in range(start, stop, step)]
        if not 1 <= n <= self.horizon:
            raise IndexError(f"index {n} outside 1..{self.horizon}")
        return self._values[n - 1]

    def __iter__(self):
        return iter(self._values)

    def __eq__(self, other):
        if isinstance(other, ArithFun):
            n = min(self.horizon, other.horizon)
            return self._values[:n] == other._values[:n]
        return NotImplemented

    __hash__ = None

    def agrees(self, other, upto=None):
        n = min(self.horizon, other.horizon)
        if upto is not None:
            n = min(n, upto)
        return self._values[:n] == other._values[:n]

    def __repr__(self):
        shown = ", ".join(format_scalar(v) for v in self._values[:8])
        more = ", ..." if self.horizon > 8 else ""
        return f"ArithFun(horizon={self.horizon}, values=[{shown}{more}])"

    def __add__(self, other):
        if isinstance(other, ArithFun):
            return add(self, other)
        if _is_scalar(other):
            return add(self, ArithFun.scalar(other, self.horizon))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ArithFun):
            return sub(self, other)
        if _is_scalar(other):
            return sub(self, ArithFun.scalar(other, self.horizon))
        return NotImplemented

    def __rsub__(self, other):
        if _is_scalar(other):
            return sub(ArithFun.scalar(other, self.horizon), self)
        return NotImplemented

    def __neg__(self):
        return ArithFun._raw(-v for v in self._values)

    def __mul__(self, other):
        if isinstance(other, ArithFun):
            return conv(self, other)
        if _is_scalar(other):
            return scale(other, self)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k):
        return conv_power(self, k)

    def pointwise(self, other):
        return pointwise_mul(self, other)

    def truncate(self, horizon):
        check_horizon(horizon)
        if horizon > self.horizon:
            raise InvalidParams(f"cannot extend horizon {self.horizon} to {horizon}")
        return ArithFun._raw(self._values[:horizon])

    def is_zero(self):
        """True when every value up to the horizon vanishes."""
        return not any(self._values)

    def support(self):
        return [n for n, v in enumerate(self._values, 1) if v]

    def order(self):
        """Least support index, or None when zero up to horizon."""
        for n, v in enumerate(self._values, 1):
            if v:
                return n
        return None

    def order_report(self):
        return order_report(self)

    def is_rational(self):
        return all(is_rational(v) for v in self._values)

    def to_dict(self):
        return {"horizon": self.horizon, "values": [format_scalar(v) for v in self._values]}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data):
        from .dsl import parse_coeff

        values = [parse_coeff(s) if isinstance(s, str) else s for s in data["values"]]
        if len(values) != data["horizon"]:
            raise InvalidParams("horizon does not match the number of values")
        return cls(values)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self, start=1, stop=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value"])
        stop = self.horizon if stop is None else min(stop, self.horizon)
        for n in range(start, stop + 1):
            w.writerow([n, format_scalar(self._values[n - 1])])
        return buf.getvalue()


def _is_scalar(x):
    return isinstance(x, (int, Fraction, Coefficient))


# -- ring operations -----------------------------------------------------------


def add(f, g):
    n = min(f.horizon, g.horizon)
    return ArithFun._raw(_norm(a + b) for a, b in zip(f._values[:n], g._values[:n]))


def sub(f, g):
    n = min(f.horizon, g.horizon)
    return ArithFun._raw(_norm(a - b) for a, b in zip(f._values[:n], g._values[:n]))


def scale(c, f):
    if not _is_scalar(c):
        raise TypeError(f"cannot scale by {c!r}")
    if isinstance(c, Fraction) and c.denominator == 1:
        c = c.numerator
    return ArithFun._raw(_norm(c * v) for v in f._values)


def linear(op, f, g=None, c=None):
    """Index-wise linear operations: ``add``/``sub`` of two functions or ``scale`` by c."""
    if op == "add":
        return add(f, g)
    if op == "sub":
        return sub(f, g)
    if op == "scale":
        return scale(c, f)
    raise InvalidParams(f"unknown linear operation {op!r}")


def pointwise_mul(f, g):
    n = min(f.horizon, g.horizon)
    return ArithFun._raw(_norm(a * b) for a, b in zip(f._values[:n], g._values[:n]))


def _scaled_ints(vals):
    """(integers, common denominator) for rational data, or None."""
    den = 1
    for v in vals:
        if type(v) is int:
            continue
        if isinstance(v, Fraction):
            den = math.lcm(den, v.denominator)
            if den.bit_length() > _SCALED_DEN_BITS:
                return None
        else:
            return None
    if den == 1:
        return list(vals), 1
    return [int(v * den) for v in vals], den


def conv(f, g):
    """Dirichlet convolution (f*g)(n) = sum_{d|n} f(d) g(n/d), horizon min(N_f, N_g).

    Cost is sum_{d<=N} N/d multiply-adds over the nonzero entries; rational
    inputs are scaled to integers so the inner loop stays in int arithmetic.
    """
    n = min(f.horizon, g.horizon)
    a = f._values[:n]
    b = g._values[:n]
    den = None
    sa = _scaled_ints(a)
    if sa is not None:
        sb = _scaled_ints(b)
        if sb is not None:
            a, da = sa
            b, db = sb
            den = da * db
    # iterate over the sparser factor in the outer loop
    nz_a = [(d, x) for d, x in enumerate(a, 1) if x]
    nz_b = [(e, y) for e, y in enumerate(b, 1) if y]
    if len(nz_a) > len(nz_b):
        nz_a, nz_b = nz_b, nz_a
    out = [0] * (n + 1)
    for d, x in nz_a:
        lim = n // d
        for e, y in nz_b:
            if e > lim:
                break
            out[d * e] += x * y
    del out[0]
    if den is not None:
        if den != 1:
            return ArithFun._raw(_norm(Fraction(v, den)) if v else 0 for v in out)
        return ArithFun._raw(out)
    return ArithFun._raw(_norm(v) for v in out)


def _unit_inverse(c):
    if not c:
        raise NotInvertible("f(1) = 0: not a unit of the convolution ring")
    try:
        return _c.inverse(c)
    except ZeroDivisionError:
        raise NotInvertible(f"f(1) = {format_scalar(c)} is not invertible over Q[L_p]") from None


def conv_inverse(f):
    """g with f*g = eps up to horizon; needs f(1) to be a nonzero rational."""
    n = f.horizon
    inv1 = _unit_inverse(f._values[0])
    nz_f = [(d, x) for d, x in enumerate(f._values, 1) if x and d > 1]
    acc = [0] * (n + 1)
    g = [0] * (n + 1)
    for m in range(1, n + 1):
        if m == 1:
            gm = inv1
        else:
            s = acc[m]
            gm = _norm(-inv1 * s) if s else 0
        g[m] = gm
        if gm:
            lim = n // m
            for d, x in nz_f:
                if d > lim:
                    break
                acc[m * d] += x * gm
    del g[0]
    return ArithFun._raw(g)


def eps(horizon):
    return ArithFun.scalar(1, horizon)


def conv_power(f, k):
    """Convolution power by repeated squaring; f**0 = eps, negative k uses the inverse."""
    if not isinstance(k, int):
        raise InvalidParams(f"convolution power must be an integer, got {k!r}")
    if k < 0:
        return conv_power(conv_inverse(f), -k)
    if k == 0:
        if f.is_zero():
            raise ZeroToThePowerZero("0^0 is undefined (f is zero up to horizon)")
        return eps(f.horizon)
    result = None
    base = f
    while k:
        if k & 1:
            result = base if result is None else conv(result, base)
        k >>= 1
        if k:
            base = conv(base, base)
    return result


# -- order, norm, support ------------------------------------------------------


@dataclass(frozen=True)
class OrderReport:
    """Order / norm / support of f relative to its horizon.

    ``order`` is None when f is zero up to the horizon, meaning the true
    order is either infinite or larger than ``horizon``.
    """

    horizon: int
    order: int | None
    norm: Fraction
    support: tuple
    prime_divisors: tuple

    @property
    def zero_up_to_horizon(self):
        return self.order is None

    def describe_order(self):
        if self.order is None:
            return f"inf (zero up to horizon {self.horizon})"
        return str(self.order)


def order_report(f):
    supp = tuple(f.support())
    primes = set()
    table = factor_table(f.horizon)
    for n in supp:
        primes.update(p for p, _ in table[n])
    order = supp[0] if supp else None
    norm = Fraction(1, order) if order else Fraction(0)
    return OrderReport(f.horizon, order, norm, supp, tuple(sorted(primes)))


def prime_divisors(f):
    return order_report(f).prime_divisors


# -- builtins ------------------------------------------------------------------


def _one(n):
    return ArithFun._raw([1] * n)


def _zero(n):
    return ArithFun._raw([0] * n)


def _e(n, k):
    if not isinstance(k, int) or k < 1:
        raise InvalidParams(f"e(n) needs an integer n >= 1, got {k!r}")
    vals = [0] * n
    if k <= n:
        vals[k - 1] = 1
    return ArithFun._raw(vals)


def _require_prime(p):
    if not isinstance(p, int) or not is_prime(p):
        raise InvalidParams(f"{p!r} is not a prime")


def _ind_prime(n):
    vals = [0] * n
    for k, fac in enumerate(factor_table(n)[1:], 1):
        if len(fac) == 1 and fac[0][1] == 1:
            vals[k - 1] = 1
    return ArithFun._raw(vals)


def _ind_ppowers(n, p):
    _require_prime(p)
    vals = [0] * n
    q = 1
    while q <= n:
        vals[q - 1] = 1
        q *= p
    return ArithFun._raw(vals)


def _ind_set(n, *members):
    if len(members) == 1 and isinstance(members[0], (list, tuple, set, frozenset)):
        members = tuple(members[0])
    vals = [0] * n
    for m in members:
        if not isinstance(m, int) or m < 1:
            raise InvalidParams(f"ind_set members must be positive integers, got {m!r}")
        if m <= n:
            vals[m - 1] = 1
    return ArithFun._raw(vals)


def _prime_power_fn(n, fn):
    vals = [0] * n
    for k, fac in enumerate(factor_table(n)[1:], 1):
        if len(fac) == 1:
            vals[k - 1] = fn(*fac[0])
    return ArithFun._raw(vals)


def _lambda(n):
    return _prime_power_fn(n, lambda p, j: _c.L(p))


def _kappa(n):
    return _prime_power_fn(n, lambda p, j: Fraction(1, j) if j > 1 else 1)


def _omega(n):
    table = factor_table(n)
    return ArithFun._raw(sum(e for _, e in table[k]) for k in range(1, n + 1))


def _log(n):
    table = factor_table(n)
    return ArithFun._raw(_c.log_of(table[k]) for k in range(1, n + 1))


def _vp(n, p):
    _require_prime(p)
    table = factor_table(n)
    return ArithFun._raw(dict(table[k]).get(p, 0) for k in range(1, n + 1))


def _power_fn(n, k):
    if not isinstance(k, int):
        raise InvalidParams(f"I(k) needs an integer exponent, got {k!r}")
    if k >= 0:
        return ArithFun._raw(m**k for m in range(1, n + 1))
    return ArithFun._raw(_norm(Fraction(1, m**-k)) for m in range(1, n + 1))


def _tau(n):
    vals = [0] * (n + 1)
    for d in range(1, n + 1):
        for m in range(d, n + 1, d):
            vals[m] += 1
    return vals[1:]


def _tau_star(n):
    vals = _tau(n)
    vals[0] = 0
    return ArithFun._raw([vals[0]] + [v - 2 for v in vals[1:]])


def _mu(n):
    return conv_inverse(_one(n))


BUILTINS = {
    "one": (_one, 0),
    "zero": (_zero, 0),
    "eps": (lambda n: _e(n, 1), 0),
    "e": (_e, 1),
    "ind_prime": (_ind_prime, 0),
    "ind_ppowers": (_ind_ppowers, 1),
    "ind_p": (_ind_ppowers, 1),
    "ind_set": (_ind_set, None),
    "mu": (_mu, 0),
    "Lambda": (_lambda, 0),
    "Omega": (_omega, 0),
    "kappa": (_kappa, 0),
    "I": (_power_fn, 1),
    "tau": (lambda n: ArithFun._raw(_tau(n)), 0),
    "tau_star": (_tau_star, 0),
    "log": (_log, 0),
    "vp": (_vp, 1),
}


def builtin(name, params=(), horizon=DEFAULT_HORIZON):
    """Named arithmetic function truncated to ``horizon``.

    one, zero, eps, e(n), ind_prime, ind_ppowers(p) (alias ind_p), ind_set(...),
    mu, Lambda, Omega, kappa, I(k), tau, tau_star, log, vp(p).
    """
    check_horizon(horizon)
    try:
        fn, arity = BUILTINS[name]
    except KeyError:
        raise UnknownBuiltin(f"unknown builtin {name!r}") from None
    if isinstance(params, (int, Fraction)):
        params = (params,)
    params = tuple(params)
    if arity is not None and len(params) != arity:
        raise InvalidParams(f"{name} takes {arity} parameter(s), got {len(params)}")
    return fn(horizon, *params)
