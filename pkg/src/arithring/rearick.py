"""Exp: A_0 -> A_1 and the Rearick logarithm Log: A_1 -> A_0, exactly.

Both are computed by a one-pass recurrence obtained from the derivation
m_Omega (pointwise multiplication by the completely additive Omega):
D Exp(f) = Exp(f) * Df with Omega(n) >= 1 for n > 1 pins down every value.
The truncated power series are kept as ``method="series"`` and serve as an
independent route in the tests.
"""

from __future__ import annotations

from fractions import Fraction

from .arithfun import ArithFun, _norm, add, conv, eps, scale, sub
from .errors import NotInA0, NotInA1, UnsupportedDepth
from .numtheory import factor_table


def _omegas(n):
    table = factor_table(n)
    return [0] + [sum(e for _, e in table[k]) for k in range(1, n + 1)]


def _divide(x, k):
    if type(x) is int:
        return _norm(Fraction(x, k))
    return _norm(x / k)


def _check_a0(f):
    if f[1]:
        raise NotInA0(f"Exp needs f(1) = 0, got f(1) = {f[1]}")


def _check_a1(f):
    if f[1] != 1:
        raise NotInA1(f"Log needs f(1) = 1, got f(1) = {f[1]}")


def series_depth(horizon):
    """floor(log2 N): (f - f(1))^k vanishes below 2^k, so later terms are invisible."""
    return horizon.bit_length() - 1


def exp0(f, method="recurrence"):
    """Exp(f) = sum_k f^k / k! for f(1) = 0."""
    _check_a0(f)
    if method == "series":
        return _exp_series(f)
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    n = f.horizon
    om = _omegas(n)
    # weighted[d] = Omega(d) f(d), d > 1
    weighted = [(d, om[d] * x) for d, x in enumerate(f.values, 1) if x and d > 1]
    acc = [0] * (n + 1)
    g = [0] * (n + 1)
    g[1] = 1
    for m in range(1, n + 1):
        if m > 1:
            s = acc[m]
            g[m] = _divide(s, om[m]) if s else 0
        gm = g[m]
        if gm:
            lim = n // m
            for d, w in weighted:
                if d > lim:
                    break
                acc[m * d] += w * gm
    del g[0]
    return ArithFun._raw(g)


def log1(f, method="recurrence"):
    """Rearick logarithm sum_k (-1)^(k+1) (f - eps)^k / k for f(1) = 1."""
    _check_a1(f)
    if method == "series":
        return _log_series(f)
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    n = f.horizon
    om = _omegas(n)
    fv = f.values
    nz_f = [(k, x) for k, x in enumerate(fv, 1) if x and k > 1]
    # acc[n] collects sum_{d|n, 1<d<n} Omega(d) h(d) f(n/d)
    acc = [0] * (n + 1)
    h = [0] * (n + 1)
    for m in range(2, n + 1):
        s = om[m] * fv[m - 1] - acc[m]
        hm = _divide(s, om[m]) if s else 0
        h[m] = hm
        if hm:
            w = om[m] * hm
            lim = n // m
            for k, x in nz_f:
                if k > lim:
                    break
                acc[m * k] += w * x
    del h[0]
    return ArithFun._raw(h)


def _exp_series(f):
    total = eps(f.horizon)
    term = total
    for k in range(1, series_depth(f.horizon) + 1):
        term = scale(Fraction(1, k), conv(term, f))
        total = add(total, term)
    return total


def _log_series(f):
    x = sub(f, eps(f.horizon))
    total = ArithFun._raw([0] * f.horizon)
    power = None
    for k in range(1, series_depth(f.horizon) + 1):
        power = x if power is None else conv(power, x)
        total = add(total, scale(Fraction((-1) ** (k + 1), k), power))
    return total


def power_fg(f, g):
    """f^g = Exp(g * Log f) for f(1) = 1."""
    _check_a1(f)
    return exp0(conv(g, log1(f)))


def iterate_exp(f, m):
    """Exp^m f for m in {-1, 0, 1}.

    Deeper chains would leave A_0/A_1 (Exp f has value 1 at 1), which needs
    exp(1) and is outside exact arithmetic.
    """
    if m == 0:
        return f
    if m == 1:
        return exp0(f)
    if m == -1:
        return log1(f)
    raise UnsupportedDepth(f"Exp^{m} is only available exactly for m in -1, 0, 1")
