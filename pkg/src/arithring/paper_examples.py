"""Reproductions of the concrete numbers behind the worked examples.

Each check returns an :class:`ExampleResult` holding the expected and the
computed value as strings, so the CLI can print them side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arithfun import builtin, conv, eps, pointwise_mul, scale, sub
from .coeff import L, format_scalar
from .dsl import eval_expr
from .independence import (
    Verdict,
    certify_jacobian,
    certify_orders,
    certify_support,
    certify_value_tests,
    dependence_oracle,
    wronskian_li,
)
from .linalg import det
from .numtheory import factor_pairs
from .operators import BasicDeriv, LogDeriv, NormalizedDkHat


@dataclass(frozen=True)
class ExampleResult:
    name: str
    expected: str
    computed: str
    passed: bool

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}: expected {self.expected}; computed {self.computed}"


def _result(name, expected, computed):
    return ExampleResult(name, str(expected), str(computed), expected == computed)


def kappa_values(horizon=64):
    f = eval_expr("Log(one)", horizon)
    want = []
    for n in range(1, horizon + 1):
        fp = factor_pairs(n)
        want.append(Fraction(1, fp[0][1]) if len(fp) == 1 else 0)
    bad = [n for n in range(1, horizon + 1) if f[n] != want[n - 1]]
    shown = ", ".join(format_scalar(f[n]) for n in range(1, 10))
    return ExampleResult(
        f"Log(one) = kappa up to {horizon}",
        "1/j at p^j, 0 elsewhere (first nine: 0, 1, 1, 1/2, 1, 0, 1, 1/3, 1/2)",
        f"first nine: {shown}; mismatches: {bad or 'none'}",
        not bad,
    )


def tau_star_witness(horizon=64):
    fs = [builtin("tau_star", (), horizon), builtin("ind_prime", (), horizon)]
    cert = certify_jacobian(fs, [BasicDeriv(2), BasicDeriv(3)])
    got = (cert.verdict.value, cert.witness.index, cert.witness.value) if cert.witness else (cert.verdict.value,)
    return _result("tau_star and 1_P Jacobian (d2, d3)", ("IndependentCertified", 4, 2), got)


def det_at_primes(primes=(2, 3, 5, 7), horizon=64):
    fs = [builtin("ind_ppowers", (p,), horizon) for p in primes[:-1]] + [builtin("one", (), horizon)]
    value = det([[f[p] for p in primes] for f in fs])
    cert = certify_value_tests(fs, primes, "at_primes")
    return _result(
        f"det(f_i(p_j)) for 1_p (p in {list(primes[:-1])}) and 1 at {list(primes)}",
        (1, "IndependentCertified"),
        (value, cert.verdict.value),
    )


def _f1_f2(horizon):
    f1 = builtin("ind_ppowers", (2,), horizon)
    return f1, conv(f1, f1)


def dhat_counterexample(horizon=64):
    f1, f2 = _f1_f2(horizon)
    ops = [NormalizedDkHat(2), NormalizedDkHat(4)]
    mat = [[op.apply(f)[1] for op in ops] for f in (f1, f2)]
    return _result("det(dhat_2, dhat_4 of 1_2, 1_2^2) at 1", ([[1, 1], [2, 3]], 1), (mat, det(mat)))


def log_derivative_equation(horizon=256):
    f1, f2 = _f1_f2(horizon)
    resid = sub(LogDeriv().apply(f1), scale(L(2), sub(f2, f1)))
    return _result(f"dL 1_2 - L2*(1_2^2 - 1_2) up to {horizon}", "zero", "zero" if resid.is_zero() else "nonzero")


def h_values(horizon=64):
    f1, f2 = _f1_f2(horizon)
    e = eps(horizon)
    h1 = sub(sub(scale(3, f1), f2), scale(2, e))
    h2 = sub(f2, scale(2, f1)) + e
    return _result("first four values of h1, h2", ((0, 1, 0, 0), (0, 0, 0, 1)), (tuple(h1[1:5]), tuple(h2[1:5])))


def omega_wronskian(n=2, horizon=64):
    om = builtin("Omega", (), horizon)
    powers = [builtin("one", (), horizon)]
    for _ in range(n):
        powers.append(pointwise_mul(powers[-1], om))
    cert = wronskian_li(powers, BasicDeriv(2))
    closed = det([[j**i for j in range(n + 1)] for i in range(n + 1)]) * math.prod(
        math.factorial(j) for j in range(n + 1)
    )
    got = cert.witness.value if cert.witness and cert.witness.index == 1 else None
    return _result(f"d2-Wronskian of Omega^<0..{n}> at 1", closed, got)


def dependent_pair(horizon=64):
    f1, f2 = _f1_f2(horizon)
    jac = [certify_jacobian([f1, f2], [BasicDeriv(p), BasicDeriv(q)]).verdict.value for p, q in ((2, 3), (2, 5), (3, 5))]
    oracle = dependence_oracle([f1, f2], 2).certificate
    return _result(
        "1_2, 1_2^2: Jacobians inconclusive, oracle relation",
        (["Inconclusive"] * 3, "x^2 - y"),
        (jac, str(oracle.witness.relation) if oracle.witness else None),
    )


def orders_example(horizon=64):
    got = certify_orders([builtin("e", (2,), horizon), builtin("e", (6,), horizon)]).verdict
    return _result("orders 2 and 6", Verdict.INDEPENDENT.value, got.value)


def triangular_example(horizon=64):
    fs = [builtin("e", (2,), horizon), builtin("e", (3,), horizon), builtin("ind_prime", (), horizon)]
    got = certify_support(fs, "triangular", primes=[2, 3, 5]).verdict
    return _result("e_2, e_3, 1_P triangular at (2, 3, 5)", Verdict.INDEPENDENT.value, got.value)


def dp_indicator_of_primes(horizon=64):
    P = builtin("ind_prime", (), horizon)
    ok = all(BasicDeriv(p).apply(P) == eps(horizon // p) for p in (2, 3, 5, 7, 11, 13))
    return _result("d_p 1_P = 1 for p <= 13", True, ok)


EXAMPLES = (
    kappa_values,
    tau_star_witness,
    det_at_primes,
    dhat_counterexample,
    log_derivative_equation,
    h_values,
    omega_wronskian,
    dependent_pair,
    orders_example,
    triangular_example,
    dp_indicator_of_primes,
)


def run_all():
    return [fn() for fn in EXAMPLES]
