"""Acceptance criteria, one marked group per criterion.

The terminal summary (see conftest.py) prints one PASS/FAIL line per
criterion, including its time budget.
"""

import itertools
import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from arithring.arithfun import ArithFun, add, builtin, conv, conv_power, eps, pointwise_mul, scale, sub
from arithring.cli import run
from arithring.coeff import L
from arithring.dsl import eval_expr
from arithring.independence import (
    Verdict,
    certify_jacobian,
    certify_orders,
    certify_support,
    certify_value_tests,
    conv_det,
    dependence_oracle,
    evaluate_relation,
    wronskian_li,
)
from arithring.linalg import det
from arithring.numtheory import (
    build_completely_additive,
    exponent_matrix,
    factor_pairs,
    mult_indep_integers,
    primes_up_to,
)
from arithring.operators import BasicDeriv, LogDeriv, NormalizedDkHat, PointwiseMul, Shift, apply_dk_hat
from arithring.rearick import exp0, log1
from helpers import SMALL_PRIMES, random_fun, random_scalar, rng_for, seeds

criterion = pytest.mark.criterion


def _timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


# -- 1 -------------------------------------------------------------------------------


@criterion(1, "kappa reproduction: Log(one) at horizon 64", budget=1.0)
def test_c1_kappa():
    f, secs = _timed(lambda: eval_expr("Log(one)", 64))
    for n in range(1, 65):
        fp = factor_pairs(n)
        want = Fraction(1, fp[0][1]) if len(fp) == 1 else 0
        assert f[n] == want, n
    assert secs < 1.0


# -- 2 -------------------------------------------------------------------------------


@criterion(2, "tau_star certificate: witness (4, 2)")
@pytest.mark.parametrize("horizon", [12, 64, 1024])
def test_c2_tau_star(horizon):
    fs = [builtin("tau_star", (), horizon), builtin("ind_prime", (), horizon)]
    cert, secs = _timed(lambda: certify_jacobian(fs, [BasicDeriv(2), BasicDeriv(3)]))
    assert cert.verdict is Verdict.INDEPENDENT
    assert cert.witness.index == 4 and cert.witness.value == 2 and type(cert.witness.value) is int
    assert secs < 1.0


# -- 3 -------------------------------------------------------------------------------


@criterion(3, "values-at-primes determinant equals 1")
def test_c3_det_at_primes():
    primes = (2, 3, 5, 7)
    fs = [builtin("ind_ppowers", (p,), 64) for p in primes[:-1]] + [builtin("one", (), 64)]
    assert det([[f[p] for p in primes] for f in fs]) == 1
    cert = certify_value_tests(fs, list(primes), "at_primes")
    assert cert.verdict is Verdict.INDEPENDENT and cert.witness.value == 1


# -- 4 -------------------------------------------------------------------------------


def _x_x2(n):
    x = builtin("ind_ppowers", (2,), n)
    return x, conv(x, x)


@criterion(4, "counterexample block (a)-(d)", budget=2.0)
def test_c4_counterexamples():
    start = time.perf_counter()
    x, x2 = _x_x2(256)
    # (a)
    ops = [NormalizedDkHat(2), NormalizedDkHat(4)]
    assert det([[op.apply(f)[1] for op in ops] for f in (x, x2)]) == 1
    # (b)
    assert sub(LogDeriv().apply(x), scale(L(2), sub(x2, x))).is_zero()
    # (c)
    e = eps(256)
    h1 = sub(sub(scale(3, x), x2), scale(2, e))
    h2 = add(sub(x2, scale(2, x)), e)
    assert tuple(h1[1:5]) == (0, 1, 0, 0)
    assert tuple(h2[1:5]) == (0, 0, 0, 1)
    # (d)
    for pair in itertools.combinations(primes_up_to(13), 2):
        cert = certify_jacobian([x, x2], [BasicDeriv(p) for p in pair])
        assert cert.verdict is Verdict.INCONCLUSIVE, pair
    oracle = dependence_oracle([x, x2], 2).certificate
    assert oracle.verdict is Verdict.DEPENDENT and str(oracle.witness.relation) == "x^2 - y"
    assert time.perf_counter() - start < 2.0


# -- 5 -------------------------------------------------------------------------------


@criterion(5, "Omega-Wronskian value at 1 equals 4", budget=1.0)
def test_c5_omega_wronskian():
    n = 2
    om = builtin("Omega", (), 256)
    fs = [builtin("one", (), 256), om, pointwise_mul(om, om)]
    cert, secs = _timed(lambda: wronskian_li(fs, BasicDeriv(2)))
    closed = det([[j**i for j in range(n + 1)] for i in range(n + 1)]) * math.prod(
        math.factorial(j) for j in range(n + 1)
    )
    assert closed == 4
    assert cert.witness.index == 1 and cert.witness.value == closed
    assert secs < 1.0


# -- 6 -------------------------------------------------------------------------------

N6 = 256
PROPS = settings(max_examples=200, derandomize=True, deadline=None)
C6 = criterion(6, "property suite at horizon 256 (>= 200 cases each)", budget=60.0)


@C6
@PROPS
@given(seeds)
def test_c6_norm_multiplicative(seed):
    rng = rng_for(seed)
    f = random_fun(rng, N6, order=rng.randint(1, 16), logs=True)
    g = random_fun(rng, N6, order=rng.randint(1, 16), logs=True)
    norm = lambda h: Fraction(1, h.order())
    assert norm(conv(f, g)) == norm(f) * norm(g)


@C6
@PROPS
@given(seeds)
def test_c6_product_order_lemma(seed):
    rng = rng_for(seed)
    k = rng.choice([2, 3])
    orders = [rng.randint(1, 6) for _ in range(k)]
    fs = [random_fun(rng, N6, order=o, logs=True) for o in orders]
    a = [rng.randint(1, o) for o in orders]
    prod = fs[0]
    for f in fs[1:]:
        prod = conv(prod, f)
    rhs = 1
    for f, ai in zip(fs, a):
        rhs = rhs * f[ai]
    assert prod[math.prod(a)] == rhs


def _det_value_case(rng, n, choices):
    a = [rng.choice(choices) for _ in range(n)]
    b = [rng.choice(choices) for _ in range(n)]
    rows = [
        [random_fun(rng, N6, order=a[i] * b[j] + rng.choice([0, 0, 1, 2]), density=0.4) for j in range(n)]
        for i in range(n)
    ]
    index = math.prod(a) * math.prod(b)
    scalar = det([[rows[i][j][a[i] * b[j]] for j in range(n)] for i in range(n)])
    return conv_det(rows)[index], scalar


@C6
@PROPS
@given(seeds)
def test_c6_det_value_2x2(seed):
    got, want = _det_value_case(rng_for(seed), 2, [1, 2, 3])
    assert got == want


@C6
@PROPS
@given(seeds)
def test_c6_det_value_3x3(seed):
    got, want = _det_value_case(rng_for(seed), 3, [1, 2])
    assert got == want


@C6
@PROPS
@given(seeds)
def test_c6_exp_log(seed):
    rng = rng_for(seed)
    f, g = random_fun(rng, N6, f1=0, logs=True), random_fun(rng, N6, f1=0, logs=True)
    u, v = random_fun(rng, N6, f1=1, logs=True), random_fun(rng, N6, f1=1, logs=True)
    assert log1(exp0(f)) == f
    assert exp0(log1(u)) == u
    assert exp0(add(f, g)) == conv(exp0(f), exp0(g))
    assert log1(conv(u, v)) == add(log1(u), log1(v))


@C6
@PROPS
@given(seeds)
def test_c6_derivation_of_exp(seed):
    rng = rng_for(seed)
    f = random_fun(rng, N6, f1=0, logs=True)
    g = build_completely_additive(
        {p: random_scalar(rng, logs=True) for p in primes_up_to(N6)}, N6
    )
    ef = exp0(f)
    for d in (LogDeriv(), BasicDeriv(rng.choice(SMALL_PRIMES)), PointwiseMul(g)):
        assert d.apply(ef) == conv(ef, d.apply(f)), d.label


@C6
@PROPS
@given(seeds)
def test_c6_support_kernel(seed):
    rng = rng_for(seed)
    p = rng.choice(SMALL_PRIMES)
    vals = list(random_fun(rng, N6, density=rng.choice([0.02, 0.1, 0.5])))
    if rng.random() < 0.5:
        vals = [0 if n % p == 0 else v for n, v in enumerate(vals, 1)]
    f = ArithFun(vals)
    in_kernel = BasicDeriv(p).apply(f).is_zero()
    touches = any(m % p == 0 for m in f.support())
    assert in_kernel == (not touches)


@C6
@PROPS
@given(seeds)
def test_c6_order_lemma(seed):
    rng = rng_for(seed)
    p = rng.choice([2, 3, 5])
    f = random_fun(rng, N6, order=rng.randint(1, 40), density=0.3, logs=True)
    nonvanishing = rng.random() < 0.5
    vals = [1] + [random_scalar(rng) if nonvanishing else rng.choice([0, 0, random_scalar(rng)]) for _ in range(N6 - 1)]
    if nonvanishing:
        vals = [v if v else 1 for v in vals]
    g = ArithFun(vals)
    i = rng.choice([-2, -1, 1, 2]) if nonvanishing else rng.choice([0, 1, 2])
    lhs = BasicDeriv(p).apply(f).order()
    rhs = BasicDeriv(p).apply(PointwiseMul(g, i).apply(f)).order()
    inf = math.inf
    lhs, rhs = (inf if lhs is None else lhs), (inf if rhs is None else rhs)
    assert lhs <= rhs
    if nonvanishing:
        assert lhs == rhs


@C6
@PROPS
@given(seeds)
def test_c6_eps_one_after_dhat(seed):
    f = random_fun(rng_for(seed), N6, logs=True)
    for k in range(1, 65):
        assert apply_dk_hat(k, f)[1] == f[k]


# -- 7 -------------------------------------------------------------------------------

N7 = 512
FAMILY_KINDS = ("monomials", "indicators", "omega_powers", "shifts", "planted")


def _family(rng, kind):
    b = lambda name, *params: builtin(name, params, N7)
    if kind == "monomials":
        ns = rng.sample(range(2, 9), rng.choice([2, 3]))
        return [b("e", n) for n in ns], None
    if kind == "indicators":
        pool = [b("ind_prime"), b("one")] + [b("ind_ppowers", p) for p in (2, 3, 5, 7)]
        return rng.sample(pool, rng.choice([2, 3])), None
    if kind == "omega_powers":
        om = b("Omega")
        ks = rng.sample(range(0, 4), rng.choice([2, 3]))
        return [PointwiseMul(om, k).apply(b("one")) for k in ks], None
    if kind == "shifts":
        base = rng.choice([b("one"), b("ind_prime"), b("Omega")])
        ks = rng.sample(range(0, 4), rng.choice([2, 3]))
        return [Shift(k).apply(base) for k in ks], None
    # planted pair (f, P(f)) with P of degree d
    f = rng.choice([b("ind_prime"), b("Omega"), b("e", rng.randint(2, 8)), b("ind_ppowers", 2), b("I", 1)])
    d = rng.randint(1, 3)
    coeffs = [rng.randint(-3, 3) for _ in range(d)] + [rng.choice([-2, -1, 1, 2])]
    g = scale(coeffs[0], eps(N7))
    for k in range(1, d + 1):
        if coeffs[k]:
            g = add(g, scale(coeffs[k], conv_power(f, k)))
    return [f, g], d


def _certificates(fs):
    n = len(fs)
    tuples = list(itertools.combinations((2, 3, 5, 7), n))
    out = []
    for ps in tuples[:3]:
        ps = list(ps)
        out.append(certify_jacobian(fs, [BasicDeriv(p) for p in ps]))
        out.append(certify_value_tests(fs, ps, "at_primes"))
        out.append(certify_support(fs, "triangular", primes=ps))
    out.append(certify_orders(fs))
    return out


@criterion(7, "oracle/certificate consistency on 50 families at horizon 512", budget=120.0)
def test_c7_consistency_battery():
    rng = random.Random(20240607)
    contradictions = []
    certified_families = 0
    planted = 0
    for idx in range(50):
        kind = FAMILY_KINDS[idx % len(FAMILY_KINDS)]
        fs, degree = _family(rng, kind)
        certs = _certificates(fs)
        if degree is not None:
            planted += 1
            oracle = dependence_oracle(fs, degree).certificate
            if oracle.verdict is not Verdict.DEPENDENT:
                contradictions.append((idx, kind, "planted relation missed"))
            elif not evaluate_relation(oracle.witness.relation, fs).is_zero():
                contradictions.append((idx, kind, "relation does not vanish"))
            if any(c.certified for c in certs):
                contradictions.append((idx, kind, "dependent pair certified independent"))
            continue
        if any(c.certified for c in certs):
            certified_families += 1
            oracle = dependence_oracle(fs, 3).certificate
            if oracle.verdict is not Verdict.INCONCLUSIVE:
                contradictions.append((idx, kind, f"oracle relation {oracle.witness.relation}"))
    assert not contradictions, contradictions
    # the battery must actually exercise both directions
    assert certified_families >= 20 and planted == 10


# -- 8 -------------------------------------------------------------------------------

C8_TUPLES = [t for r in (1, 2, 3) for t in itertools.combinations_with_replacement(range(2, 31), r)]
C8_PRIMES = primes_up_to(30)


def _box_search(ns, bound):
    """True when some nonzero k with |k_i| <= bound has prod n_i^k_i = 1."""
    _, rows = exponent_matrix(ns, C8_PRIMES)
    e = np.array(rows, dtype=np.int64)
    ks = np.array(list(itertools.product(range(-bound, bound + 1), repeat=len(ns))), dtype=np.int64)
    ks = ks[np.any(ks != 0, axis=1)]
    return bool(np.any(np.all(ks @ e == 0, axis=1)))


def _genuine(ns, k):
    num = math.prod(n**e for n, e in zip(ns, k) if e > 0)
    den = math.prod(n**-e for n, e in zip(ns, k) if e < 0)
    return any(k) and num == den


@criterion(8, "integer multiplicative independence vs exhaustive search", budget=10.0)
def test_c8_named_examples():
    assert mult_indep_integers([2, 6]).independent
    dep = mult_indep_integers([2, 4])
    assert not dep.independent and tuple(dep.relation) == (2, -1)


@criterion(8, "integer multiplicative independence vs exhaustive search", budget=10.0)
def test_c8_matches_box3_search():
    """Literal criterion: agreement with the |k| <= 3 box on every tuple.

    This cannot hold for a correct decision procedure: (2, 16) is dependent
    via 2^4 = 16, whose exponent 4 lies outside the box.  The test reports
    the disagreements instead of hiding them.
    """
    mismatches = [
        ns for ns in C8_TUPLES if _box_search(ns, 3) == mult_indep_integers(ns).independent
    ]
    assert not mismatches, f"{len(mismatches)} of {len(C8_TUPLES)} tuples disagree, e.g. {mismatches[:6]}"


@criterion(8, "integer multiplicative independence vs exhaustive search", budget=10.0)
def test_c8_sound_and_complete():
    """Every box-3 relation is detected, every reported relation is genuine,
    and the verdicts match an independent floating rank computation."""
    for ns in C8_TUPLES:
        r = mult_indep_integers(ns)
        if _box_search(ns, 3):
            assert not r.independent, ns
        if not r.independent:
            assert _genuine(ns, r.relation), ns
            # the disagreement with the box is only ever a box that is too small
            if not _box_search(ns, 3):
                assert max(abs(k) for k in r.relation) > 3, ns
        _, rows = exponent_matrix(ns, C8_PRIMES)
        assert r.independent == (np.linalg.matrix_rank(np.array(rows, dtype=float)) == len(ns)), ns


# -- 9 -------------------------------------------------------------------------------


@criterion(9, "performance floor")
def test_c9_conv_at_ten_thousand():
    rng = random.Random(9)
    n = 10**4
    f = ArithFun([Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)])
    g = ArithFun([Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)])
    h, secs = _timed(lambda: conv(f, g))
    assert h[6] == f[1] * g[6] + f[2] * g[3] + f[3] * g[2] + f[6] * g[1]
    assert secs < 1.0


@criterion(9, "performance floor")
def test_c9_paper_examples_in_process():
    (code, out, _), secs = _timed(lambda: run(["paper-examples"]))
    assert code == 0 and "FAIL" not in out
    assert secs < 5.0


@criterion(9, "performance floor")
def test_c9_paper_examples_subprocess():
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "arithring", "paper-examples"], capture_output=True, text=True, check=False
    )
    secs = time.perf_counter() - start
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert secs < 5.0
