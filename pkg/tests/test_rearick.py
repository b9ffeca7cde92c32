from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings

from arithring.arithfun import add, builtin, conv, conv_power, eps, scale
from arithring.errors import NotInA0, NotInA1
from arithring.rearick import exp0, iterate_exp, log1, power_fg, series_depth
from helpers import random_fun, rng_for, seeds

PROPS = settings(max_examples=200, derandomize=True, deadline=None)
N = 128


def b(name, *params, n=N):
    return builtin(name, params, n)


def test_exp_examples():
    assert exp0(b("zero")) == eps(N)
    e2 = exp0(b("e", 2))
    assert [e2[2**k] for k in range(7)] == [Fraction(1, factorial(k)) for k in range(7)]
    assert exp0(b("kappa")) == b("one")


def test_log_examples():
    k = log1(b("one"))
    assert k == b("kappa") and k[8] == Fraction(1, 3) and k[6] == 0
    assert log1(eps(N)).is_zero()
    lg = log1(b("ind_ppowers", 2))
    assert [lg[2**k] for k in range(1, 7)] == [Fraction(1, k) for k in range(1, 7)]


def test_general_powers():
    f = random_fun(rng_for(5), N, f1=1)
    assert power_fg(f, eps(N)) == f
    assert power_fg(b("one"), scale(2, eps(N))) == conv_power(b("one"), 2)


def test_iterates():
    assert iterate_exp(b("kappa"), 1) == b("one")
    f = random_fun(rng_for(6), N)
    assert iterate_exp(f, 0) == f
    assert iterate_exp(b("one"), -1) == b("kappa")


def test_domain_errors():
    with pytest.raises(NotInA0):
        exp0(b("one"))
    with pytest.raises(NotInA1):
        log1(b("zero"))
    with pytest.raises(NotInA1):
        log1(scale(2, b("one")))


def test_series_depth_bound():
    assert series_depth(1) == 0
    assert series_depth(1024) == 10


@PROPS
@given(seeds)
def test_recurrence_matches_series(seed):
    rng = rng_for(seed)
    f = random_fun(rng, 64, logs=True, f1=0)
    assert exp0(f) == exp0(f, method="series")
    u = random_fun(rng, 64, logs=True, f1=1)
    assert log1(u) == log1(u, method="series")


@PROPS
@given(seeds)
def test_homomorphism_laws(seed):
    rng = rng_for(seed)
    f, g = random_fun(rng, N, f1=0), random_fun(rng, N, f1=0)
    assert exp0(add(f, g)) == conv(exp0(f), exp0(g))
    u, v = random_fun(rng, N, f1=1), random_fun(rng, N, f1=1)
    assert log1(conv(u, v)) == add(log1(u), log1(v))
    assert log1(exp0(f)) == f
    assert exp0(log1(u)) == u
