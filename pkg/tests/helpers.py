"""Shared generators for randomized arithmetic functions."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from arithring.arithfun import ArithFun
from arithring.coeff import L

SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def random_scalar(rng, logs=False):
    kind = rng.random()
    if kind < 0.5:
        return rng.randint(-3, 3)
    if kind < 0.85 or not logs:
        return Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return rng.randint(-2, 2) + rng.randint(1, 2) * L(rng.choice(SMALL_PRIMES))


def random_fun(rng, horizon, *, order=None, density=0.5, logs=False, f1=None):
    """A random function; ``order`` forces the least support index, ``f1`` pins f(1)."""
    vals = [random_scalar(rng, logs) if rng.random() < density else 0 for _ in range(horizon)]
    if order is not None:
        for i in range(min(order - 1, horizon)):
            vals[i] = 0
        if order <= horizon:
            while not vals[order - 1]:
                vals[order - 1] = random_scalar(rng, logs)
    if f1 is not None:
        vals[0] = f1
    return ArithFun(vals)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng_for(seed):
    return random.Random(seed)
