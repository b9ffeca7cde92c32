"""Integer-side utilities: factoring, valuations, multiplicative independence,
completely additive / multiplicative builders and second-order recurrences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidQ, OutOfRange

HORIZON_CAP = 10**7


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: dict = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", dict(sorted(self.factors.items())))

    @property
    def primes(self):
        return list(self.factors)

    def value(self):
        return math.prod(p**e for p, e in self.factors.items())


@lru_cache(maxsize=1 << 16)
def _factor_tuple(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def factorize(n: int) -> Factorization:
    """Trial-division factorization for 1 <= n <= 10**7."""
    if not isinstance(n, int) or n < 1 or n > HORIZON_CAP:
        raise OutOfRange(f"factorize needs 1 <= n <= {HORIZON_CAP}, got {n!r}")
    return Factorization(n, dict(_factor_tuple(n)))


def factor_pairs(n: int) -> tuple:
    """Factorization as a sorted tuple of (p, e); the cached hot path."""
    if n < 1 or n > HORIZON_CAP:
        raise OutOfRange(f"factorize needs 1 <= n <= {HORIZON_CAP}, got {n!r}")
    return _factor_tuple(n)


def padic_val(p: int, n: int) -> int:
    if n < 1:
        raise OutOfRange(f"valuation of non-positive integer {n}")
    if p < 2:
        raise OutOfRange(f"{p} is not a prime")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= HORIZON_CAP:
        return _factor_tuple(n) == ((n, 1),)
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def primes_up_to(n: int) -> list:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


def smallest_prime_factors(n: int) -> list:
    """spf[k] for 0 <= k <= n (spf[0] = spf[1] = 0)."""
    spf = list(range(n + 1))
    if n >= 1:
        spf[1] = 0
    spf[0] = 0
    for i in range(2, math.isqrt(n) + 1):
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def factor_table(n: int) -> list:
    """Factorizations (tuples of (p, e)) of 0..n, index 0 unused."""
    if n > HORIZON_CAP:
        raise OutOfRange(f"table size {n} exceeds {HORIZON_CAP}")
    spf = smallest_prime_factors(n)
    table = [()] * (n + 1)
    for k in range(2, n + 1):
        p = spf[k]
        rest = k // p
        prev = table[rest]
        if prev and prev[0][0] == p:
            table[k] = ((p, prev[0][1] + 1),) + prev[1:]
        else:
            table[k] = ((p, 1),) + prev
    return table


def big_omega(n: int) -> int:
    return sum(e for _, e in factor_pairs(n))


# -- multiplicative independence -------------------------------------------------


@dataclass(frozen=True)
class MultIndependence:
    independent: bool
    primes: tuple
    exponent_matrix: tuple  # rows = input integers, columns = primes
    relation: tuple | None = None  # integer k with prod n_i^k_i == 1

    def __bool__(self):
        return self.independent


def exponent_matrix(ns, primes=None):
    facs = [dict(factor_pairs(n)) for n in ns]
    if primes is None:
        primes = sorted({p for f in facs for p in f})
    return tuple(primes), tuple(tuple(f.get(p, 0) for p in primes) for f in facs)


def mult_indep_integers(ns) -> MultIndependence:
    """Decide multiplicative independence of integers >= 2.

    Full row rank of the (integer x prime) exponent matrix means independent;
    otherwise an integer left-kernel vector is returned and re-checked.
    """
    from .linalg import left_kernel

    ns = list(ns)
    for n in ns:
        if not isinstance(n, int) or n < 2:
            raise OutOfRange(f"multiplicative independence needs integers >= 2, got {n!r}")
    primes, mat = exponent_matrix(ns)
    if not ns:
        return MultIndependence(True, primes, mat)
    _, kernel = left_kernel([list(r) for r in mat])
    if not kernel:
        return MultIndependence(True, primes, mat)
    rel = integer_vector(kernel[0])
    num = math.prod(n**k for n, k in zip(ns, rel) if k > 0)
    den = math.prod(n ** (-k) for n, k in zip(ns, rel) if k < 0)
    assert num == den, "kernel vector failed re-multiplication"
    return MultIndependence(False, primes, mat, rel)


def integer_vector(vec) -> tuple:
    """Clear denominators and content; first nonzero entry made positive."""
    fr = [Fraction(x) for x in vec]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    ints = [int(x * den) for x in fr]
    g = math.gcd(*ints) or 1
    ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)


# -- builders -----------------------------------------------------------------


def _prime_value(prime_values, p, default):
    if callable(prime_values):
        return prime_values(p)
    return prime_values.get(p, default)


def build_completely_additive(prime_values, horizon: int):
    """g(n) = sum_p v_p(n) g(p); primes not listed get value 0.

    ``prime_values`` is a mapping prime -> coefficient or a callable on primes.
    """
    from .arithfun import ArithFun, check_horizon

    check_horizon(horizon)
    table = factor_table(horizon)
    cache = {}
    vals = [0] * horizon
    for n in range(2, horizon + 1):
        total = 0
        for p, e in table[n]:
            if p not in cache:
                cache[p] = _prime_value(prime_values, p, 0)
            total = total + e * cache[p]
        vals[n - 1] = total
    return ArithFun(vals)


def build_completely_multiplicative(prime_values, horizon: int):
    """g(n) = prod_p g(p)^v_p(n); primes not listed get value 1."""
    from .arithfun import ArithFun, check_horizon

    check_horizon(horizon)
    table = factor_table(horizon)
    cache = {}
    vals = [1] * horizon
    for n in range(2, horizon + 1):
        prod = 1
        for p, e in table[n]:
            if p not in cache:
                cache[p] = _prime_value(prime_values, p, 1)
            prod = prod * cache[p] ** e
        vals[n - 1] = prod
    return ArithFun(vals)


# -- second-order recurrences ---------------------------------------------------


@dataclass(frozen=True)
class Recurrence:
    P: int
    Q: int
    u1: int
    u2: int
    terms: tuple

    def check(self) -> bool:
        t = self.terms
        return all(t[i + 2] == self.P * t[i + 1] - self.Q * t[i] for i in range(len(t) - 2))

    @property
    def degenerate(self) -> bool:
        return is_degenerate(self.P, self.Q)


def recurrence_terms(P: int, Q: int, u1: int, u2: int, bound: int, max_terms: int | None = None) -> Recurrence:
    """Terms U_1, U_2, ... of U_{n+2} = P U_{n+1} - Q U_n.

    Generation stops before the first term with |U_n| > bound, or after
    ``max_terms`` terms (default 2*bound + 2, which also ends periodic and
    slowly growing sequences).
    """
    if Q == 0:
        raise InvalidQ("recurrence needs Q != 0")
    if bound < 0 or bound > HORIZON_CAP:
        raise OutOfRange(f"bound must lie in [0, {HORIZON_CAP}]")
    if max_terms is None:
        max_terms = 2 * bound + 2
    terms = []
    a, b = u1, u2
    while len(terms) < max_terms and abs(a) <= bound:
        terms.append(a)
        a, b = b, P * b - Q * a
    return Recurrence(P, Q, u1, u2, tuple(terms))


def is_degenerate(P: int, Q: int) -> bool:
    """Root ratio of z^2 - Pz + Q is a root of unity  <=>  P^2 in {0, Q, 2Q, 3Q, 4Q}."""
    if Q == 0:
        raise InvalidQ("recurrence needs Q != 0")
    return P * P in (0, Q, 2 * Q, 3 * Q, 4 * Q)


def recurrence_set(P: int, Q: int, u1: int, u2: int, horizon: int) -> set:
    """Positive terms <= horizon, i.e. the set U behind the indicator 1_U."""
    return {t for t in recurrence_terms(P, Q, u1, u2, horizon).terms if 1 <= t <= horizon}
