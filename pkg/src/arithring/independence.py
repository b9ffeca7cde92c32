"""Algebraic-independence certificates for truncated arithmetic functions.

Every positive verdict rests on an explicit nonzero value of some exact
determinant; a zero up to the horizon is only ever reported as Inconclusive.
The brute-force relation search in :func:`dependence_oracle` is independent
of all the criteria and is what the tests cross-check them against.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import NamedTuple

from . import coeff as _c
from .arithfun import ArithFun, _norm, conv, eps
from .errors import (
    CapExceeded,
    DimensionTooLarge,
    HorizonExhausted,
    HypothesisViolated,
    InvalidParams,
    NonDistinctPrimes,
    NotSquare,
    ZeroFunction,
)
from .linalg import det as scalar_det
from .linalg import echelon
from .numtheory import is_prime, mult_indep_integers, padic_val
from .operators import BasicDeriv, PointwiseMul, compose, is_completely_additive

MAX_DET_DIM = 6
DEFAULT_ORACLE_CAP = 500


class Verdict(str, enum.Enum):
    INDEPENDENT = "IndependentCertified"
    DEPENDENT = "DependentRelationFound"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Witness:
    index: int | None = None
    value: object = None
    relation: "Polynomial | None" = None

    def to_dict(self):
        if self.relation is not None:
            return {"relation": str(self.relation)}
        return {"index": self.index, "value": _c.format_scalar(self.value)}


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    method: str
    witness: Witness | None
    horizon: int
    caveats: tuple = ()
    data: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def certified(self):
        return self.verdict is Verdict.INDEPENDENT

    def to_dict(self):
        out = {
            "verdict": self.verdict.value,
            "method": self.method,
            "witness": self.witness.to_dict() if self.witness else None,
            "horizon": self.horizon,
            "caveats": list(self.caveats),
        }
        if self.data:
            out["data"] = _jsonable(self.data)
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, int):
        return x
    return _c.format_scalar(x)


# -- matrices of arithmetic functions -----------------------------------------


class FunMatrix:
    """Rectangular grid of ArithFuns; plain scalars c are read as c*eps."""

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise InvalidParams("matrix needs at least one entry")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidParams("matrix rows have different lengths")
        funs = [x for r in rows for x in r if isinstance(x, ArithFun)]
        if not funs:
            raise InvalidParams("matrix needs at least one arithmetic function to fix a horizon")
        self.horizon = min(f.horizon for f in funs)
        self.rows = [[x if isinstance(x, ArithFun) else ArithFun.scalar(x, self.horizon) for x in r] for r in rows]
        self.entry_horizons = [[x.horizon for x in r] for r in self.rows]

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def jacobian(cls, fs, ops):
        """Rows indexed by functions, columns by operators: entry (i, j) = D_j f_i."""
        return cls([[op.apply(f) for op in ops] for f in fs])

    @classmethod
    def wronskian(cls, fs, op):
        powers = [compose([op] * j) for j in range(len(fs))]
        return cls([[d.apply(f) for d in powers] for f in fs])

    def at(self, n):
        return [[x[n] for x in r] for r in self.rows]


def _as_matrix(m):
    return m if isinstance(m, FunMatrix) else FunMatrix(m)


def conv_det(m):
    """Determinant in the convolution ring, exact up to the common horizon.

    Laplace expansion along rows with memoised minors: the same signed sum of
    permutation products as the Leibniz formula, with shared sub-products.
    """
    m = _as_matrix(m)
    n, k = m.shape
    if n != k:
        raise NotSquare(f"determinant of a {n}x{k} matrix")
    if n > MAX_DET_DIM:
        raise DimensionTooLarge(f"determinants are limited to {MAX_DET_DIM}x{MAX_DET_DIM}, got {n}")
    horizon = m.horizon
    rows = [[x.truncate(horizon) for x in r] for r in m.rows]
    nonzero = [[not x.is_zero() for x in r] for r in rows]
    zero = ArithFun._raw([0] * horizon)
    memo = {}

    def minor(r, cols):
        # rows r.. against the sorted column tuple cols
        if r == n:
            return eps(horizon)
        if cols in memo:
            return memo[cols]
        total = None
        for pos, c in enumerate(cols):
            if not nonzero[r][c]:
                continue
            sub = minor(r + 1, cols[:pos] + cols[pos + 1 :])
            if sub.is_zero():
                continue
            term = conv(rows[r][c], sub)
            if total is None:
                total = term if pos % 2 == 0 else -term
            else:
                total = total + term if pos % 2 == 0 else total - term
        memo[cols] = total if total is not None else zero
        return memo[cols]

    return minor(0, tuple(range(n)))


def nonzero_witness(f):
    """Least index with a nonzero value, with the value; None if zero up to horizon."""
    for n, v in enumerate(f.values, 1):
        if not _c.coeff_is_zero(v):
            return n, v
    return None


def _shrink_caveat(horizon_in, horizon_out):
    if horizon_out < horizon_in:
        return (f"operators shrink the horizon from {horizon_in} to {horizon_out}",)
    return ()


def _det_certificate(det, method, horizon_in, extra_caveats=(), data=None):
    w = nonzero_witness(det)
    caveats = _shrink_caveat(horizon_in, det.horizon) + tuple(extra_caveats)
    if w is None:
        caveats += (f"determinant is zero up to horizon {det.horizon}; this is not a dependence claim",)
        return Certificate(Verdict.INCONCLUSIVE, method, None, det.horizon, caveats, data or {})
    return Certificate(Verdict.INDEPENDENT, method, Witness(*w), det.horizon, caveats, data or {})


def _check_dim(fs, ops=None):
    n = len(fs)
    if n == 0:
        raise InvalidParams("need at least one function")
    if n > MAX_DET_DIM:
        raise DimensionTooLarge(f"at most {MAX_DET_DIM} functions, got {n}")
    if ops is not None and len(ops) != n:
        raise NotSquare(f"{n} functions but {len(ops)} operators")


def _is_derivation(op, horizon):
    if isinstance(op, PointwiseMul):
        if op.i != 1:
            return False
        g = op.multiplier(horizon)
        return is_completely_additive(g)
    return op.is_derivation(horizon)


def certify_jacobian(fs, ops):
    """Nonzero det(D_j f_i) certifies Exp-closure independence over ker{D_j}.

    Only derivations qualify; d_k for composite k, dhat_k and shifts are
    rejected since the criterion fails for them.
    """
    _check_dim(fs, ops)
    horizon = min(f.horizon for f in fs)
    for op in ops:
        if not _is_derivation(op, horizon):
            raise HypothesisViolated(f"{op.label} is not a derivation; the Jacobian criterion needs derivations")
    det = conv_det(FunMatrix.jacobian(fs, ops))
    return _det_certificate(det, "jacobian", horizon, data={"operators": [op.label for op in ops]})


# -- value tests ----------------------------------------------------------------


def _check_primes(primes, n):
    primes = list(primes)
    if len(primes) != n:
        raise InvalidParams(f"need {n} primes, got {len(primes)}")
    for p in primes:
        if not isinstance(p, int) or not is_prime(p):
            raise InvalidParams(f"{p!r} is not a prime")
    if len(set(primes)) != len(primes):
        raise NonDistinctPrimes(f"primes must be distinct, got {primes}")
    return primes


def _value(f, n):
    if n > f.horizon:
        raise HorizonExhausted(f"value at {n} needed but the horizon is {f.horizon}")
    return f[n]


def ordered_factorizations(m, k):
    """All k-tuples of positive integers with product m."""
    if k == 1:
        yield (m,)
        return
    for d in range(1, m + 1):
        if m % d == 0:
            for rest in ordered_factorizations(m // d, k - 1):
                yield (d,) + rest


def _gvj_sum(fs, primes, m):
    n = len(fs)
    total = 0
    for ks in ordered_factorizations(m, n):
        args = [k * p for k, p in zip(ks, primes)]
        weight = math.prod(padic_val(p, a) for p, a in zip(primes, args))
        d = scalar_det([[_value(f, a) for a in args] for f in fs])
        if d:
            total = total + weight * d
    return _norm(total)


def certify_value_tests(fs, primes, mode="at_primes", m=1, anchors=None):
    """Scalar determinant tests with D_j = d_{p_j}.

    ``at_primes``: det(f_i(p_j)).  ``gvj``: the weighted sum over
    k_1...k_n = m, which is the value of det(d_{p_j} f_i) at m.
    ``order_anchored``: det((d_{p_j} f_i)(m_j)) with m_j <= v(d_{p_j} f_i);
    anchors default to m_j = min_i v(d_{p_j} f_i).
    """
    _check_dim(fs)
    primes = _check_primes(primes, len(fs))
    horizon = min(f.horizon for f in fs)
    data = {"primes": primes}
    if mode == "at_primes":
        value = _norm(scalar_det([[_value(f, p) for p in primes] for f in fs]))
        index = 1
    elif mode == "gvj":
        if not isinstance(m, int) or m < 1:
            raise InvalidParams(f"gvj needs a positive integer m, got {m!r}")
        value = _gvj_sum(fs, primes, m)
        index = m
        data["m"] = m
    elif mode == "order_anchored":
        cols = [[BasicDeriv(p).apply(f) for p in primes] for f in fs]
        orders = [[g.order() for g in row] for row in cols]
        if anchors is None:
            anchors = []
            for j in range(len(primes)):
                col = [o[j] for o in orders if o[j] is not None]
                if not col:
                    return Certificate(
                        Verdict.INCONCLUSIVE,
                        "value_test:order_anchored",
                        None,
                        horizon,
                        (f"column d_{primes[j]} is zero up to its horizon; no anchor available",),
                        data,
                    )
                anchors.append(min(col))
        anchors = list(anchors)
        if len(anchors) != len(primes):
            raise InvalidParams("one anchor per prime is required")
        for i, row in enumerate(orders):
            for j, o in enumerate(row):
                if anchors[j] > cols[i][j].horizon:
                    raise HorizonExhausted(f"anchor {anchors[j]} lies beyond horizon {cols[i][j].horizon}")
                if o is not None and anchors[j] > o:
                    raise HypothesisViolated(
                        f"anchor m_{j + 1} = {anchors[j]} exceeds v(d_{primes[j]} f_{i + 1}) = {o}"
                    )
        value = _norm(scalar_det([[cols[i][j][anchors[j]] for j in range(len(primes))] for i in range(len(fs))]))
        index = math.prod(anchors)
        data["anchors"] = anchors
    else:
        raise InvalidParams(f"unknown value-test mode {mode!r}")
    method = f"value_test:{mode}"
    if _c.coeff_is_zero(value):
        return Certificate(Verdict.INCONCLUSIVE, method, None, horizon, ("test value is zero",), data)
    caveats = ()
    if index > horizon // max(primes):
        caveats = (f"witness index {index} lies beyond the Jacobian horizon {horizon // max(primes)}",)
    return Certificate(Verdict.INDEPENDENT, method, Witness(index, value), horizon, caveats, data)


# -- orders and supports --------------------------------------------------------


def certify_orders(fs):
    """Multiplicatively independent orders certify independence.

    The witness is the value of the d_p Jacobian at prod m_i / prod p_j for
    primes with det(v_{p_j}(m_i)) != 0, namely prod f_i(m_i) times that
    integer determinant.
    """
    _check_dim(fs)
    horizon = min(f.horizon for f in fs)
    orders = []
    for i, f in enumerate(fs):
        o = f.order()
        if o is None:
            raise ZeroFunction(f"f_{i + 1} is zero up to horizon {f.horizon}; its order is unknown")
        orders.append(o)
    data = {"orders": orders}
    if 1 in orders:
        return Certificate(
            Verdict.INCONCLUSIVE,
            "orders",
            None,
            horizon,
            ("an order equal to 1 is never multiplicatively independent",),
            data,
        )
    mi = mult_indep_integers(orders)
    data["primes"] = list(mi.primes)
    data["exponent_matrix"] = [list(r) for r in mi.exponent_matrix]
    if not mi.independent:
        data["relation"] = list(mi.relation)
        return Certificate(
            Verdict.INCONCLUSIVE,
            "orders",
            None,
            horizon,
            (f"orders are multiplicatively dependent with exponents {list(mi.relation)}",),
            data,
        )
    n = len(fs)
    for ps in combinations(mi.primes, n):
        vdet = scalar_det([[padic_val(p, o) for p in ps] for o in orders])
        if vdet:
            break
    else:  # full row rank guarantees a nonzero minor
        raise AssertionError("no nonzero minor in a full-rank exponent matrix")
    index = math.prod(orders) // math.prod(ps)
    value = _norm(math.prod(f[o] for f, o in zip(fs, orders)) * vdet)
    data["witness_primes"] = list(ps)
    caveats = ()
    jac_horizon = horizon // max(ps)
    if index <= jac_horizon:
        det = conv_det(FunMatrix.jacobian(fs, [BasicDeriv(p) for p in ps]))
        assert det[index] == value, "order witness disagrees with the Jacobian"
    else:
        caveats = (f"witness index {index} lies beyond the Jacobian horizon {jac_horizon}; value from the order formula",)
    return Certificate(Verdict.INDEPENDENT, "orders", Witness(index, value), horizon, caveats, data)


def _support_caveat(horizon):
    return f"supports are under-approximated at horizon {horizon}"


def certify_support(fs, mode="triangular", primes=None, gs=None):
    """Support-pattern tests.

    ``triangular``: p_j in [supp f_j] minus [supp f_i] for i < j; confirmed
    by a nonzero value of the d_{p_j} Jacobian.  ``escape``: fs is a single
    f and some prime of [supp f] divides no support element of any g in gs.
    """
    if mode == "triangular":
        _check_dim(fs)
        primes = _check_primes(primes, len(fs))
        horizon = min(f.horizon for f in fs)
        pdivs = [set(f.order_report().prime_divisors) for f in fs]
        data = {"primes": primes}
        for j, p in enumerate(primes):
            bad = p not in pdivs[j] or any(p in pdivs[i] for i in range(j))
            if bad:
                return Certificate(
                    Verdict.INCONCLUSIVE,
                    "support:triangular",
                    None,
                    horizon,
                    (f"prime {p} breaks the triangular pattern at position {j + 1}", _support_caveat(horizon)),
                    data,
                )
        det = conv_det(FunMatrix.jacobian(fs, [BasicDeriv(p) for p in primes]))
        return _det_certificate(det, "support:triangular", horizon, (_support_caveat(horizon),), data)
    if mode == "escape":
        f = fs[0] if isinstance(fs, (list, tuple)) else fs
        gs = list(gs or ())
        horizon = min([f.horizon] + [g.horizon for g in gs])
        f = f.truncate(horizon)
        blocked = set()
        for g in gs:
            blocked.update(g.truncate(horizon).order_report().prime_divisors)
        rep = f.order_report()
        for p in rep.prime_divisors:
            if p not in blocked:
                m = next(n for n in rep.support if n % p == 0)
                return Certificate(
                    Verdict.INDEPENDENT,
                    "support:escape",
                    Witness(m, f[m]),
                    horizon,
                    (_support_caveat(horizon),),
                    {"prime": p},
                )
        return Certificate(
            Verdict.INCONCLUSIVE,
            "support:escape",
            None,
            horizon,
            ("every prime of [supp f] divides a support element of some g", _support_caveat(horizon)),
        )
    raise InvalidParams(f"unknown support mode {mode!r}")


def wronskian_li(fs, op):
    """Nonzero Wronskian (op^j f_i) certifies linear independence over the constants."""
    _check_dim(fs)
    horizon = min(f.horizon for f in fs)
    det = conv_det(FunMatrix.wronskian(fs, op))
    return _det_certificate(det, "wronskian", horizon, data={"operator": op.label})


# -- brute-force relation oracle ---------------------------------------------------


def _var_names(n):
    return ["x", "y", "z"][:n] if n <= 3 else [f"x{i}" for i in range(1, n + 1)]


def _exponent_key(alpha):
    return (sum(alpha), alpha)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in n variables; ``terms`` maps exponent tuples to scalars."""

    nvars: int
    terms: tuple  # ((alpha, coefficient), ...), leading term first

    @classmethod
    def from_dict(cls, nvars, mapping):
        items = [(tuple(a), _norm(c)) for a, c in mapping.items() if not _c.coeff_is_zero(c)]
        items.sort(key=lambda t: _exponent_key(t[0]), reverse=True)
        return cls(nvars, tuple(items))

    @property
    def degree(self):
        return max((sum(a) for a, _ in self.terms), default=0)

    def normalized(self):
        """Scale so the leading coefficient is 1 when it is rational."""
        if not self.terms:
            return self
        lead = self.terms[0][1]
        if not _c.is_rational(lead):
            return self
        inv = _c.inverse(lead)
        return Polynomial(self.nvars, tuple((a, _norm(c * inv)) for a, c in self.terms))

    def __str__(self):
        names = _var_names(self.nvars)
        if not self.terms:
            return "0"
        parts = []
        for k, (alpha, c) in enumerate(self.terms):
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(names, alpha) if e
            )
            neg = _c.is_rational(c) and c < 0
            mag = -c if neg else c
            if not mono:
                body = _c.format_scalar(mag)
            elif mag == 1:
                body = mono
            elif _c.is_rational(mag):
                body = f"{_c.format_scalar(mag)}*{mono}"
            else:
                body = f"({_c.format_scalar(mag)})*{mono}"
            if k == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)


def monomial_exponents(n, d):
    """Exponent tuples of total degree <= d, by degree then lexicographically descending."""
    out = []
    for deg in range(d + 1):
        block = set()
        for combo in combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            block.add(tuple(alpha))
        out.extend(sorted(block, reverse=True))
    return out


def _monomial_values(fs, exps, horizon):
    """f^alpha for every alpha, built from cached lower-degree products."""
    fs = [f.truncate(horizon) for f in fs]
    cache = {tuple([0] * len(fs)): eps(horizon)}

    def power(alpha):
        if alpha not in cache:
            i = next(k for k, e in enumerate(alpha) if e)
            lower = list(alpha)
            lower[i] -= 1
            cache[alpha] = conv(power(tuple(lower)), fs[i])
        return cache[alpha]

    return [power(a) for a in exps]


def evaluate_relation(poly, fs):
    """P(f_1, ..., f_n) in the convolution ring."""
    horizon = min(f.horizon for f in fs)
    exps = [a for a, _ in poly.terms]
    vals = _monomial_values(fs, exps, horizon)
    total = ArithFun._raw([0] * horizon)
    for (_, c), v in zip(poly.terms, vals):
        total = total + v * c
    return total


class OracleResult(NamedTuple):
    certificate: Certificate
    mu_profile: dict  # degree -> Fraction (0 when a relation exists)


def _oracle_degree(fs, d, horizon, cap):
    n = len(fs)
    count = math.comb(n + d, d)
    if count > cap:
        raise CapExceeded(f"{count} monomials of degree <= {d} in {n} variables exceed the cap {cap}")
    exps = monomial_exponents(n, d)
    vals = _monomial_values(fs, exps, horizon)
    pivots, _, transforms = echelon([list(v.values) for v in vals])
    kernel = transforms[len(pivots) :]
    if kernel:
        return exps, Fraction(0), kernel
    return exps, Fraction(1, pivots[-1] + 1), []


def dependence_oracle(fs, degree, cap=DEFAULT_ORACLE_CAP):
    """Search all polynomials of total degree <= ``degree`` for a relation up to the horizon.

    mu_d is the reciprocal of the largest order reached by a combination of
    the monomials that is not a constant; it is 0 when some combination
    vanishes up to the horizon.
    """
    if not isinstance(degree, int) or degree < 1:
        raise InvalidParams(f"degree must be a positive integer, got {degree!r}")
    if not fs:
        raise InvalidParams("need at least one function")
    n = len(fs)
    horizon = min(f.horizon for f in fs)
    profile = {}
    relation = None
    kernel_dim = 0
    for d in range(1, degree + 1):
        exps, mu, kernel = _oracle_degree(fs, d, horizon, cap)
        profile[d] = mu
        if kernel and relation is None:
            relation = Polynomial.from_dict(n, dict(zip(exps, kernel[0]))).normalized()
            kernel_dim = len(kernel)
    data = {"degree": degree, "mu_profile": {d: profile[d] for d in profile}}
    if relation is not None:
        assert evaluate_relation(relation, fs).is_zero(), "oracle relation does not vanish"
        data["kernel_dimension"] = kernel_dim
        cert = Certificate(
            Verdict.DEPENDENT,
            "dependence_oracle",
            Witness(relation=relation),
            horizon,
            (f"relation vanishes up to horizon {horizon} only; it is a candidate, not a proof",),
            data,
        )
    else:
        cert = Certificate(
            Verdict.INCONCLUSIVE,
            "dependence_oracle",
            None,
            horizon,
            (f"no relation of degree <= {degree} up to horizon {horizon}",),
            data,
        )
    return OracleResult(cert, profile)


# -- rank in the convolution ring ----------------------------------------------


class RankResult(NamedTuple):
    rank: int
    caveat: str


def rank_ff(m):
    """Lower bound for the rank over the fraction field, by cross-multiplication.

    Pivot: the remaining row whose entry in the current column has the
    smallest order, ties to the lowest index.
    """
    m = _as_matrix(m)
    horizon = m.horizon
    rows = [[x.truncate(horizon) for x in r] for r in m.rows]
    nrows, ncols = m.shape
    r = 0
    for col in range(ncols):
        best = None
        for i in range(r, nrows):
            o = rows[i][col].order()
            if o is not None and (best is None or o < best[0]):
                best = (o, i)
        if best is None:
            continue
        i = best[1]
        rows[r], rows[i] = rows[i], rows[r]
        piv_row = rows[r]
        piv = piv_row[col]
        for i in range(r + 1, nrows):
            a = rows[i][col]
            if a.is_zero():
                continue
            rows[i] = [conv(piv, x) - conv(a, y) for x, y in zip(rows[i], piv_row)]
        r += 1
        if r == nrows:
            break
    caveat = f"lower bound: entries that vanish up to horizon {horizon} may be truncation artifacts"
    return RankResult(r, caveat)


def certificate_summary(cert):
    w = cert.witness
    if w is None:
        wit = "-"
    elif w.relation is not None:
        wit = f"relation {w.relation}"
    else:
        wit = f"index {w.index}, value {_c.format_scalar(w.value)}"
    return f"{cert.verdict.value} [{cert.method}] witness: {wit}; horizon {cert.horizon}"


def check_witness(cert, fs, ops=None):
    """Recompute the stored witness; True when the value is reproduced."""
    w = cert.witness
    if w is None:
        return True
    if w.relation is not None:
        return evaluate_relation(w.relation, fs).is_zero()
    if cert.method == "jacobian":
        det = conv_det(FunMatrix.jacobian(fs, ops))
    elif cert.method == "wronskian":
        det = conv_det(FunMatrix.wronskian(fs, ops[0] if isinstance(ops, (list, tuple)) else ops))
    elif cert.method == "support:escape":
        return fs[0][w.index] == w.value
    else:
        ps = cert.data.get("witness_primes") or cert.data.get("primes")
        det = conv_det(FunMatrix.jacobian(fs, [BasicDeriv(p) for p in ps]))
    if w.index > det.horizon:
        raise HorizonExhausted(f"witness index {w.index} beyond recomputed horizon {det.horizon}")
    return det[w.index] == w.value
