"""Expression language for arithmetic functions.

Grammar (``*`` is convolution, ``.`` pointwise product, ``^`` convolution
power; ``*`` and ``.`` share one precedence level and associate left)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | ".") unary)*
    unary := "-" unary | atom ("^" ["-"] int)?
    atom  := coeff | builtin | "(" expr ")" | func "(" args ")"
             | ("addfun" | "mulfun") "{" [int ":" expr ("," int ":" expr)*] "}"
    coeff := int ["/" int] | "L" prime

Functions: Exp, Log, pow(f, g), inv, dL, dp(p, f), dk(k, f), dhat(k, f),
mg(g, i, f), T(k, f), pw(f, k) and recur(P, Q, u1, u2).  A coefficient c
standing alone denotes c*eps.  Subtrees made only of coefficients are folded
while parsing, and ``c * f`` becomes ``Scale(c, f)``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from . import coeff as _c
from .arithfun import (
    BUILTINS,
    ArithFun,
    _norm,
    add,
    builtin,
    check_horizon,
    conv,
    conv_inverse,
    conv_power,
    pointwise_mul,
    scale,
    sub,
)
from .errors import ArithError, DSLSyntaxError, EvalError
from .numtheory import HORIZON_CAP, build_completely_additive, build_completely_multiplicative, is_prime, recurrence_set
from .operators import BasicDeriv, CompositeDk, LogDeriv, NormalizedDkHat, PointwiseMul, Shift
from .rearick import exp0, log1, power_fg


class MixedProductWarning(UserWarning):
    """A chain mixes ``*`` and ``.`` without parentheses."""


# -- AST ------------------------------------------------------------------------


class Expr:
    pass


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Coeff(Expr):
    value: object
    pos: int | None = _pos()


@dataclass(frozen=True)
class Builtin(Expr):
    name: str
    params: tuple = ()
    pos: int | None = _pos()


@dataclass(frozen=True)
class Recur(Expr):
    P: int
    Q: int
    u1: int
    u2: int
    pos: int | None = _pos()


@dataclass(frozen=True)
class Builder(Expr):
    kind: str  # "addfun" or "mulfun"
    items: tuple  # ((prime, scalar), ...)
    pos: int | None = _pos()


@dataclass(frozen=True)
class Conv(Expr):
    left: Expr
    right: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Pointwise(Expr):
    left: Expr
    right: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Neg(Expr):
    expr: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Scale(Expr):
    coeff: object
    expr: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class ConvPow(Expr):
    expr: Expr
    k: int
    pos: int | None = _pos()


@dataclass(frozen=True)
class PwPow(Expr):
    expr: Expr
    k: int
    pos: int | None = _pos()


@dataclass(frozen=True)
class Exp(Expr):
    expr: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Log(Expr):
    expr: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class Inverse(Expr):
    expr: Expr
    pos: int | None = _pos()


@dataclass(frozen=True)
class OpApply(Expr):
    """Operator application; ``op`` is dL, dp, dk, dhat, mg or T."""

    op: str
    params: tuple
    expr: Expr
    pos: int | None = _pos()


# -- tokenizer ----------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_PUNCT = set("+-*.^(),{}:/")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", a punctuation character, or "end"
    text: str
    pos: int


def tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m.group(1) is None and m.group(2) is None and m.group(3) is None:
            break  # trailing whitespace
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(Token("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(Token("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in _PUNCT:
                raise DSLSyntaxError(f"unexpected character {ch!r}", start)
            tokens.append(Token(ch, ch, start))
        i = m.end()
    tokens.append(Token("end", "", n))
    return tokens


# -- parser -------------------------------------------------------------------------

_L_RE = re.compile(r"L([1-9]\d*)\Z")

# name -> list of argument kinds ("i" integer, "e" expression)
FUNCTIONS = {
    "Exp": "e",
    "Log": "e",
    "pow": "ee",
    "inv": "e",
    "dL": "e",
    "dp": "ie",
    "dk": "ie",
    "dhat": "ie",
    "mg": "eie",
    "T": "ie",
    "pw": "ei",
    "recur": "iiii",
}

_ATOM_START = ("int", "name", "(", "-")


def _is_coeff(e):
    return isinstance(e, Coeff)


def _fold(node):
    """Collapse coefficient-only arithmetic; turn c * f into Scale(c, f)."""
    if isinstance(node, (Conv, Pointwise, Add, Sub)):
        l, r = node.left, node.right
        if _is_coeff(l) and _is_coeff(r):
            a, b = l.value, r.value
            if isinstance(node, Add):
                v = a + b
            elif isinstance(node, Sub):
                v = a - b
            else:
                v = a * b
            return Coeff(_norm(v), node.pos)
        if isinstance(node, Conv):
            if _is_coeff(l):
                return Scale(l.value, r, node.pos)
            if _is_coeff(r):
                return Scale(r.value, l, node.pos)
        return node
    if isinstance(node, Neg) and _is_coeff(node.expr):
        return Coeff(_norm(-node.expr.value), node.pos)
    if isinstance(node, ConvPow) and _is_coeff(node.expr):
        c, k = node.expr.value, node.k
        if k > 0:
            return Coeff(_norm(c**k), node.pos)
        if k == 0 and c:
            return Coeff(1, node.pos)
        if k < 0 and c and _c.is_rational(c):
            return Coeff(_norm(_c.inverse(c) ** -k), node.pos)
    return node


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message, expected=(), tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise DSLSyntaxError(f"{message}, found {found}", tok.pos, expected)

    def expect(self, kind):
        if self.tok.kind != kind:
            self.error("unexpected token", (kind,))
        return self.advance()

    def integer(self, signed=True, low=-HORIZON_CAP, high=HORIZON_CAP):
        start = self.tok
        neg = False
        if signed and self.tok.kind == "-":
            self.advance()
            neg = True
        if self.tok.kind != "int":
            self.error("integer expected", ("int",) + (("-",) if signed and not neg else ()))
        t = self.advance()
        v = int(t.text)
        v = -v if neg else v
        if not low <= v <= high:
            raise DSLSyntaxError(f"integer {v} outside [{low}, {high}]", start.pos)
        return v

    # expr := term (("+"|"-") term)*
    def expr(self):
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance()
            right = self.term()
            cls = Add if op.kind == "+" else Sub
            node = _fold(cls(node, right, op.pos))
        return node

    # term := unary (("*"|".") unary)*
    def term(self):
        node = self.unary()
        first = None
        warned = False
        while self.tok.kind in ("*", "."):
            op = self.advance()
            first = first or op.kind
            if op.kind != first and not warned:
                warned = True
                warnings.warn(
                    f"'*' and '.' mixed without parentheses at position {op.pos}; read left to right",
                    MixedProductWarning,
                    stacklevel=4,
                )
            right = self.unary()
            cls = Conv if op.kind == "*" else Pointwise
            node = _fold(cls(node, right, op.pos))
        return node

    # unary := "-" unary | atom ("^" int)?
    def unary(self):
        if self.tok.kind == "-":
            op = self.advance()
            return _fold(Neg(self.unary(), op.pos))
        node = self.atom()
        if self.tok.kind == "^":
            op = self.advance()
            k = self.integer()
            node = _fold(ConvPow(node, k, op.pos))
        return node

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            v = int(t.text)
            if self.tok.kind == "/":
                self.advance()
                if self.tok.kind != "int":
                    self.error("denominator expected", ("int",))
                d = int(self.advance().text)
                if d == 0:
                    raise DSLSyntaxError("zero denominator", self.tokens[self.i - 1].pos)
                return Coeff(_norm(Fraction(v, d)), t.pos)
            return Coeff(v, t.pos)
        if t.kind == "(":
            self.advance()
            node = self.expr()
            if self.tok.kind != ")":
                self.error("unbalanced parenthesis", (")", "+", "-", "*", "."))
            self.advance()
            return node
        if t.kind == "name":
            return self.named()
        self.error("expression expected", _ATOM_START)

    def named(self):
        t = self.advance()
        name = t.text
        m = _L_RE.match(name)
        if m:
            p = int(m.group(1))
            if p > HORIZON_CAP or not is_prime(p):
                raise DSLSyntaxError(f"L{p}: {p} is not a prime", t.pos)
            return Coeff(_c.L(p), t.pos)
        if name in ("addfun", "mulfun"):
            return self.builder(name, t)
        if name in FUNCTIONS:
            return self.function(name, t)
        if name in BUILTINS:
            return self.builtin(name, t)
        raise DSLSyntaxError(
            f"unknown name {name!r}", t.pos, tuple(BUILTINS) + tuple(FUNCTIONS) + ("addfun", "mulfun", "L<prime>")
        )

    def builtin(self, name, t):
        arity = BUILTINS[name][1]
        params = []
        if self.tok.kind == "(":
            self.advance()
            if self.tok.kind != ")":
                params.append(self.integer())
                while self.tok.kind == ",":
                    self.advance()
                    params.append(self.integer())
            self.expect(")")
        if arity is not None and len(params) != arity:
            raise DSLSyntaxError(f"{name} takes {arity} integer parameter(s), got {len(params)}", t.pos)
        return Builtin(name, tuple(params), t.pos)

    def function(self, name, t):
        kinds = FUNCTIONS[name]
        if self.tok.kind != "(":
            self.error(f"{name} needs arguments", ("(",))
        self.advance()
        args, arg_pos = [], []
        for j, kind in enumerate(kinds):
            if j:
                if self.tok.kind != ",":
                    self.error(f"{name} takes {len(kinds)} arguments", (",",))
                self.advance()
            arg_pos.append(self.tok.pos)
            args.append(self.integer() if kind == "i" else self.expr())
        if self.tok.kind != ")":
            self.error(f"{name} takes {len(kinds)} arguments", (")",) if kinds[-1] == "i" else (")", "+", "-", "*", "."))
        self.advance()
        pos = t.pos
        if name == "Exp":
            return Exp(args[0], pos)
        if name == "Log":
            return Log(args[0], pos)
        if name == "pow":
            return Pow(args[0], args[1], pos)
        if name == "inv":
            return Inverse(args[0], pos)
        if name == "pw":
            return PwPow(args[0], args[1], pos)
        if name == "recur":
            P, Q, u1, u2 = args
            if Q == 0:
                raise DSLSyntaxError("recur needs Q != 0", arg_pos[1])
            return Recur(P, Q, u1, u2, pos)
        if name == "dL":
            return OpApply("dL", (), args[0], pos)
        if name == "dp" and not is_prime(args[0]):
            raise DSLSyntaxError(f"dp needs a prime, got {args[0]}", arg_pos[0])
        if name in ("dk", "dhat") and args[0] < 1:
            raise DSLSyntaxError(f"{name} needs k >= 1, got {args[0]}", arg_pos[0])
        if name == "mg":
            return OpApply("mg", (args[0], args[1]), args[2], pos)
        return OpApply(name, (args[0],), args[1], pos)

    def builder(self, name, t):
        self.expect("{")
        items = []
        if self.tok.kind != "}":
            while True:
                ptok = self.tok
                p = self.integer(signed=False, low=2)
                if not is_prime(p):
                    raise DSLSyntaxError(f"{p} is not a prime", ptok.pos)
                self.expect(":")
                vtok = self.tok
                v = self.expr()
                if not _is_coeff(v):
                    raise DSLSyntaxError("builder values must be coefficients", vtok.pos)
                items.append((p, v.value))
                if self.tok.kind != ",":
                    break
                self.advance()
        if self.tok.kind != "}":
            self.error("unterminated builder", ("}", ","))
        self.advance()
        ps = [p for p, _ in items]
        if len(set(ps)) != len(ps):
            raise DSLSyntaxError("repeated prime in builder", t.pos)
        return Builder(name, tuple(sorted(items, key=lambda it: it[0])), t.pos)


def parse(text):
    """Parse ``text`` into an AST; raises DSLSyntaxError with position and expected tokens."""
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "end":
        expected = ["+", "-", "*", ".", "end of input"]
        if isinstance(node, (Builtin, Coeff)) and p.tok.kind == "(":
            expected = ["+", "-", "*", "."]
        p.error("unexpected token", expected)
    return node


def parse_coeff(text):
    """Parse the textual form of a coefficient, e.g. ``5/6 + 2*L2*L3^2``."""
    node = parse(text)
    if not isinstance(node, Coeff):
        raise DSLSyntaxError("not a coefficient literal", 0)
    return node.value


# -- pretty printer -------------------------------------------------------------------

_ATOM, _POW, _UNARY, _TERM, _EXPR = 5, 4, 3, 2, 1


def _coeff_text(c):
    s = _c.format_scalar(c)
    body = s[1:] if s.startswith("-") else s
    if " + " in body or " - " in body:
        return s, _EXPR
    if "*" in s:
        return s, _TERM
    if s.startswith("-"):
        return s, _UNARY
    if "^" in s:
        return s, _POW
    return s, _ATOM


def _wrap(text, level, need):
    return f"({text})" if level < need else text


def _show(e):
    """(text, precedence level) of a node."""
    if isinstance(e, Coeff):
        return _coeff_text(e.value)
    if isinstance(e, Builtin):
        if e.params or BUILTINS[e.name][1]:
            return f"{e.name}({', '.join(map(str, e.params))})", _ATOM
        return e.name, _ATOM
    if isinstance(e, Recur):
        return f"recur({e.P}, {e.Q}, {e.u1}, {e.u2})", _ATOM
    if isinstance(e, Builder):
        inner = ", ".join(f"{p}: {_c.format_scalar(v)}" for p, v in e.items)
        return f"{e.kind}{{{inner}}}", _ATOM
    if isinstance(e, (Add, Sub)):
        sym = "+" if isinstance(e, Add) else "-"
        return f"{_at(e.left, _EXPR)} {sym} {_at(e.right, _TERM)}", _EXPR
    if isinstance(e, (Conv, Pointwise)):
        sym = "*" if isinstance(e, Conv) else " . "
        return f"{_at(e.left, _TERM)}{sym}{_at(e.right, _UNARY)}", _TERM
    if isinstance(e, Scale):
        text, level = _coeff_text(e.coeff)
        return f"{_wrap(text, level, _TERM)}*{_at(e.expr, _UNARY)}", _TERM
    if isinstance(e, Neg):
        return f"-{_at(e.expr, _UNARY)}", _UNARY
    if isinstance(e, ConvPow):
        return f"{_at(e.expr, _ATOM)}^{e.k}", _POW
    if isinstance(e, PwPow):
        return f"pw({pretty(e.expr)}, {e.k})", _ATOM
    if isinstance(e, Exp):
        return f"Exp({pretty(e.expr)})", _ATOM
    if isinstance(e, Log):
        return f"Log({pretty(e.expr)})", _ATOM
    if isinstance(e, Pow):
        return f"pow({pretty(e.base)}, {pretty(e.exponent)})", _ATOM
    if isinstance(e, Inverse):
        return f"inv({pretty(e.expr)})", _ATOM
    if isinstance(e, OpApply):
        if e.op == "dL":
            return f"dL({pretty(e.expr)})", _ATOM
        if e.op == "mg":
            g, i = e.params
            return f"mg({pretty(g)}, {i}, {pretty(e.expr)})", _ATOM
        return f"{e.op}({e.params[0]}, {pretty(e.expr)})", _ATOM
    raise TypeError(f"not an expression node: {e!r}")


def _at(e, need):
    text, level = _show(e)
    return _wrap(text, level, need)


def pretty(e):
    """Source text that parses back to ``e``."""
    return _show(e)[0]


# -- evaluation --------------------------------------------------------------------


def _operator(e, horizon):
    if e.op == "dL":
        return LogDeriv()
    if e.op == "dp":
        return BasicDeriv(e.params[0])
    if e.op == "dk":
        return CompositeDk(e.params[0])
    if e.op == "dhat":
        return NormalizedDkHat(e.params[0])
    if e.op == "T":
        return Shift(e.params[0])
    if e.op == "mg":
        g, i = e.params
        return PointwiseMul(_eval(g, horizon), i)
    raise ValueError(f"unknown operator {e.op!r}")


def _pw_power(f, k):
    one = builtin("one", (), f.horizon)
    return PointwiseMul(f, k).apply(one)


def _eval(e, horizon):
    try:
        return _eval_node(e, horizon)
    except EvalError:
        raise
    except ArithError as exc:
        pos = e.pos if e.pos is not None else 0
        raise EvalError(str(exc), pos, exc) from exc


def _eval_node(e, N):
    if isinstance(e, Coeff):
        return ArithFun.scalar(e.value, N)
    if isinstance(e, Builtin):
        return builtin(e.name, e.params, N)
    if isinstance(e, Recur):
        members = sorted(recurrence_set(e.P, e.Q, e.u1, e.u2, N))
        return builtin("ind_set", members, N)
    if isinstance(e, Builder):
        values = dict(e.items)
        if e.kind == "addfun":
            return build_completely_additive(values, N)
        return build_completely_multiplicative(values, N)
    if isinstance(e, Add):
        return add(_eval(e.left, N), _eval(e.right, N))
    if isinstance(e, Sub):
        return sub(_eval(e.left, N), _eval(e.right, N))
    if isinstance(e, Conv):
        return conv(_eval(e.left, N), _eval(e.right, N))
    if isinstance(e, Pointwise):
        return pointwise_mul(_eval(e.left, N), _eval(e.right, N))
    if isinstance(e, Scale):
        return scale(e.coeff, _eval(e.expr, N))
    if isinstance(e, Neg):
        return -_eval(e.expr, N)
    if isinstance(e, ConvPow):
        return conv_power(_eval(e.expr, N), e.k)
    if isinstance(e, PwPow):
        return _pw_power(_eval(e.expr, N), e.k)
    if isinstance(e, Exp):
        return exp0(_eval(e.expr, N))
    if isinstance(e, Log):
        return log1(_eval(e.expr, N))
    if isinstance(e, Pow):
        return power_fg(_eval(e.base, N), _eval(e.exponent, N))
    if isinstance(e, Inverse):
        return conv_inverse(_eval(e.expr, N))
    if isinstance(e, OpApply):
        f = _eval(e.expr, N)
        return _operator(e, N).apply(f)
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr(e, horizon=1024):
    """Evaluate an AST (or source text) with leaves built at ``horizon``.

    Operators shrink horizons bottom-up; the returned function's horizon is
    the effective one.  Domain errors come back as EvalError with the
    position of the failing node.
    """
    if isinstance(e, str):
        e = parse(e)
    check_horizon(horizon)
    return _eval(e, horizon)


def evaluate(text, horizon=1024):
    return eval_expr(parse(text), horizon)
