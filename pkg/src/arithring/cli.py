"""Command-line interface: ``arithring {eval,certify,oracle,paper-examples,dirichlet}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys
from fractions import Fraction

import mpmath

from . import coeff as _c
from .arithfun import DEFAULT_HORIZON, ArithFun, check_horizon, conv
from .dsl import eval_expr, parse
from .errors import ArithError, DSLSyntaxError, EvalError, InvalidParams
from .independence import (
    DEFAULT_ORACLE_CAP,
    Verdict,
    certificate_summary,
    certify_jacobian,
    certify_orders,
    certify_support,
    certify_value_tests,
    dependence_oracle,
    wronskian_li,
)
from .operators import (
    IDENTITY,
    BasicDeriv,
    CompositeDk,
    LogDeriv,
    NormalizedDkHat,
    PointwiseMul,
    Shift,
)
from .rearick import exp0, log1

EXIT_CODES = {Verdict.INDEPENDENT: 0, Verdict.INCONCLUSIVE: 2, Verdict.DEPENDENT: 3}
EXIT_ERROR = 1


# -- argument helpers -------------------------------------------------------------


def split_top_level(text, sep=","):
    """Split on ``sep`` outside parentheses and braces."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or parts:
        parts.append(tail)
    return [p for p in parts if p]


_OP_RE = re.compile(r"(dL|id|dp|dk|dhat|T)(-?\d*)\Z")


def parse_operator(label, horizon=DEFAULT_HORIZON):
    """dL, id, dp<p>, dk<k>, dhat<k>, T<k>, or mg:<expr>[:<i>]."""
    label = label.strip()
    if label.startswith("mg:"):
        body = label[3:]
        expr, _, power = body.rpartition(":")
        if not expr or not re.fullmatch(r"-?\d+", power):
            expr, power = body, "1"
        return PointwiseMul(eval_expr(expr, horizon), int(power))
    m = _OP_RE.match(label)
    if not m:
        raise InvalidParams(f"unknown operator {label!r}; use dL, dp<p>, dk<k>, dhat<k>, T<k> or mg:<expr>[:i]")
    kind, num = m.groups()
    if kind in ("dL", "id"):
        if num:
            raise InvalidParams(f"{kind} takes no number")
        return LogDeriv() if kind == "dL" else IDENTITY
    if not num:
        raise InvalidParams(f"{kind} needs a number, e.g. {kind}2")
    n = int(num)
    return {"dp": BasicDeriv, "dk": CompositeDk, "dhat": NormalizedDkHat, "T": Shift}[kind](n)


def parse_range(text, horizon):
    if text is None:
        return 1, min(horizon, 20)
    m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if not m:
        raise ValueError(f"range must look like 6 or 1..9, got {text!r}")
    a = int(m.group(1))
    b = int(m.group(2)) if m.group(2) else a
    if a < 1 or b < a:
        raise ValueError(f"empty or invalid range {text!r}")
    return a, b


def _int_list(text):
    return [int(x) for x in split_top_level(text)] if text else None


def _load_function(item, horizon):
    if isinstance(item, str):
        return eval_expr(item, horizon)
    if isinstance(item, dict) and "expr" in item:
        return eval_expr(item["expr"], item.get("horizon", horizon))
    if isinstance(item, dict) and "values" in item:
        return ArithFun.from_dict(item)
    raise ValueError(f"cannot read a function from {item!r}")


def _load_spec(text):
    """A JSON object given inline or as a path to a file."""
    text = text.strip()
    if not text.startswith("{"):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def _numeric(v, precision):
    if _c.is_rational(v):
        return mpmath.nstr(mpmath.mpf(_c.as_rational(v).numerator) / _c.as_rational(v).denominator, precision)
    return mpmath.nstr(_c.coeff_eval_numeric(v, precision + 2).value, precision)


# -- commands -------------------------------------------------------------------------


def cmd_eval(args, out):
    f = eval_expr(parse(args.expr), args.horizon)
    a, b = parse_range(args.range, f.horizon)
    if b > f.horizon:
        raise ArithError(f"range end {b} exceeds the effective horizon {f.horizon}")
    rows = [(n, _c.format_scalar(f[n]), _numeric(f[n], args.precision)) for n in range(a, b + 1)]
    fmt = args.output or "table"
    if fmt == "json":
        out.write(
            json.dumps(
                {
                    "expr": args.expr,
                    "horizon": f.horizon,
                    "start": a,
                    "values": [r[1] for r in rows],
                },
                indent=2,
            )
            + "\n"
        )
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["index", "value", "numeric"])
        w.writerows(rows)
    else:
        out.write(f"# {args.expr}  (effective horizon {f.horizon})\n")
        width = max(len(r[1]) for r in rows)
        for n, exact, num in rows:
            out.write(f"{n:>6}  {exact:<{width}}  {num}\n")
    return 0


def _certify_from(spec, horizon):
    method = spec["method"]
    horizon = spec.get("horizon", horizon)
    fs = [_load_function(x, horizon) for x in spec.get("fns", [])]
    if method == "jacobian":
        ops = [parse_operator(d, horizon) for d in spec["derivs"]]
        return certify_jacobian(fs, ops)
    if method in ("value", "value_tests"):
        return certify_value_tests(
            fs, spec["primes"], spec.get("mode", "at_primes"), m=spec.get("m", 1), anchors=spec.get("anchors")
        )
    if method == "orders":
        return certify_orders(fs)
    if method == "support":
        mode = spec.get("mode", "triangular")
        gs = [_load_function(x, horizon) for x in spec.get("gs", [])]
        return certify_support(fs, mode, primes=spec.get("primes"), gs=gs)
    if method == "wronskian":
        return wronskian_li(fs, parse_operator(spec.get("op", "dL"), horizon))
    raise ValueError(f"unknown certificate method {method!r}")


def _spec_from_args(args):
    if args.spec:
        spec = _load_spec(args.spec)
        if args.method:
            spec.setdefault("method", args.method)
        return spec
    if not args.method:
        raise ValueError("certify needs a method or --spec")
    spec = {"method": args.method, "fns": split_top_level(args.fns or "")}
    if args.derivs:
        spec["derivs"] = split_top_level(args.derivs)
    if args.primes:
        spec["primes"] = _int_list(args.primes)
    if args.mode:
        spec["mode"] = args.mode
    if args.m is not None:
        spec["m"] = args.m
    if args.anchors:
        spec["anchors"] = _int_list(args.anchors)
    if args.gs:
        spec["gs"] = split_top_level(args.gs)
    if args.op:
        spec["op"] = args.op
    return spec


def _emit_certificate(cert, args, out):
    if (args.output or "json") == "table":
        out.write(certificate_summary(cert) + "\n")
        for c in cert.caveats:
            out.write(f"  caveat: {c}\n")
    else:
        out.write(cert.to_json(indent=2) + "\n")
    return EXIT_CODES[cert.verdict]


def cmd_certify(args, out):
    cert = _certify_from(_spec_from_args(args), args.horizon)
    return _emit_certificate(cert, args, out)


def cmd_oracle(args, out):
    fs = [eval_expr(x, args.horizon) for x in split_top_level(args.fns)]
    res = dependence_oracle(fs, args.degree, cap=args.cap)
    return _emit_certificate(res.certificate, args, out)


def property_demo(seed, count, horizon=128):
    """Seeded spot checks: Exp/Log inverse pair and the Leibniz rule for d_p."""
    rng = random.Random(seed)
    failures = 0
    for _ in range(count):
        vals = [0] + [rng.choice((0, 0, 0, 1, -1, 2, Fraction(1, 2))) for _ in range(horizon - 1)]
        f = ArithFun(vals)
        g = ArithFun([1] + [rng.randint(-3, 3) for _ in range(horizon - 1)])
        p = rng.choice([2, 3, 5])
        d = BasicDeriv(p)
        ok = log1(exp0(f)) == f and exp0(log1(g)) == g
        ok = ok and d.apply(conv(f, g)) == conv(d.apply(f), g) + conv(f, d.apply(g))
        failures += not ok
    return failures


def cmd_paper_examples(args, out):
    from .paper_examples import run_all

    results = run_all()
    fmt = args.output or "table"
    failed = sum(not r.passed for r in results)
    if args.properties:
        bad = property_demo(args.seed, args.properties)
        from .paper_examples import ExampleResult

        results.append(
            ExampleResult(
                f"{args.properties} seeded property checks (seed {args.seed})", "0 failures", f"{bad} failures", bad == 0
            )
        )
        failed += bad > 0
    if fmt == "json":
        out.write(json.dumps([r.__dict__ for r in results], indent=2) + "\n")
    else:
        for r in results:
            out.write(r.line() + "\n")
        out.write(f"{len(results) - failed}/{len(results)} passed\n")
    return 0 if failed == 0 else EXIT_ERROR


def cmd_dirichlet(args, out):
    horizon = args.horizon
    if args.terms and not args.horizon_given:
        horizon = args.terms
    f = eval_expr(parse(args.expr), horizon)
    terms = args.terms or f.horizon
    if terms > f.horizon:
        raise ArithError(f"--terms {terms} exceeds the effective horizon {f.horizon}")
    with mpmath.workdps(args.precision + 5):
        s = mpmath.mpc(args.s[0], args.s[1])
        alpha = mpmath.mpc(args.alpha[0], args.alpha[1]) if args.alpha else None
        total = mpmath.mpc(0)
        for n in range(1, terms + 1):
            v = f[n]
            if not v:
                continue
            num = mpmath.mpf(_c.as_rational(v).numerator) / _c.as_rational(v).denominator if _c.is_rational(v) else (
                _c.coeff_eval_numeric(v, args.precision + 5).value
            )
            if alpha is not None:
                num = num * mpmath.power(n, alpha)
            total += num * mpmath.power(n, -s)
        label = "partial sum, no convergence claim"
        re_s, im_s = mpmath.nstr(total.real, args.precision), mpmath.nstr(total.imag, args.precision)
    if (args.output or "table") == "json":
        out.write(
            json.dumps(
                {"expr": args.expr, "s": list(args.s), "terms": terms, "real": re_s, "imag": im_s, "label": label},
                indent=2,
            )
            + "\n"
        )
    else:
        what = f"sum_(n<={terms}) f(n) n^-s"
        if alpha is not None:
            what = f"sum_(n<={terms}) n^alpha f(n) n^-s"
        sign = "-" if im_s.startswith("-") else "+"
        s_text = f"{args.s[0]} {'-' if args.s[1] < 0 else '+'} {abs(args.s[1])}i"
        out.write(f"{what} at s = {s_text}: {re_s} {sign} {im_s.lstrip('-')}i  ({label})\n")
    return 0


# -- parser -----------------------------------------------------------------------------


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the generic error code 1, not argparse's 2 (2 means Inconclusive)."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _common(parser, defaults):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--horizon", type=_positive_int, default=d(None), help=f"truncation horizon N (default {DEFAULT_HORIZON})")
    parser.add_argument("--output", choices=["table", "json", "csv"], default=d(None))
    parser.add_argument("--precision", type=_positive_int, default=d(12), help="digits for numeric columns")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for randomized demos")


def build_parser():
    parser = _ArgumentParser(prog="arithring", description="Exact arithmetic functions and independence certificates.")
    _common(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression")
    _common(p, False)
    p.add_argument("expr")
    p.add_argument("range", nargs="?", help="index or a..b (default 1..20)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("certify", help="run an independence certificate")
    _common(p, False)
    p.add_argument("method", nargs="?", choices=["jacobian", "value", "orders", "support", "wronskian"])
    p.add_argument("--fns", help="comma-separated expressions")
    p.add_argument("--derivs", help="comma-separated operators (dL, dp2, dk4, dhat4, T1, mg:<expr>[:i])")
    p.add_argument("--primes")
    p.add_argument("--mode", help="at_primes|gvj|order_anchored or triangular|escape")
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--anchors")
    p.add_argument("--gs", help="functions for support escape mode")
    p.add_argument("--op", help="operator for the Wronskian (default dL)")
    p.add_argument("--spec", help="JSON object or path to a JSON file")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="brute-force polynomial relation search")
    _common(p, False)
    p.add_argument("--fns", required=True)
    p.add_argument("--degree", type=_positive_int, default=2)
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_ORACLE_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("paper-examples", help="reproduce the worked examples")
    _common(p, False)
    p.add_argument("--properties", type=int, default=0, help="also run this many seeded property checks")
    p.set_defaults(func=cmd_paper_examples)

    p = sub.add_parser("dirichlet", help="numeric Dirichlet partial sum")
    _common(p, False)
    p.add_argument("expr")
    p.add_argument("--s", nargs=2, type=float, required=True, metavar=("RE", "IM"))
    p.add_argument("--terms", type=_positive_int)
    p.add_argument("--alpha", nargs=2, type=float, metavar=("RE", "IM"), help="weight n^alpha (numeric only)")
    p.set_defaults(func=cmd_dirichlet)
    return parser


def _report_syntax(err, text, stream):
    stream.write(f"error: {err}\n")
    if text is not None and 0 <= err.position <= len(text):
        stream.write(f"  {text}\n  {' ' * err.position}^\n")


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(err)
        err.write(f"error: {exc}\n")
        return EXIT_ERROR
    args.horizon_given = args.horizon is not None
    if not args.horizon_given:
        args.horizon = DEFAULT_HORIZON
    try:
        check_horizon(args.horizon)
        return args.func(args, out)
    except DSLSyntaxError as exc:
        _report_syntax(exc, getattr(args, "expr", None), err)
    except EvalError as exc:
        err.write(f"error: {exc}\n")
    except (ArithError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"error: {msg}\n")
    return EXIT_ERROR


def run(argv):
    """Run the CLI and capture (exit code, stdout, stderr); handy in tests."""
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
