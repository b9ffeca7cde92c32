"""Exact arithmetic in the truncated Dirichlet convolution ring, with
algebraic-independence certificates for arithmetic functions."""

from .arithfun import ArithFun, builtin, conv, conv_inverse, conv_power, eps, scale
from .coeff import Coefficient, L, coeff_eval_numeric, coeff_is_zero, format_scalar
from .dsl import eval_expr, parse, pretty
from .errors import ArithError
from .independence import (
    Certificate,
    FunMatrix,
    Verdict,
    certify_jacobian,
    certify_orders,
    certify_support,
    certify_value_tests,
    conv_det,
    dependence_oracle,
    nonzero_witness,
    rank_ff,
    wronskian_li,
)
from .rearick import exp0, log1

__version__ = "0.1.0"

__all__ = [
    "ArithFun",
    "builtin",
    "conv",
    "conv_inverse",
    "conv_power",
    "eps",
    "scale",
    "Coefficient",
    "L",
    "coeff_eval_numeric",
    "coeff_is_zero",
    "format_scalar",
    "eval_expr",
    "parse",
    "pretty",
    "ArithError",
    "Certificate",
    "FunMatrix",
    "Verdict",
    "certify_jacobian",
    "certify_orders",
    "certify_support",
    "certify_value_tests",
    "conv_det",
    "dependence_oracle",
    "nonzero_witness",
    "rank_ff",
    "wronskian_li",
    "exp0",
    "log1",
]
