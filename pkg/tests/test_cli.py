import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from arithring.cli import parse_operator, parse_range, run, split_top_level
from arithring.errors import ArithError
from arithring.operators import BasicDeriv, CompositeDk, LogDeriv, NormalizedDkHat, PointwiseMul

CERT_SCHEMA = json.loads(resources.files("arithring").joinpath("schemas/certificate.schema.json").read_text())


def cli(*argv):
    return run(list(argv))


def test_eval_table():
    code, out, _ = cli("eval", "Log(one)", "1..9")
    assert code == 0
    exact = [line.split()[1] for line in out.splitlines() if not line.startswith("#")]
    assert exact == ["0", "1", "1", "1/2", "1", "0", "1", "1/3", "1/2"]


def test_eval_json_and_csv():
    code, out, _ = cli("eval", "one*one", "6", "--output", "json")
    assert code == 0 and json.loads(out)["values"] == ["4"]
    code, out, _ = cli("eval", "eps", "1..3", "--output", "csv")
    assert [row.split(",")[1] for row in out.splitlines()[1:]] == ["1", "0", "0"]


def test_certify_examples_and_exit_codes():
    code, out, _ = cli("certify", "jacobian", "--fns", "tau_star,ind_prime", "--derivs", "dp2,dp3", "--horizon", "64")
    cert = json.loads(out)
    assert code == 0 and cert["witness"] == {"index": 4, "value": "2"}
    jsonschema.validate(cert, CERT_SCHEMA)

    code, out, _ = cli("certify", "orders", "--fns", "e(2),e(6)", "--horizon", "64")
    assert code == 0 and json.loads(out)["verdict"] == "IndependentCertified"

    code, out, _ = cli("certify", "jacobian", "--fns", "ind_p(2),ind_p(2)^2", "--derivs", "dp2,dp3", "--horizon", "64")
    assert code == 2 and json.loads(out)["verdict"] == "Inconclusive"
    jsonschema.validate(json.loads(out), CERT_SCHEMA)


def test_oracle_exit_code():
    code, out, _ = cli("oracle", "--fns", "ind_p(2),ind_p(2)^2", "--degree", "2", "--horizon", "64")
    cert = json.loads(out)
    assert code == 3 and cert["witness"]["relation"] == "x^2 - y"
    jsonschema.validate(cert, CERT_SCHEMA)


@pytest.mark.parametrize(
    "spec",
    [
        {"method": "value", "fns": ["ind_p(2)", "ind_p(3)", "one"], "primes": [2, 3, 5], "mode": "at_primes"},
        {"method": "support", "fns": ["e(2)", "e(3)", "ind_prime"], "primes": [2, 3, 5], "mode": "triangular"},
        {"method": "support", "fns": ["one"], "gs": ["e(2)", "e(3)"], "mode": "escape"},
        {"method": "wronskian", "fns": ["one", "Omega", "pw(Omega, 2)"], "op": "dp2"},
        {"method": "orders", "fns": ["e(2)", "e(4)"]},
    ],
)
def test_certify_spec_outputs_validate(spec):
    code, out, _ = cli("certify", "--spec", json.dumps(spec), "--horizon", "64")
    cert = json.loads(out)
    jsonschema.validate(cert, CERT_SCHEMA)
    assert code == {"IndependentCertified": 0, "Inconclusive": 2, "DependentRelationFound": 3}[cert["verdict"]]


def test_errors_exit_one():
    code, _, err = cli("eval", "e(2")
    assert code == 1 and "^" in err
    code, _, err = cli("certify", "jacobian", "--fns", "one", "--derivs", "dhat4")
    assert code == 1
    code, _, _ = cli("eval", "one", "--horizon", "0")
    assert code != 0


def test_paper_examples():
    code, out, _ = cli("paper-examples")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) >= 10 and all(l.startswith("PASS") for l in lines)


def test_paper_examples_deterministic():
    assert cli("paper-examples", "--properties", "5", "--seed", "3") == cli("paper-examples", "--properties", "5", "--seed", "3")


def test_dirichlet():
    code, out, _ = cli("dirichlet", "one", "--s", "2", "0", "--terms", "10000")
    assert code == 0 and "1.6448340718" in out and "no convergence claim" in out
    code, out, _ = cli("dirichlet", "e(2)", "--s", "1", "0", "--terms", "10")
    assert "0.5" in out


def test_helpers():
    assert split_top_level("e(2),pw(Omega, 2),one") == ["e(2)", "pw(Omega, 2)", "one"]
    assert parse_operator("dL") == LogDeriv()
    assert parse_operator("dp3") == BasicDeriv(3)
    assert parse_operator("dk4") == CompositeDk(4)
    assert parse_operator("dhat4") == NormalizedDkHat(4)
    assert isinstance(parse_operator("mg:Omega:2", 64), PointwiseMul)
    with pytest.raises(ArithError):
        parse_operator("dq2")
    assert parse_range("3..5", 64) == (3, 5)
    assert parse_range(None, 64) == (1, 20)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "arithring", "eval", "kappa", "8", "--output", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[1].startswith("8,1/3")
