import json
from importlib import resources

import jsonschema
import pytest
from hypothesis import given, settings

from arithring.independence import (
    certify_jacobian,
    certify_orders,
    certify_support,
    certify_value_tests,
    dependence_oracle,
    wronskian_li,
)
from arithring.operators import BasicDeriv
from helpers import random_fun, rng_for, seeds


def _schema(name):
    return json.loads(resources.files("arithring").joinpath(f"schemas/{name}.schema.json").read_text())


CERT = _schema("certificate")
FUNC = _schema("function")
CERT_VALIDATOR = jsonschema.Draft202012Validator(CERT)


def test_schemas_are_valid():
    jsonschema.Draft202012Validator.check_schema(CERT)
    jsonschema.Draft202012Validator.check_schema(FUNC)


def test_function_documents():
    f = random_fun(rng_for(0), 32, logs=True)
    jsonschema.validate(f.to_dict(), FUNC)
    jsonschema.validate({"expr": "Log(one)", "horizon": 16}, FUNC)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"values": [1, 2]}, FUNC)


def test_certificate_rejects_bad_documents():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"verdict": "Maybe", "method": "x", "witness": None, "horizon": 1, "caveats": []}, CERT)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(
            {"verdict": "IndependentCertified", "method": "x", "witness": None, "horizon": 1, "caveats": []}, CERT
        )


@settings(max_examples=200, derandomize=True, deadline=None)
@given(seeds)
def test_all_certificates_validate(seed):
    rng = rng_for(seed)
    n = 64
    fs = [random_fun(rng, n, density=0.3, order=rng.randint(1, 6)) for _ in range(2)]
    certs = [
        certify_jacobian(fs, [BasicDeriv(2), BasicDeriv(3)]),
        certify_value_tests(fs, [2, 3]),
        certify_orders(fs),
        certify_support(fs, "triangular", primes=[2, 3]),
        wronskian_li(fs, BasicDeriv(2)),
        dependence_oracle(fs, 1).certificate,
    ]
    for cert in certs:
        doc = json.loads(cert.to_json())
        CERT_VALIDATOR.validate(doc)
