"""Check semantics and the deterministic JSON format."""
import json
import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infogeo.cli import main
from infogeo.report import ASSERT, CHECK_FIELDS, CONTROL, REPORT, CheckReport, check, dumps


def test_check_kinds():
    assert check("a", "g", 1e-10, 1e-9, 1).passed
    assert not check("a", "g", 1e-8, 1e-9, 1).passed
    assert check("c", "g", 0.5, 1e-3, 1, CONTROL).passed
    assert not check("c", "g", 1e-4, 1e-3, 1, CONTROL).passed
    assert check("r", "g", 1e9, None, 1, REPORT).passed
    assert not check("a", "g", math.nan, 1.0, 1).passed


def test_scaling_loosens_asserts_and_floors():
    a = check("a", "g", 2e-9, 1e-9, 1).scaled(10.0)
    c = check("c", "g", 5e-4, 1e-3, 1, CONTROL).scaled(10.0)
    r = check("r", "g", 1.0, None, 1, REPORT).scaled(10.0)
    assert a.passed and a.tolerance == pytest.approx(1e-8)
    assert c.passed and c.tolerance == pytest.approx(1e-4)
    assert r.tolerance is None


def test_report_json_field_order_and_floats():
    rep = CheckReport("demo", [check("x", "flat2", 0.1, 1e-9, 3, ASSERT, witness=1.0)], {"seed": 0, "runtime_ms": None})
    text = rep.to_json()
    data = json.loads(text)
    assert list(data) == ["suite", "checks", "meta"]
    assert tuple(data["checks"][0]) == CHECK_FIELDS
    assert data["checks"][0]["residual"] == 0.1
    assert '"residual": 0.10000000000000001' in text
    assert '"witness": 1.0' in text
    assert data["meta"]["runtime_ms"] is None
    assert rep.residual == 0.1 and not rep.passed and rep.failures()[0].name == "x"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip(x):
    assert json.loads(dumps({"v": x}))["v"] == x


def test_non_finite_values_are_strings():
    assert json.loads(dumps([math.nan, math.inf, -math.inf])) == ["nan", "inf", "-inf"]
    with pytest.raises(TypeError):
        dumps({"v": object()})


def test_cli_report_matches_schema(capsys):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((Path(__file__).resolve().parents[1] / "docs" / "report_schema.json").read_text())
    main(["check", "--suite", "kahler", "--geometry", "nonkahler4", "--points", "3", "--json", "-"])
    jsonschema.validate(json.loads(capsys.readouterr().out), schema)
