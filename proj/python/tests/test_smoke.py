import json
import os
from pathlib import Path

import pytest

import cpnkit

DATA = Path(os.environ.get("CPNKIT_TEST_DATA", Path(__file__).resolve().parents[2] / "tests" / "data"))


@pytest.fixture
def doubler():
    return cpnkit.load(DATA / "doubler.json")


def test_doubler_fire_and_advance(doubler):
    assert doubler.is_enabled("T")
    record = doubler.fire("T")
    assert record["binding"] == {"x": 1}
    assert doubler.marking() == {
        "P_In": [{"value": -1, "timestamp": 0}],
        "P_Out": [{"value": 2, "timestamp": 3}],
    }
    assert doubler.clock == 0
    assert doubler.advance() == 3
    assert not doubler.is_enabled("T")


def test_fire_disabled_raises_not_enabled(doubler):
    doubler.fire("T")
    with pytest.raises(cpnkit.CpnError) as info:
        doubler.fire("T")
    assert info.value.code == "NotEnabled"


def test_import_error_carries_path():
    doc = json.loads((DATA / "doubler.json").read_text())
    doc["transitions"][0]["guard"] = "x >"
    with pytest.raises(cpnkit.CpnError) as info:
        cpnkit.Model(doc)
    assert info.value.code == "SyntaxError"
    assert info.value.path == "transitions[0].guard"


def test_export_is_fixpoint(doubler):
    once = doubler.export()
    assert cpnkit.Model(once).export() == once


def test_analyze_cycle():
    report = cpnkit.load(DATA / "cycle.json").analyze()
    assert report["num_states"] == 2
    assert report["live_transitions"] == ["t1", "t2"]
    assert report["dead_markings"] == []


def test_simulation_is_deterministic():
    model = cpnkit.load(DATA / "doubler_loop.json")
    a = model.event_log([3, 4], max_steps=5)
    assert a == model.event_log([3, 4], max_steps=5)
    assert a.splitlines()[0] == "case_id,activity,timestamp,binding"
    assert model.replay_matches(3, max_steps=5)


def test_expressions():
    assert cpnkit.canonical_expression("(1+2)*3") == "(1 + 2) * 3"
    assert cpnkit.evaluate_expression("double(x) + 1", {"x": 4}, "fun double(n) = n * 2;") == 9


def test_xml_round_trip(doubler):
    xml = cpnkit.export_cpn_xml_stub(doubler.export())
    doc, issues = cpnkit.import_cpn_xml(xml)
    assert issues == []
    assert len(doc["places"]) == 2 and len(doc["transitions"]) == 1 and len(doc["arcs"]) == 2


def test_service_round_trip():
    service = cpnkit.Service()
    status, body = service.handle("POST", "/sessions", body=(DATA / "doubler.json").read_text())
    assert status == 201
    sid = json.loads(body)["sessionId"]
    status, body = service.handle("POST", f"/sessions/{sid}/fire", body='{"transition": "T"}')
    assert status == 200
    status, _ = service.handle("POST", f"/sessions/{sid}/fire", body='{"transition": "T"}')
    assert status == 409
    assert service.session_count() == 1
