"""Save/load round trips for machines, networks, traces, logs, mappings."""

import json

import pytest

from tmnet.context import ContextTrace, ContextVariable, EvaluationVector
from tmnet.fileio import (
    load_log,
    load_machine,
    load_mapping,
    load_network,
    load_trace,
    machine_from_dict,
    machine_to_dict,
    network_from_dict,
    network_to_dict,
    save_log,
    save_machine,
    save_network,
    save_trace,
    trace_from_dict,
    trace_to_dict,
)
from tmnet.machine import MachineSpec, make_rule
from tmnet.network import ExternalSink, ExternalSource, Network
from tmnet.scheduler import run

from helpers import FIXTURES, echo_consumer, producer_consumer_network, two_step_producer


def test_machine_file_round_trip(tmp_path):
    """Saving and loading a machine reproduces an equal spec."""
    spec = echo_consumer("echo", ("a", "b"), halt_on="b")
    path = tmp_path / "echo.json"
    save_machine(spec, path)
    assert load_machine(path) == spec


def test_single_work_tape_fields_stay_scalar():
    """One-work-tape machines serialize work/write/move as scalars."""
    obj = machine_to_dict(two_step_producer("p", ("a", "b")))
    assert "num_work_tapes" not in obj
    rule = obj["rules"][0]
    assert isinstance(rule["work"], str)
    assert isinstance(rule["write"], str)
    assert isinstance(rule["move"], str)
    assert machine_from_dict(obj) == two_step_producer("p", ("a", "b"))


def test_multi_work_tape_fields_become_arrays(tmp_path):
    """Machines with several work tapes use per-tape arrays."""
    alphabet = frozenset({"_", "a"})
    spec = MachineSpec(
        id="wide",
        states=frozenset({"q0", "hh"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=0,
        num_outputs=0,
        rules=(make_rule("q0", ("*", "_"), (), "hh", ("a", "a"), ("R", "S"), (), ()),),
        start_state="q0",
        halt_state="hh",
        num_work_tapes=2,
    )
    obj = machine_to_dict(spec)
    assert obj["num_work_tapes"] == 2
    assert obj["rules"][0]["work"] == ["*", "_"]
    assert obj["rules"][0]["move"] == ["R", "S"]
    path = tmp_path / "wide.json"
    save_machine(spec, path)
    assert load_machine(path) == spec


def test_network_file_round_trip_inlines_machines(tmp_path):
    """save_network inlines machines; the reload compares equal."""
    network = producer_consumer_network()
    path = tmp_path / "net.json"
    save_network(network, path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    assert all(isinstance(entry, dict) for entry in obj["machines"])
    assert load_network(path) == network


def test_network_machines_by_relative_path(tmp_path):
    """Machine path entries resolve relative to the network file."""
    producer = two_step_producer()
    consumer = echo_consumer(halt_on="b")
    (tmp_path / "machines").mkdir()
    save_machine(producer, tmp_path / "machines" / "p.json")
    save_machine(consumer, tmp_path / "machines" / "c.json")
    net_obj = {
        "machines": ["machines/p.json", "machines/c.json"],
        "connections": [{"from": "producer.0", "to": "consumer.0"}],
        "sinks": [{"id": "out", "from": "consumer.0"}],
    }
    (tmp_path / "net.json").write_text(json.dumps(net_obj), encoding="utf-8")
    network = load_network(tmp_path / "net.json")
    assert network.machines["producer"] == producer
    assert network.machines["consumer"] == consumer
    assert network == producer_consumer_network()


def test_network_accepts_inline_and_path_mix(tmp_path):
    """A machines list may mix inline objects with path strings."""
    save_machine(two_step_producer(), tmp_path / "p.json")
    net_obj = {
        "machines": ["p.json", machine_to_dict(echo_consumer(halt_on="b"))],
        "connections": [{"from": "producer.0", "to": "consumer.0"}],
        "sinks": [{"id": "out", "from": "consumer.0"}],
    }
    (tmp_path / "net.json").write_text(json.dumps(net_obj), encoding="utf-8")
    assert load_network(tmp_path / "net.json") == producer_consumer_network()


def test_network_rejects_duplicate_machine_ids():
    """The same machine id twice in one file is an error."""
    spec = machine_to_dict(two_step_producer("p", ("a",)))
    with pytest.raises(ValueError, match="appears twice"):
        network_from_dict({"machines": [spec, spec]})


def test_network_source_schedules_round_trip():
    """Source schedules survive the dict round trip."""
    consumer = echo_consumer("c", ("a", "b"), halt_on="b")
    network = Network(
        machines={"c": consumer},
        sources={"env": ExternalSource("env", "c", 0, ((0, "a"), (2, "b")))},
        sinks={"out": ExternalSink("out", "c", 0)},
    )
    obj = network_to_dict(network)
    assert obj["sources"] == [
        {"id": "env", "to": "c.0", "schedule": [[0, "a"], [2, "b"]]},
    ]
    assert network_from_dict(obj) == network


def test_trace_file_round_trip(tmp_path):
    """Saving and loading a context trace reproduces an equal trace."""
    trace = ContextTrace(
        variables={
            "u": ContextVariable("u", "operator"),
            "v": ContextVariable("v"),
        },
        vectors={
            "u": EvaluationVector("u", ((0, "a"), (2, "b"))),
            "v": EvaluationVector("v", ((1, "c"),)),
        },
        c_a=("u", "v"),
        bindings_in={"u": ("m", 0), "v": ("m", 1)},
        bindings_out={"m.0": "u"},
    )
    path = tmp_path / "trace.json"
    save_trace(trace, path)
    assert load_trace(path) == trace
    obj = trace_to_dict(trace)
    assert obj["variables"][0] == {"id": "u", "description": "operator"}
    assert obj["variables"][1] == {"id": "v"}
    assert trace_from_dict(obj) == trace


def test_bundled_trace_loads():
    """The bundled trace fixture parses into bound vectors."""
    trace = load_trace(FIXTURES / "map_viewer" / "trace.json")
    assert set(trace.c_a) == {"user", "location", "screen", "providers"}
    assert trace.bindings_in["user"] == ("user_detection", 0)
    assert trace.bindings_out["map_display.0"] == "screen"


def test_log_file_round_trip(tmp_path):
    """Saving and loading a run log reproduces an equal log."""
    result = run(producer_consumer_network(), budget=6)
    path = tmp_path / "run.jsonl"
    save_log(result.log, path)
    loaded = load_log(path)
    assert loaded == result.log
    assert loaded.end_reason == result.halt_reason
    save_log(loaded, tmp_path / "again.jsonl")
    assert (tmp_path / "again.jsonl").read_bytes() == path.read_bytes()


def test_log_loader_rejects_foreign_files(tmp_path):
    """Only documents with the log header schema are accepted."""
    path = tmp_path / "junk.jsonl"
    path.write_text('{"hello": 1}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="not a tmnet log header"):
        load_log(path)
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="empty event log"):
        load_log(path)


def test_mapping_loader(tmp_path):
    """Mappings load as label lists; non-objects are rejected."""
    path = tmp_path / "map.json"
    path.write_text('{"coarse": ["f1", "f2"]}', encoding="utf-8")
    assert load_mapping(path) == {"coarse": ["f1", "f2"]}
    path.write_text('[1, 2]', encoding="utf-8")
    with pytest.raises(ValueError, match="must hold one JSON object"):
        load_mapping(path)
