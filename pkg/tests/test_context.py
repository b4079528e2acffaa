"""Encoding context traces, awareness verdicts, and effectiveness scores."""

import warnings

import pytest

from tmnet import (
    BLANK,
    WILDCARD,
    ContextTrace,
    ContextVariable,
    EvaluationVector,
    ExternalSink,
    MachineSpec,
    Network,
    check_awareness,
    check_effective,
    encode_trace,
    run_with_trace,
)
from tmnet.context import EncodingConfig, prepare_network
from tmnet.errors import NotASubset, UnboundVector, UnencodableValue
from tmnet.fileio import load_network, load_trace
from tmnet.machine import MOVE_RIGHT, MOVE_STAY, make_rule

from helpers import FIXTURES


def single_machine_trace(spec, evals=((0, "ab"),), vid="v"):
    network = Network(
        machines={spec.id: spec},
        sinks={f"o{p}": ExternalSink(f"o{p}", spec.id, p)
               for p in range(spec.num_outputs)},
    )
    trace = ContextTrace(
        variables={vid: ContextVariable(vid)},
        vectors={vid: EvaluationVector(vid, evals)},
        c_a=(vid,),
        bindings_in={vid: (spec.id, 0)},
    )
    return network, trace


def listener(mid="m", emit=True):
    """One-input machine that consumes everything, optionally emitting."""
    alphabet = frozenset({BLANK, "a", "b", "#"})
    out = ["a"] if emit else [None]
    rules = tuple(
        make_rule("q0", WILDCARD, [sym], "q0", BLANK, MOVE_STAY,
                  [MOVE_RIGHT], out)
        for sym in ("a", "b", "#")
    )
    return MachineSpec(
        id=mid,
        states=frozenset({"q0", "hh"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=1,
        num_outputs=1,
        rules=rules,
        start_state="q0",
        halt_state="hh",
    )


def test_vector_evals_must_be_strictly_increasing():
    """Evaluation times are strictly ordered and values non-empty."""
    with pytest.raises(ValueError, match="strictly increasing"):
        EvaluationVector("v", ((1, "a"), (1, "b")))
    with pytest.raises(ValueError, match="empty value"):
        EvaluationVector("v", ((0, ""),))


def test_encode_trace_appends_delimiter_per_evaluation():
    """Each evaluation becomes its characters plus one delimiter."""
    net, trace = single_machine_trace(listener(), evals=((0, "ab"), (2, "a")))
    schedules = encode_trace(trace, net)
    assert schedules == {
        "v": [(0, "a"), (0, "b"), (0, "#"), (2, "a"), (2, "#")],
    }


def test_encode_trace_requires_binding():
    """Vectors without an input binding cannot be encoded."""
    trace = ContextTrace(
        variables={"v": ContextVariable("v")},
        vectors={"v": EvaluationVector("v", ((0, "a"),))},
        c_a=("v",),
    )
    with pytest.raises(UnboundVector):
        encode_trace(trace)


def test_encode_trace_rejects_unencodable_characters():
    """Characters outside the bound machine's alphabet are reported."""
    net, trace = single_machine_trace(listener(), evals=((0, "az"),))
    with pytest.raises(UnencodableValue):
        encode_trace(trace, net)


def test_prepare_network_adds_sources_and_delimiter():
    """Preparation binds one source per vector and admits the delimiter."""
    alphabet = frozenset({BLANK, "a", "b"})
    spec = MachineSpec(
        id="m",
        states=frozenset({"q0", "hh"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=1,
        num_outputs=1,
        rules=(make_rule("q0", WILDCARD, ["a"], "q0", "a", MOVE_STAY,
                         [MOVE_RIGHT], ["a"]),),
        start_state="q0",
        halt_state="hh",
    )
    net, trace = single_machine_trace(spec, evals=((0, "a"),))
    prepared = prepare_network(net, trace)
    assert "v" in prepared.sources
    assert "#" in prepared.machines["m"].tape_alphabet
    assert "#" not in net.machines["m"].tape_alphabet


def test_awareness_on_map_viewer_fixture():
    """The full active set is consumed and produced: the system is aware."""
    net = load_network(FIXTURES / "map_viewer" / "network.json")
    trace = load_trace(FIXTURES / "map_viewer" / "trace.json")
    result = run_with_trace(net, trace)
    report = check_awareness(net, result, trace)
    assert report.aware and not report.vacuous
    assert {s.status for s in report.statuses.values()} == {"consumed-and-produced"}


def test_awareness_flips_without_location_binding():
    """Injecting everything except (location) leaves it unconsumed."""
    net = load_network(FIXTURES / "map_viewer" / "network.json")
    trace = load_trace(FIXTURES / "map_viewer" / "trace.json")
    result = run_with_trace(net, trace, vectors=["user", "screen", "providers"])
    report = check_awareness(net, result, trace)
    assert not report.aware
    assert report.statuses["location"].status == "unconsumed"
    assert report.statuses["user"].status == "consumed-and-produced"


def test_awareness_consumed_but_silent_machine():
    """A machine that reads everything but emits nothing is not aware."""
    net, trace = single_machine_trace(listener(emit=False))
    result = run_with_trace(net, trace)
    report = check_awareness(net, result, trace)
    assert not report.aware
    assert report.statuses["v"].status == "consumed-no-output"


def test_awareness_empty_active_set_is_vacuous():
    """An empty C_A is vacuously judged not aware."""
    spec = listener()
    net = Network(
        machines={spec.id: spec},
        sinks={"o0": ExternalSink("o0", spec.id, 0)},
    )
    trace = ContextTrace(
        variables={"v": ContextVariable("v")},
        vectors={"v": EvaluationVector("v", ((0, "a"),))},
        c_a=(),
        bindings_in={"v": (spec.id, 0)},
    )
    result = run_with_trace(net, trace)
    report = check_awareness(net, result, trace)
    assert report.vacuous and not report.aware


def test_encoding_config_rejects_blank_delimiter():
    """The delimiter must be a single non-blank symbol."""
    with pytest.raises(ValueError):
        EncodingConfig(delimiter=BLANK)
    with pytest.raises(ValueError):
        EncodingConfig(delimiter="##")


def test_effective_redundancy_fixture_stays_similar():
    """Dropping the backup feed keeps the output above the threshold."""
    net = load_network(FIXTURES / "redundancy" / "network.json")
    trace = load_trace(FIXTURES / "redundancy" / "trace.json")
    report = check_effective(net, trace, subset=["r1"])
    assert report.dropped == ("r2",)
    assert not report.degenerate
    assert report.aggregate >= report.threshold
    assert report.similar


def test_effective_dropping_primary_is_dissimilar():
    """Dropping the primary feed starves the output stream."""
    net = load_network(FIXTURES / "redundancy" / "network.json")
    trace = load_trace(FIXTURES / "redundancy" / "trace.json")
    report = check_effective(net, trace, subset=["r2"])
    assert not report.similar


def test_effective_degenerate_subset_scores_one():
    """Passing the full active set is flagged and scores exactly 1.0."""
    net = load_network(FIXTURES / "redundancy" / "network.json")
    trace = load_trace(FIXTURES / "redundancy" / "trace.json")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = check_effective(net, trace, subset=["r1", "r2"])
    assert report.degenerate
    assert report.aggregate == 1.0
    assert any("trivially" in str(w.message) for w in caught)


def test_effective_rejects_foreign_subset():
    """Subset vectors must come from the active set."""
    net = load_network(FIXTURES / "redundancy" / "network.json")
    trace = load_trace(FIXTURES / "redundancy" / "trace.json")
    with pytest.raises(NotASubset):
        check_effective(net, trace, subset=["r1", "zz"])
