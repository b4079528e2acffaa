#!/usr/bin/env python3
"""Regenerate the JSON fixtures under fixtures/ from their definitions.

The .ctx model documents are maintained by hand; everything else (machine
specs, networks, traces) is produced here so the files always match the
current on-disk schema.  Run from the repository root:

    python scripts/make_fixtures.py
"""

import json
import pathlib

from tmnet.context import ContextTrace, ContextVariable, EvaluationVector
from tmnet.fileio import network_to_dict, save_machine, save_network, save_trace
from tmnet.machine import (
    BLANK,
    MOVE_RIGHT,
    MOVE_STAY,
    WILDCARD,
    MachineSpec,
    make_rule,
)
from tmnet.network import Connection, ExternalSink, ExternalSource, Network, PortRef

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

DELIM = "#"
MAP_SYMBOLS = ("a", "b", "c", "d", DELIM)
MAP_ALPHABET = frozenset((BLANK,) + MAP_SYMBOLS)


def relay(machine_id, symbols, alphabet):
    """One-input machine that forwards every symbol it reads to port 0."""
    rules = tuple(
        make_rule("q0", WILDCARD, [sym], "q0", BLANK, MOVE_STAY,
                  [MOVE_RIGHT], [sym])
        for sym in symbols
    )
    return MachineSpec(
        id=machine_id,
        states=frozenset({"q0", "stop"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=1,
        num_outputs=1,
        rules=rules,
        start_state="q0",
        halt_state="stop",
    )


def merger(machine_id, symbols, alphabet, num_outputs, port_for_tape):
    """Two-input machine that forwards each tape to a fixed output port.

    Tape 0 takes priority when both tapes have unread symbols; tape 1 is
    drained while tape 0 is empty.
    """
    rules = []
    for sym in symbols:
        out0 = [None] * num_outputs
        out0[port_for_tape[0]] = sym
        rules.append(
            make_rule("q0", WILDCARD, [sym, WILDCARD], "q0", BLANK, MOVE_STAY,
                      [MOVE_RIGHT, MOVE_STAY], out0)
        )
        out1 = [None] * num_outputs
        out1[port_for_tape[1]] = sym
        rules.append(
            make_rule("q0", WILDCARD, [BLANK, sym], "q0", BLANK, MOVE_STAY,
                      [MOVE_STAY, MOVE_RIGHT], out1)
        )
    return MachineSpec(
        id=machine_id,
        states=frozenset({"q0", "stop"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=2,
        num_outputs=num_outputs,
        rules=tuple(rules),
        start_state="q0",
        halt_state="stop",
    )


def save_network_with_paths(network, path, machine_paths):
    """Like save_network, but reference machines by relative path."""
    doc = network_to_dict(network)
    doc["machines"] = [machine_paths[mid] for mid in sorted(network.machines)]
    pathlib.Path(path).write_text(json.dumps(doc, indent=2) + "\n",
                                  encoding="utf-8")


def write_map_viewer():
    out = FIXTURES / "map_viewer"
    machines_dir = out / "machines"
    machines_dir.mkdir(parents=True, exist_ok=True)

    specs = [
        relay("soft_serve", MAP_SYMBOLS, MAP_ALPHABET),
        merger("soft_download", MAP_SYMBOLS, MAP_ALPHABET, 2, {0: 1, 1: 0}),
        relay("param_detection", MAP_SYMBOLS, MAP_ALPHABET),
        merger("map_display", MAP_SYMBOLS, MAP_ALPHABET, 1, {0: 0, 1: 0}),
        relay("get_location", MAP_SYMBOLS, MAP_ALPHABET),
        relay("user_detection", MAP_SYMBOLS, MAP_ALPHABET),
        merger("map_request", MAP_SYMBOLS, MAP_ALPHABET, 1, {0: 0, 1: 0}),
        relay("get_map", MAP_SYMBOLS, MAP_ALPHABET),
    ]
    for spec in specs:
        save_machine(spec, machines_dir / f"{spec.id}.json")

    network = Network(
        machines={s.id: s for s in specs},
        connections=(
            Connection(PortRef("soft_serve", 0), PortRef("soft_download", 0)),
            Connection(PortRef("soft_download", 0), PortRef("soft_serve", 0)),
            Connection(PortRef("param_detection", 0), PortRef("soft_download", 1)),
            Connection(PortRef("soft_download", 1), PortRef("map_display", 0)),
            Connection(PortRef("get_map", 0), PortRef("map_display", 1)),
            Connection(PortRef("get_location", 0), PortRef("map_request", 0)),
            Connection(PortRef("user_detection", 0), PortRef("map_request", 1)),
        ),
        sources={
            "screen": ExternalSource("screen", "param_detection", 0),
            "user": ExternalSource("user", "user_detection", 0),
            "location": ExternalSource("location", "get_location", 0),
            "providers": ExternalSource("providers", "get_map", 0),
        },
        sinks={
            "screen": ExternalSink("screen", "map_display", 0),
            "providers": ExternalSink("providers", "map_request", 0),
        },
    )
    save_network_with_paths(
        network, out / "network.json",
        {s.id: f"machines/{s.id}.json" for s in specs},
    )

    trace = ContextTrace(
        variables={
            "user": ContextVariable("user", "user interaction events"),
            "location": ContextVariable("location", "device position readings"),
            "screen": ContextVariable("screen", "display parameters"),
            "providers": ContextVariable("providers", "map content from providers"),
        },
        vectors={
            "user": EvaluationVector("user", ((0, "a"), (3, "b"))),
            "location": EvaluationVector("location", ((0, "c"),)),
            "screen": EvaluationVector("screen", ((0, "d"),)),
            "providers": EvaluationVector("providers", ((1, "ab"),)),
        },
        c_a=("user", "location", "screen", "providers"),
        bindings_in={
            "user": ("user_detection", 0),
            "location": ("get_location", 0),
            "screen": ("param_detection", 0),
            "providers": ("get_map", 0),
        },
        bindings_out={"map_display.0": "screen", "map_request.0": "providers"},
    )
    save_trace(trace, out / "trace.json")


def write_simple():
    out = FIXTURES / "simple"
    out.mkdir(parents=True, exist_ok=True)

    alphabet = frozenset({BLANK, "a", "b"})
    producer = MachineSpec(
        id="producer",
        states=frozenset({"p0", "p1", "done"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=0,
        num_outputs=1,
        rules=(
            make_rule("p0", WILDCARD, [], "p1", "a", MOVE_RIGHT, [], ["a"]),
            make_rule("p1", WILDCARD, [], "done", "b", MOVE_RIGHT, [], ["b"]),
        ),
        start_state="p0",
        halt_state="done",
    )
    consumer = MachineSpec(
        id="consumer",
        states=frozenset({"c0", "done"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=1,
        num_outputs=1,
        rules=(
            make_rule("c0", WILDCARD, ["a"], "c0", "a", MOVE_RIGHT,
                      [MOVE_RIGHT], ["a"]),
            make_rule("c0", WILDCARD, ["b"], "done", "b", MOVE_RIGHT,
                      [MOVE_RIGHT], ["b"]),
        ),
        start_state="c0",
        halt_state="done",
    )
    save_machine(producer, out / "producer.json")
    save_machine(consumer, out / "consumer.json")

    network = Network(
        machines={"producer": producer, "consumer": consumer},
        connections=(
            Connection(PortRef("producer", 0), PortRef("consumer", 0)),
        ),
        sinks={"out": ExternalSink("out", "consumer", 0)},
    )
    save_network_with_paths(
        network, out / "network.json",
        {"producer": "producer.json", "consumer": "consumer.json"},
    )


def write_redundancy():
    out = FIXTURES / "redundancy"
    out.mkdir(parents=True, exist_ok=True)

    symbols = ("a", "b", DELIM)
    alphabet = frozenset((BLANK,) + symbols)
    # Tape 0 carries the primary feed and is forwarded verbatim; tape 1 is a
    # backup whose values are discarded, with only its end-of-transmission
    # delimiter acknowledged.  Dropping the backup barely changes the output.
    rules = [
        make_rule("q0", WILDCARD, [sym, WILDCARD], "q0", BLANK, MOVE_STAY,
                  [MOVE_RIGHT, MOVE_STAY], [sym])
        for sym in symbols
    ]
    rules += [
        make_rule("q0", WILDCARD, [BLANK, sym], "q0", BLANK, MOVE_STAY,
                  [MOVE_STAY, MOVE_RIGHT], [None])
        for sym in ("a", "b")
    ]
    rules.append(
        make_rule("q0", WILDCARD, [BLANK, DELIM], "q0", BLANK, MOVE_STAY,
                  [MOVE_STAY, MOVE_RIGHT], [DELIM])
    )
    decider = MachineSpec(
        id="decider",
        states=frozenset({"q0", "stop"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=2,
        num_outputs=1,
        rules=tuple(rules),
        start_state="q0",
        halt_state="stop",
    )
    save_machine(decider, out / "decider.json")

    network = Network(
        machines={"decider": decider},
        sources={
            "r1": ExternalSource("r1", "decider", 0),
            "r2": ExternalSource("r2", "decider", 1),
        },
        sinks={"out": ExternalSink("out", "decider", 0)},
    )
    save_network(network, out / "network.json")

    trace = ContextTrace(
        variables={
            "r1": ContextVariable("r1", "first copy of the reading"),
            "r2": ContextVariable("r2", "second copy of the reading"),
        },
        vectors={
            "r1": EvaluationVector("r1", ((0, "abab"),)),
            "r2": EvaluationVector("r2", ((0, "abab"),)),
        },
        c_a=("r1", "r2"),
        bindings_in={"r1": ("decider", 0), "r2": ("decider", 1)},
        bindings_out={"decider.0": "r1"},
    )
    save_trace(trace, out / "trace.json")


def main():
    write_map_viewer()
    write_simple()
    write_redundancy()
    print("fixtures written under", FIXTURES)


if __name__ == "__main__":
    main()
