"""Shared builders and random generators for the test suite."""

import pathlib

from tmnet import (
    BLANK,
    WILDCARD,
    Connection,
    ExternalSink,
    ExternalSource,
    MachineSpec,
    Network,
    PortRef,
    make_rule,
    validate_network,
)
from tmnet.machine import MOVE_LEFT, MOVE_RIGHT, MOVE_STAY

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

SMALL_ALPHABET = frozenset({BLANK, "0", "1"})


def two_step_producer(mid="producer", symbols=("a", "b")):
    """Input-free machine that emits the given symbols one per step, then halts."""
    alphabet = frozenset({BLANK, *symbols})
    states = [f"p{i}" for i in range(len(symbols))] + ["done"]
    rules = tuple(
        make_rule(states[i], WILDCARD, [], states[i + 1], sym, MOVE_RIGHT, [], [sym])
        for i, sym in enumerate(symbols)
    )
    return MachineSpec(
        id=mid,
        states=frozenset(states),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=0,
        num_outputs=1,
        rules=rules,
        start_state=states[0],
        halt_state="done",
    )


def echo_consumer(mid="consumer", symbols=("a", "b"), halt_on=None):
    """One-input machine that copies symbols to its work tape and port 0."""
    alphabet = frozenset({BLANK, *symbols})
    rules = []
    for sym in symbols:
        nxt = "done" if sym == halt_on else "c0"
        rules.append(
            make_rule("c0", WILDCARD, [sym], nxt, sym, MOVE_RIGHT,
                      [MOVE_RIGHT], [sym])
        )
    return MachineSpec(
        id=mid,
        states=frozenset({"c0", "done"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=1,
        num_outputs=1,
        rules=tuple(rules),
        start_state="c0",
        halt_state="done",
    )


def producer_consumer_network(halt_on="b"):
    """The two-machine chain used as a hand-checked reference point."""
    producer = two_step_producer()
    consumer = echo_consumer(halt_on=halt_on)
    return Network(
        machines={"producer": producer, "consumer": consumer},
        connections=(Connection(PortRef("producer", 0), PortRef("consumer", 0)),),
        sinks={"out": ExternalSink("out", "consumer", 0)},
    )


def random_machine(rng, mid, alphabet=SMALL_ALPHABET, num_inputs=1,
                   num_outputs=1, max_states=3, max_rules=6):
    """A valid random machine; rule patterns honour every static check."""
    symbols = sorted(alphabet)
    non_blank = [s for s in symbols if s != BLANK]
    n_states = rng.randint(1, max_states)
    live = [f"q{i}" for i in range(n_states)]
    states = live + ["hh"]

    rules = []
    seen = set()
    for _ in range(rng.randint(1, max_rules)):
        state = rng.choice(live)
        work = rng.choice([WILDCARD] + symbols)
        inputs = [rng.choice([WILDCARD] + symbols) for _ in range(num_inputs)]
        input_moves = []
        for sym in inputs:
            if sym == BLANK:
                input_moves.append(MOVE_STAY)
            else:
                input_moves.append(rng.choice([MOVE_RIGHT, MOVE_RIGHT, MOVE_STAY]))
        sig = (state, work, tuple(inputs))
        if sig in seen:
            continue
        seen.add(sig)
        next_state = rng.choice(states if rng.random() < 0.3 else live)
        write = rng.choice(symbols)
        move = rng.choice([MOVE_LEFT, MOVE_RIGHT, MOVE_STAY])
        outputs = [
            rng.choice([None] + non_blank) for _ in range(num_outputs)
        ]
        rules.append(
            make_rule(state, work, inputs, next_state, write, move,
                      input_moves, outputs)
        )
    return MachineSpec(
        id=mid,
        states=frozenset(states),
        input_alphabet=frozenset(alphabet),
        tape_alphabet=frozenset(alphabet),
        num_inputs=num_inputs,
        num_outputs=num_outputs,
        rules=tuple(rules),
        start_state="q0",
        halt_state="hh",
    )


def random_schedule(rng, alphabet=SMALL_ALPHABET, horizon=8, max_entries=6):
    """Non-decreasing (time, symbol) injection entries."""
    non_blank = [s for s in sorted(alphabet) if s != BLANK]
    times = sorted(rng.randint(0, horizon) for _ in range(rng.randint(0, max_entries)))
    return tuple((t, rng.choice(non_blank)) for t in times)


def random_network(rng, alphabet=SMALL_ALPHABET, max_machines=4,
                   max_states=3, horizon=8):
    """A random network that passes every static validation check.

    Every output port gets a destination (peer tape or sink), every machine
    ends up with at least one binding, and leftover input tapes may get a
    scheduled external source.
    """
    n_machines = rng.randint(1, max_machines)
    machines = {}
    for i in range(n_machines):
        mid = f"m{i}"
        machines[mid] = random_machine(
            rng, mid, alphabet,
            num_inputs=rng.randint(0, 2),
            num_outputs=rng.randint(0, 2),
            max_states=max_states,
        )

    free_tapes = [
        (mid, tape)
        for mid, spec in sorted(machines.items())
        for tape in range(spec.num_inputs)
    ]
    rng.shuffle(free_tapes)
    connections = []
    sinks = {}
    for mid, spec in sorted(machines.items()):
        for port in range(spec.num_outputs):
            if free_tapes and rng.random() < 0.7:
                dm, dt = free_tapes.pop()
                connections.append(
                    Connection(PortRef(mid, port), PortRef(dm, dt))
                )
            else:
                sid = f"s{len(sinks)}"
                sinks[sid] = ExternalSink(sid, mid, port)

    touched = set()
    for conn in connections:
        touched.add(conn.source.machine)
        touched.add(conn.dest.machine)
    touched.update(sink.machine for sink in sinks.values())

    sources = {}
    for mid, tape in sorted(free_tapes):
        must_bind = mid not in touched
        if must_bind or rng.random() < 0.6:
            sid = f"x{len(sources)}"
            sources[sid] = ExternalSource(
                sid, mid, tape, random_schedule(rng, alphabet, horizon)
            )
            touched.add(mid)

    # a machine with no ports at all can only be reached by dropping it
    machines = {
        mid: spec for mid, spec in machines.items()
        if mid in touched or spec.num_inputs or spec.num_outputs
    }
    for mid, spec in sorted(machines.items()):
        if mid in touched:
            continue
        # bind the first input tape so the machine is not isolated
        sid = f"x{len(sources)}"
        sources[sid] = ExternalSource(
            sid, mid, 0, random_schedule(rng, alphabet, horizon)
        )
        touched.add(mid)

    network = Network(
        machines=machines,
        connections=tuple(connections),
        sources=sources,
        sinks=sinks,
    )
    report = validate_network(network)
    assert report.ok, report.summary()
    return network


def random_speeds(rng, network, max_speed=3):
    """Random per-machine clock speeds."""
    return {mid: rng.randint(1, max_speed) for mid in network.machines}


def random_producer_consumer(rng, alphabet=SMALL_ALPHABET):
    """A consumer, an input-free producer, and a total wiring between them."""
    n_ports = rng.randint(1, 2)
    producer = random_machine(
        rng, "h", alphabet, num_inputs=0, num_outputs=n_ports, max_states=2,
        max_rules=4,
    )
    consumer = random_machine(
        rng, "m", alphabet, num_inputs=rng.randint(n_ports, n_ports + 1),
        num_outputs=rng.randint(1, 2), max_states=2, max_rules=4,
    )
    wiring = {port: port for port in range(n_ports)}
    return consumer, producer, wiring
