"""Composing a consumer machine with a producer into a single machine.

The producer reads no input tapes; its output ports feed some of the
consumer's input tapes. The composed machine carries both working tape
sets, steps both halves in lockstep, and emits the producer's symbols on
extra output ports. Looping those ports back onto the composed machine's
own input tapes reproduces the network's one-tick write visibility, so a
network run of the pair and a self-fed run of the product produce the
same streams tick for tick.
"""

from __future__ import annotations

from itertools import product as iter_product
from typing import Dict, Mapping

from .errors import IncompatibleWiring
from .machine import (
    BLANK,
    MOVE_RIGHT,
    MOVE_STAY,
    MachineSpec,
    TransitionRule,
    find_rule,
)
from .network import (
    Connection,
    ExternalSink,
    Network,
    PortRef,
    port_emissions,
)

HALT_NAME = "halted"


def _pair_name(qm: str, qh: str) -> str:
    return f"{qm}|{qh}"


def _check_wiring(consumer: MachineSpec, producer: MachineSpec, wiring: Mapping[int, int]):
    if producer.num_inputs != 0:
        raise IncompatibleWiring("the producer must not read any input tapes")
    if consumer.speed != producer.speed:
        raise IncompatibleWiring("composition requires equal clock speeds")
    if set(wiring) != set(range(producer.num_outputs)):
        raise IncompatibleWiring(
            "wiring must map every producer output port exactly once"
        )
    tapes = list(wiring.values())
    if len(set(tapes)) != len(tapes):
        raise IncompatibleWiring("two producer ports feed the same input tape")
    for tape in tapes:
        if not 0 <= tape < consumer.num_inputs:
            raise IncompatibleWiring(f"consumer has no input tape {tape}")


def compose_product(
    consumer: MachineSpec, producer: MachineSpec, wiring: Mapping[int, int]
) -> MachineSpec:
    """Build the lockstep product of a consumer and an input-free producer.

    ``wiring`` maps producer output ports to consumer input tapes. The
    product has one state per state pair plus a single collapsed halt
    state, and its rules enumerate every concrete combination of work
    symbols and arriving input symbols, so rule count is exponential in
    tape counts; keep the halves small.
    """
    _check_wiring(consumer, producer, wiring)
    feeds: Dict[int, int] = {tape: port for port, tape in wiring.items()}
    # what can ever appear on each consumer input tape in this wiring
    domains = []
    for tape in range(consumer.num_inputs):
        if tape in feeds:
            emitted = sorted(port_emissions(producer, feeds[tape]))
            domains.append([BLANK] + emitted)
        else:
            domains.append([BLANK])
    states = {
        _pair_name(qm, qh)
        for qm in sorted(consumer.states)
        for qh in sorted(producer.states)
    }
    states.add(HALT_NAME)
    if consumer.start_state == consumer.halt_state:
        start = HALT_NAME
    else:
        start = _pair_name(consumer.start_state, producer.start_state)

    rules = []
    wm = consumer.num_work_tapes
    wh = producer.num_work_tapes
    for qm in sorted(consumer.states - {consumer.halt_state}):
        for qh in sorted(producer.states):
            h_live = qh != producer.halt_state
            for work_m in iter_product(sorted(consumer.tape_alphabet), repeat=wm):
                for work_h in iter_product(sorted(producer.tape_alphabet), repeat=wh):
                    for inputs in iter_product(*domains) if domains else ((),):
                        m_found = find_rule(consumer, qm, work_m, inputs)
                        h_found = (
                            find_rule(producer, qh, work_h, ()) if h_live else None
                        )
                        if m_found is None and h_found is None:
                            continue
                        if m_found is not None:
                            rule_m = m_found[1]
                            next_m = rule_m.next_state
                            write_m = rule_m.work_write
                            move_m = rule_m.work_move
                            in_moves = tuple(
                                # an advance onto a known blank degrades statically
                                MOVE_STAY
                                if mv == MOVE_RIGHT and inputs[k] == BLANK
                                else mv
                                for k, mv in enumerate(rule_m.input_moves)
                            )
                            out_m = rule_m.outputs
                        else:
                            next_m = qm
                            write_m = work_m
                            move_m = (MOVE_STAY,) * wm
                            in_moves = (MOVE_STAY,) * consumer.num_inputs
                            out_m = (None,) * consumer.num_outputs
                        if h_found is not None:
                            rule_h = h_found[1]
                            next_h = rule_h.next_state
                            write_h = rule_h.work_write
                            move_h = rule_h.work_move
                            out_h = rule_h.outputs
                        else:
                            next_h = qh
                            write_h = work_h
                            move_h = (MOVE_STAY,) * wh
                            out_h = (None,) * producer.num_outputs
                        if next_m == consumer.halt_state:
                            next_state = HALT_NAME
                        else:
                            next_state = _pair_name(next_m, next_h)
                        rules.append(TransitionRule(
                            match_state=_pair_name(qm, qh),
                            match_work=tuple(work_m) + tuple(work_h),
                            match_inputs=tuple(inputs),
                            next_state=next_state,
                            work_write=tuple(write_m) + tuple(write_h),
                            work_move=tuple(move_m) + tuple(move_h),
                            input_moves=in_moves,
                            outputs=tuple(out_m) + tuple(out_h),
                        ))
    return MachineSpec(
        id=f"{consumer.id}+{producer.id}",
        states=frozenset(states),
        input_alphabet=consumer.input_alphabet | producer.input_alphabet,
        tape_alphabet=consumer.tape_alphabet | producer.tape_alphabet,
        num_inputs=consumer.num_inputs,
        num_outputs=consumer.num_outputs + producer.num_outputs,
        rules=tuple(rules),
        start_state=start,
        halt_state=HALT_NAME,
        speed=consumer.speed,
        num_work_tapes=wm + wh,
    )


def empty_producer(id: str = "nil") -> MachineSpec:
    """A producer that is already halted; composing with it changes nothing."""
    return MachineSpec(
        id=id,
        states=frozenset({"h"}),
        input_alphabet=frozenset({BLANK}),
        tape_alphabet=frozenset({BLANK}),
        num_inputs=0,
        num_outputs=0,
        rules=(),
        start_state="h",
        halt_state="h",
    )


def pair_network(
    consumer: MachineSpec,
    producer: MachineSpec,
    wiring: Mapping[int, int],
    sink_prefix: str = "out",
) -> Network:
    """Two-machine network with the producer feeding the consumer.

    The consumer's output ports go to sinks named ``{prefix}{port}`` so the
    result is directly comparable with product_network().
    """
    _check_wiring(consumer, producer, wiring)
    if consumer.id == producer.id:
        raise IncompatibleWiring("consumer and producer need distinct ids")
    connections = tuple(
        Connection(PortRef(producer.id, port), PortRef(consumer.id, tape))
        for port, tape in sorted(wiring.items())
    )
    sinks = {
        f"{sink_prefix}{port}": ExternalSink(f"{sink_prefix}{port}", consumer.id, port)
        for port in range(consumer.num_outputs)
    }
    return Network(
        machines={consumer.id: consumer, producer.id: producer},
        connections=connections,
        sinks=sinks,
    )


def product_network(
    consumer: MachineSpec,
    producer: MachineSpec,
    wiring: Mapping[int, int],
    sink_prefix: str = "out",
) -> Network:
    """Single-machine network that feeds the product back to itself."""
    spec = compose_product(consumer, producer, wiring)
    connections = tuple(
        Connection(
            PortRef(spec.id, consumer.num_outputs + port),
            PortRef(spec.id, tape),
        )
        for port, tape in sorted(wiring.items())
    )
    sinks = {
        f"{sink_prefix}{port}": ExternalSink(f"{sink_prefix}{port}", spec.id, port)
        for port in range(consumer.num_outputs)
    }
    return Network(machines={spec.id: spec}, connections=connections, sinks=sinks)
