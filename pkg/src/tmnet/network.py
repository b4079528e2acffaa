"""Network topology: connections, external bindings, validation, routing.

Every input tape has at most one writer (a peer's output port or an external
source), and every output port feeds exactly one destination (a peer's input
tape or an external sink). Network values are immutable; wiring helpers
return new networks.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .errors import BlankWriteRejected, DoubleWriter, PortNotFound
from .machine import BLANK, MachineSpec


@dataclass(frozen=True)
class PortRef:
    """Address of an output port or input tape, e.g. "m0.1"."""

    machine: str
    index: int

    @classmethod
    def parse(cls, text: str) -> "PortRef":
        machine, sep, index = text.rpartition(".")
        if not sep or not machine:
            raise ValueError(f"port reference {text!r} must look like 'machine.index'")
        if not index.isdigit():
            raise ValueError(f"port index in {text!r} must be a non-negative integer")
        return cls(machine, int(index))

    def __str__(self) -> str:
        return f"{self.machine}.{self.index}"


@dataclass(frozen=True)
class Connection:
    """Directed link from an output port to a peer's input tape."""

    source: PortRef
    dest: PortRef


@dataclass(frozen=True)
class ExternalSource:
    """Environment feed bound to one input tape, with an optional schedule.

    Schedule entries are (global_step, symbol) pairs with non-decreasing
    times; entries sharing a step are injected at consecutive micro-ticks.
    """

    id: str
    machine: str
    tape: int
    schedule: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(
            (int(t), str(s)) for t, s in self.schedule
        ))
        last = None
        for t, s in self.schedule:
            if t < 0:
                raise ValueError(f"source {self.id!r}: negative injection time")
            if last is not None and t < last:
                raise ValueError(f"source {self.id!r}: schedule times must be non-decreasing")
            if s == BLANK:
                raise BlankWriteRejected(f"source {self.id!r}: cannot inject blank")
            last = t


@dataclass(frozen=True)
class ExternalSink:
    """Environment observer bound to one output port."""

    id: str
    machine: str
    port: int


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "network is valid"
        lines = [f"{v.kind}: {v.message}" for v in self.violations]
        return f"{len(lines)} violation(s): " + " | ".join(lines)


@dataclass(frozen=True)
class Network:
    """Immutable set of machines plus wiring and external bindings."""

    machines: Mapping[str, MachineSpec]
    connections: tuple = ()
    sources: Mapping[str, ExternalSource] = field(default_factory=dict)
    sinks: Mapping[str, ExternalSink] = field(default_factory=dict)

    def __post_init__(self):
        machines = dict(self.machines)
        for mid, spec in machines.items():
            if mid != spec.id:
                raise ValueError(f"machine key {mid!r} does not match spec id {spec.id!r}")
        object.__setattr__(self, "machines", machines)
        object.__setattr__(self, "connections", tuple(self.connections))
        object.__setattr__(self, "sources", dict(self.sources))
        object.__setattr__(self, "sinks", dict(self.sinks))
        for sid, src in self.sources.items():
            if sid != src.id:
                raise ValueError(f"source key {sid!r} does not match id {src.id!r}")
        for sid, sink in self.sinks.items():
            if sid != sink.id:
                raise ValueError(f"sink key {sid!r} does not match id {sink.id!r}")

    def machine_ids(self) -> list:
        return sorted(self.machines)

    def writer_of(self, dest: PortRef):
        """The connection or source feeding an input tape, if any."""
        for conn in self.connections:
            if conn.dest == dest:
                return conn
        for src in self.sources.values():
            if src.machine == dest.machine and src.tape == dest.index:
                return src
        return None

    def destination_of(self, source: PortRef):
        """The connection or sink fed by an output port, if any."""
        for conn in self.connections:
            if conn.source == source:
                return conn
        for sink in self.sinks.values():
            if sink.machine == source.machine and sink.port == source.index:
                return sink
        return None


def _check_output_port(n: Network, ref: PortRef) -> Optional[str]:
    spec = n.machines.get(ref.machine)
    if spec is None:
        return f"unknown machine {ref.machine!r}"
    if not 0 <= ref.index < spec.num_outputs:
        return f"machine {ref.machine!r} has no output port {ref.index}"
    return None


def _check_input_tape(n: Network, ref: PortRef) -> Optional[str]:
    spec = n.machines.get(ref.machine)
    if spec is None:
        return f"unknown machine {ref.machine!r}"
    if not 0 <= ref.index < spec.num_inputs:
        return f"machine {ref.machine!r} has no input tape {ref.index}"
    return None


def wire(n: Network, source: PortRef, dest) -> Network:
    """Connect an output port to an input tape or, given a string, a sink id.

    Returns a new network. Raises PortNotFound for missing endpoints and
    DoubleWriter when the destination tape already has a writer.
    """
    problem = _check_output_port(n, source)
    if problem:
        raise PortNotFound(problem)
    if n.destination_of(source) is not None:
        raise PortNotFound(f"output port {source} already feeds a destination")
    if isinstance(dest, str):
        if dest in n.sinks:
            raise DoubleWriter(f"sink {dest!r} is already bound")
        sinks = dict(n.sinks)
        sinks[dest] = ExternalSink(dest, source.machine, source.index)
        return replace(n, sinks=sinks)
    problem = _check_input_tape(n, dest)
    if problem:
        raise PortNotFound(problem)
    if n.writer_of(dest) is not None:
        raise DoubleWriter(f"input tape {dest} already has a writer")
    return replace(n, connections=n.connections + (Connection(source, dest),))


def add_source(n: Network, source: ExternalSource) -> Network:
    """Bind an external source to an input tape, returning a new network."""
    problem = _check_input_tape(n, PortRef(source.machine, source.tape))
    if problem:
        raise PortNotFound(problem)
    if source.id in n.sources:
        raise DoubleWriter(f"source id {source.id!r} is already bound")
    if n.writer_of(PortRef(source.machine, source.tape)) is not None:
        raise DoubleWriter(
            f"input tape {source.machine}.{source.tape} already has a writer"
        )
    sources = dict(n.sources)
    sources[source.id] = source
    return replace(n, sources=sources)


def port_emissions(spec: MachineSpec, port: int) -> frozenset:
    """Symbols the machine can ever emit on one port."""
    return frozenset(
        rule.outputs[port]
        for rule in spec.rules
        if rule.outputs[port] is not None
    )


def validate_network(n: Network) -> ValidationReport:
    """Static checks; a network that passes cannot fail while routing.

    Checks: endpoints exist, one writer per tape, one destination per port,
    no unconnected output ports, no isolated machines, and alphabet
    compatibility of everything that can arrive on a tape.
    """
    violations = []

    def add(kind, subject, message):
        violations.append(Violation(kind, subject, message))

    writers: Dict[Tuple[str, int], str] = {}
    port_dests: Dict[Tuple[str, int], str] = {}
    touched = set()

    for conn in n.connections:
        problem = _check_output_port(n, conn.source)
        if problem:
            add("dangling-endpoint", str(conn.source), problem)
            continue
        problem = _check_input_tape(n, conn.dest)
        if problem:
            add("dangling-endpoint", str(conn.dest), problem)
            continue
        touched.add(conn.source.machine)
        touched.add(conn.dest.machine)
        key = (conn.dest.machine, conn.dest.index)
        if key in writers:
            add("double-writer", str(conn.dest),
                f"tape {conn.dest} written by both {writers[key]} and {conn.source}")
        else:
            writers[key] = str(conn.source)
        pkey = (conn.source.machine, conn.source.index)
        if pkey in port_dests:
            add("fan-out", str(conn.source),
                f"port {conn.source} feeds both {port_dests[pkey]} and {conn.dest}")
        else:
            port_dests[pkey] = str(conn.dest)
        src_spec = n.machines[conn.source.machine]
        dest_spec = n.machines[conn.dest.machine]
        stray = port_emissions(src_spec, conn.source.index) - dest_spec.tape_alphabet
        if stray:
            add("alphabet-mismatch", str(conn),
                f"port {conn.source} can emit {sorted(stray)} outside the tape "
                f"alphabet of {conn.dest.machine!r}")

    for sid, src in sorted(n.sources.items()):
        problem = _check_input_tape(n, PortRef(src.machine, src.tape))
        if problem:
            add("unbound-external", sid, problem)
            continue
        touched.add(src.machine)
        key = (src.machine, src.tape)
        if key in writers:
            add("double-writer", f"{src.machine}.{src.tape}",
                f"tape {src.machine}.{src.tape} written by both {writers[key]} "
                f"and source {sid!r}")
        else:
            writers[key] = f"source {sid!r}"
        spec = n.machines[src.machine]
        for t, sym in src.schedule:
            if sym not in spec.tape_alphabet:
                add("alphabet-mismatch", sid,
                    f"source {sid!r} injects {sym!r} outside the tape alphabet "
                    f"of {src.machine!r}")
                break

    for sid, sink in sorted(n.sinks.items()):
        problem = _check_output_port(n, PortRef(sink.machine, sink.port))
        if problem:
            add("unbound-external", sid, problem)
            continue
        touched.add(sink.machine)
        pkey = (sink.machine, sink.port)
        if pkey in port_dests:
            add("fan-out", f"{sink.machine}.{sink.port}",
                f"port {sink.machine}.{sink.port} feeds both {port_dests[pkey]} "
                f"and sink {sid!r}")
        else:
            port_dests[pkey] = f"sink {sid!r}"

    for mid in sorted(n.machines):
        spec = n.machines[mid]
        for port in range(spec.num_outputs):
            if (mid, port) not in port_dests:
                add("unconnected-port", f"{mid}.{port}",
                    f"output port {mid}.{port} has no destination")
        if mid not in touched:
            add("isolated-machine", mid,
                f"machine {mid!r} has no connection or external binding")

    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class RoutingResult:
    """Deliveries for one tick.

    ``writes`` maps (machine, tape) to the symbol delivered; ``sink_writes``
    lists (sink id, symbol) pairs; ``ordered`` preserves the full delivery
    order (machine id ascending, then port) as (machine, port, kind, dest,
    symbol) with kind "tape" or "sink".
    """

    writes: Mapping[Tuple[str, int], str]
    sink_writes: tuple
    ordered: tuple


def route(n: Network, emissions: Mapping[str, Sequence[Optional[str]]]) -> RoutingResult:
    """Map per-port emissions to tape writes and sink records.

    ``emissions`` holds one optional symbol per output port, keyed by
    machine id. Ports with None emit nothing. Raises PortNotFound when an
    emitting port has no destination. At most one write reaches any tape
    because every tape has a single writer.
    """
    writes = {}
    sink_writes = []
    ordered = []
    sink_by_port = {(s.machine, s.port): sid for sid, s in n.sinks.items()}
    conn_by_port = {(c.source.machine, c.source.index): c.dest for c in n.connections}
    for mid in sorted(emissions):
        spec = n.machines[mid]
        symbols = emissions[mid]
        if len(symbols) != spec.num_outputs:
            raise ValueError(f"emission vector arity mismatch for {mid!r}")
        for port, sym in enumerate(symbols):
            if sym is None:
                continue
            dest = conn_by_port.get((mid, port))
            if dest is not None:
                writes[(dest.machine, dest.index)] = sym
                ordered.append((mid, port, "tape", dest, sym))
                continue
            sid = sink_by_port.get((mid, port))
            if sid is None:
                raise PortNotFound(f"emitting port {mid}.{port} has no destination")
            sink_writes.append((sid, sym))
            ordered.append((mid, port, "sink", sid, sym))
    return RoutingResult(
        writes=writes, sink_writes=tuple(sink_writes), ordered=tuple(ordered)
    )
