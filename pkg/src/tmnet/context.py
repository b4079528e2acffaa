"""Context traces, trace encoding, and the awareness checks.

A context trace names environment variables, gives each a vector of timed
evaluations, marks the active subset, and binds variables to machine input
tapes (and optionally output ports back to variables). Evaluations are
injected as their value's characters followed by a delimiter; a vector
counts as consumed when the bound machine has read every injected symbol,
and as produced when the machine emits anything at or after the tick that
completed the reading.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .errors import (
    NotASubset,
    PortNotFound,
    UnboundVector,
    UnencodableValue,
)
from .machine import BLANK
from .network import ExternalSource, Network, add_source
from .scheduler import (
    DEFAULT_BUDGET,
    ClockConfig,
    RunResult,
    run,
    sink_streams,
)
from .similarity import SimilarityConfig, get_metric

CONSUMED_AND_PRODUCED = "consumed-and-produced"
CONSUMED_NO_OUTPUT = "consumed-no-output"
UNCONSUMED = "unconsumed"


@dataclass(frozen=True)
class ContextVariable:
    id: str
    description: str = ""


@dataclass(frozen=True)
class EvaluationVector:
    """Timed evaluations of one variable: (global_step, value) pairs."""

    variable: str
    evals: tuple = ()

    def __post_init__(self):
        evals = tuple((int(t), str(v)) for t, v in self.evals)
        object.__setattr__(self, "evals", evals)
        last = None
        for t, v in evals:
            if t < 0:
                raise ValueError(f"vector {self.variable!r}: negative time")
            if last is not None and t <= last:
                raise ValueError(
                    f"vector {self.variable!r}: times must be strictly increasing"
                )
            if not v:
                raise ValueError(f"vector {self.variable!r}: empty value")
            last = t


@dataclass(frozen=True)
class EncodingConfig:
    """How values become symbol schedules."""

    delimiter: str = "#"

    def __post_init__(self):
        if len(self.delimiter) != 1 or self.delimiter == BLANK:
            raise ValueError("delimiter must be a single non-blank symbol")


@dataclass(frozen=True)
class ContextTrace:
    """Variables, their evaluation vectors, the active set, and bindings."""

    variables: Mapping[str, ContextVariable]
    vectors: Mapping[str, EvaluationVector]
    c_a: tuple = ()
    bindings_in: Mapping[str, Tuple[str, int]] = field(default_factory=dict)
    bindings_out: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", dict(self.variables))
        object.__setattr__(self, "vectors", dict(self.vectors))
        object.__setattr__(self, "c_a", tuple(self.c_a))
        object.__setattr__(self, "bindings_in", {
            k: (str(m), int(t)) for k, (m, t) in dict(self.bindings_in).items()
        })
        object.__setattr__(self, "bindings_out", dict(self.bindings_out))
        for vid, var in self.variables.items():
            if vid != var.id:
                raise ValueError(f"variable key {vid!r} does not match id {var.id!r}")
        for vid, vec in self.vectors.items():
            if vid != vec.variable:
                raise ValueError(f"vector key {vid!r} does not match {vec.variable!r}")
            if vid not in self.variables:
                raise ValueError(f"vector {vid!r} has no declared variable")
        seen = set()
        for vid in self.c_a:
            if vid not in self.vectors:
                raise ValueError(f"active set names unknown vector {vid!r}")
            if vid in seen:
                raise ValueError(f"active set repeats {vid!r}")
            seen.add(vid)
        for vid in self.bindings_in:
            if vid not in self.vectors:
                raise ValueError(f"input binding for unknown vector {vid!r}")
        for port, vid in self.bindings_out.items():
            if vid not in self.variables:
                raise ValueError(f"output binding {port!r} names unknown variable {vid!r}")

    def expected_symbols(self, vid: str) -> int:
        """Symbols the encoded vector injects: value characters plus one
        delimiter per evaluation."""
        vec = self.vectors[vid]
        return sum(len(value) + 1 for _, value in vec.evals)


def encode_trace(
    trace: ContextTrace,
    network: Optional[Network] = None,
    vectors: Optional[Iterable[str]] = None,
    config: Optional[EncodingConfig] = None,
) -> Dict[str, list]:
    """Injection schedules for the chosen vectors, keyed by vector id.

    Each evaluation (t, value) becomes one schedule entry per character of
    the value plus a trailing delimiter, all at global step t; the
    scheduler spreads same-step entries over consecutive micro-ticks.
    Raises UnboundVector for vectors without an input binding and, when a
    network is given, UnencodableValue for characters outside the bound
    machine's tape alphabet.
    """
    config = config or EncodingConfig()
    if vectors is None:
        vectors = trace.c_a
    schedules: Dict[str, list] = {}
    for vid in vectors:
        if vid not in trace.vectors:
            raise UnboundVector(f"unknown vector {vid!r}")
        if vid not in trace.bindings_in:
            raise UnboundVector(f"vector {vid!r} has no input binding")
        machine, tape = trace.bindings_in[vid]
        allowed = None
        if network is not None:
            spec = network.machines.get(machine)
            if spec is None or not 0 <= tape < spec.num_inputs:
                raise PortNotFound(
                    f"vector {vid!r} is bound to missing tape {machine}.{tape}"
                )
            allowed = spec.tape_alphabet | {config.delimiter}
        entries = []
        for t, value in trace.vectors[vid].evals:
            for ch in value:
                if ch == BLANK or (allowed is not None and ch not in allowed):
                    raise UnencodableValue(
                        f"vector {vid!r}: character {ch!r} has no symbol on "
                        f"tape {machine}.{tape}"
                    )
                entries.append((t, ch))
            entries.append((t, config.delimiter))
        schedules[vid] = entries
    return schedules


def prepare_network(
    network: Network,
    trace: ContextTrace,
    vectors: Optional[Iterable[str]] = None,
    config: Optional[EncodingConfig] = None,
) -> Network:
    """Network ready to receive the trace: bound machines accept the
    delimiter and every chosen vector has a source named after it."""
    config = config or EncodingConfig()
    if vectors is None:
        vectors = trace.c_a
    vectors = list(vectors)
    machines = dict(network.machines)
    for vid in vectors:
        if vid not in trace.bindings_in:
            raise UnboundVector(f"vector {vid!r} has no input binding")
        machine, tape = trace.bindings_in[vid]
        spec = machines.get(machine)
        if spec is None or not 0 <= tape < spec.num_inputs:
            raise PortNotFound(
                f"vector {vid!r} is bound to missing tape {machine}.{tape}"
            )
        if config.delimiter not in spec.tape_alphabet:
            machines[machine] = replace(
                spec,
                input_alphabet=spec.input_alphabet | {config.delimiter},
                tape_alphabet=spec.tape_alphabet | {config.delimiter},
            )
    prepared = Network(
        machines=machines,
        connections=network.connections,
        sources=network.sources,
        sinks=network.sinks,
    )
    for vid in vectors:
        machine, tape = trace.bindings_in[vid]
        existing = prepared.sources.get(vid)
        if existing is not None:
            if (existing.machine, existing.tape) != (machine, tape):
                raise ValueError(
                    f"source {vid!r} is bound to {existing.machine}.{existing.tape}, "
                    f"but the trace binds it to {machine}.{tape}"
                )
        else:
            prepared = add_source(prepared, ExternalSource(vid, machine, tape))
    return prepared


def run_with_trace(
    network: Network,
    trace: ContextTrace,
    vectors: Optional[Iterable[str]] = None,
    clocks: Optional[ClockConfig] = None,
    budget: int = DEFAULT_BUDGET,
    config: Optional[EncodingConfig] = None,
) -> RunResult:
    """Encode the chosen vectors (default: the active set) and run."""
    config = config or EncodingConfig()
    if vectors is None:
        vectors = trace.c_a
    vectors = list(vectors)
    prepared = prepare_network(network, trace, vectors, config)
    schedules = encode_trace(trace, prepared, vectors, config)
    if clocks is not None:
        clocks = ClockConfig.from_network(prepared, clocks.speeds)
    return run(prepared, clocks=clocks, sources=schedules, budget=budget)


@dataclass(frozen=True)
class VectorStatus:
    vector: str
    status: str
    expected: int
    read: int
    completed_tick: Optional[int]
    produced_tick: Optional[int]


@dataclass(frozen=True)
class AwarenessReport:
    """Verdict plus one status per active vector.

    aware is true exactly when the active set is non-empty and every
    active vector was consumed and produced.
    """

    aware: bool
    vacuous: bool
    statuses: Mapping[str, VectorStatus]

    def __post_init__(self):
        object.__setattr__(self, "statuses", dict(self.statuses))


def check_awareness(
    network: Network,
    result: RunResult,
    trace: ContextTrace,
    config: Optional[EncodingConfig] = None,
) -> AwarenessReport:
    """Judge a finished run against the trace's active set.

    The run must have injected the full active set (see run_with_trace).
    An empty active set is vacuous and judged not aware.
    """
    config = config or EncodingConfig()
    statuses = {}
    for vid in trace.c_a:
        if vid not in trace.bindings_in:
            raise UnboundVector(f"vector {vid!r} has no input binding")
        machine, tape = trace.bindings_in[vid]
        snap = result.final.get(machine)
        spec = network.machines.get(machine)
        if snap is None or spec is None or not 0 <= tape < len(snap.input_tapes):
            raise PortNotFound(
                f"vector {vid!r} is bound to missing tape {machine}.{tape}"
            )
        expected = trace.expected_symbols(vid)
        read = snap.input_tapes[tape][1]
        completed_tick = None
        produced_tick = None
        if expected == 0:
            completed_tick = 0
        else:
            seen = 0
            for ev in result.log.events:
                if ev.kind != "transition" or ev.machine != machine:
                    continue
                if ev.data["advanced"][tape]:
                    seen += 1
                    if seen == expected:
                        completed_tick = ev.tick
                        break
        if completed_tick is not None:
            for ev in result.log.events:
                if (ev.kind == "transition" and ev.machine == machine
                        and ev.tick >= completed_tick
                        and any(sym is not None for sym in ev.data["emit"])):
                    produced_tick = ev.tick
                    break
        if read < expected or completed_tick is None:
            status = UNCONSUMED
        elif produced_tick is None:
            status = CONSUMED_NO_OUTPUT
        else:
            status = CONSUMED_AND_PRODUCED
        statuses[vid] = VectorStatus(
            vector=vid,
            status=status,
            expected=expected,
            read=read,
            completed_tick=completed_tick,
            produced_tick=produced_tick,
        )
    vacuous = not trace.c_a
    aware = not vacuous and all(
        s.status == CONSUMED_AND_PRODUCED for s in statuses.values()
    )
    return AwarenessReport(aware=aware, vacuous=vacuous, statuses=statuses)


@dataclass(frozen=True)
class EffectivenessReport:
    """Similarity of sink behavior with and without the dropped vectors."""

    metric: str
    threshold: float
    aggregate: float
    per_sink: Mapping[str, float]
    similar: bool
    degenerate: bool
    dropped: tuple
    full_streams: Mapping[str, list]
    subset_streams: Mapping[str, list]

    def __post_init__(self):
        object.__setattr__(self, "per_sink", dict(self.per_sink))
        object.__setattr__(self, "dropped", tuple(self.dropped))
        object.__setattr__(self, "full_streams", dict(self.full_streams))
        object.__setattr__(self, "subset_streams", dict(self.subset_streams))


def check_effective(
    network: Network,
    trace: ContextTrace,
    subset: Iterable[str],
    clocks: Optional[ClockConfig] = None,
    budget: int = DEFAULT_BUDGET,
    similarity: Optional[SimilarityConfig] = None,
    encoding: Optional[EncodingConfig] = None,
) -> EffectivenessReport:
    """Run with the full active set and with a subset; compare sinks.

    The subset must be contained in the active set; passing the full set is
    allowed but degenerate (similarity 1 by construction) and warns.
    """
    similarity = similarity or SimilarityConfig()
    encoding = encoding or EncodingConfig()
    subset_set = set(subset)
    active = set(trace.c_a)
    if not subset_set <= active:
        raise NotASubset(
            f"subset names vectors outside the active set: "
            f"{sorted(subset_set - active)}"
        )
    degenerate = subset_set == active
    if degenerate:
        warnings.warn("subset equals the active set; similarity is trivially 1",
                      stacklevel=2)
    kept = [vid for vid in trace.c_a if vid in subset_set]
    dropped = tuple(vid for vid in trace.c_a if vid not in subset_set)
    full_run = run_with_trace(network, trace, clocks=clocks, budget=budget,
                              config=encoding)
    sub_run = run_with_trace(network, trace, vectors=kept, clocks=clocks,
                             budget=budget, config=encoding)
    full = sink_streams(full_run)
    sub = sink_streams(sub_run)
    metric = get_metric(similarity.metric)
    per_sink = {sid: metric(full[sid], sub[sid]) for sid in sorted(full)}
    full_concat: list = []
    sub_concat: list = []
    for sid in sorted(full):
        # sink boundaries stay distinct under concatenation
        full_concat.extend(full[sid])
        full_concat.append(("sink-break", sid))
        sub_concat.extend(sub[sid])
        sub_concat.append(("sink-break", sid))
    aggregate = metric(full_concat, sub_concat)
    return EffectivenessReport(
        metric=similarity.metric,
        threshold=similarity.threshold,
        aggregate=aggregate,
        per_sink=per_sink,
        similar=aggregate >= similarity.threshold,
        degenerate=degenerate,
        dropped=dropped,
        full_streams=full,
        subset_streams=sub,
    )
