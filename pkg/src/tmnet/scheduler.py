"""Deterministic micro-tick scheduler, the event log format, and replay.

Time advances on a micro-tick grid of resolution R = lcm of all machine
speeds; a machine with speed s fires every R/s micro-ticks, and a budget of
B global steps runs B*R micro-ticks. Each tick proceeds in phases: due
external injections land first and are visible immediately, then all firing
machines sample their tapes and step, then emissions are routed and become
visible next tick.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from . import engine
from .engine import encode as _enc
from .errors import InvalidNetwork, LogMismatch, TmnetError
from .machine import (
    BLANK,
    MOVE_RIGHT,
    MachineSnapshot,
    MachineState,
    find_rule,
)
from .network import ExternalSource, Network, validate_network

DEFAULT_BUDGET = 10_000

ALL_HALTED = "all-halted"
QUIESCENT = "quiescent"
BUDGET_EXHAUSTED = "budget-exhausted"

HALT_REASONS = (ALL_HALTED, QUIESCENT, BUDGET_EXHAUSTED)

LOG_SCHEMA = "tmnet-log/1"


@dataclass(frozen=True)
class ClockConfig:
    """Positive integer clock speed per machine id."""

    speeds: Mapping[str, int]

    def __post_init__(self):
        speeds = {str(k): int(v) for k, v in dict(self.speeds).items()}
        for mid, s in speeds.items():
            if s < 1:
                raise ValueError(f"speed of {mid!r} must be a positive integer")
        object.__setattr__(self, "speeds", speeds)

    @classmethod
    def from_network(cls, n: Network, overrides: Optional[Mapping[str, int]] = None):
        speeds = {mid: spec.speed for mid, spec in n.machines.items()}
        for mid, s in (overrides or {}).items():
            if mid not in speeds:
                raise ValueError(f"speed override for unknown machine {mid!r}")
            speeds[mid] = int(s)
        return cls(speeds)

    @property
    def micro_resolution(self) -> int:
        if not self.speeds:
            return 1
        return math.lcm(*self.speeds.values())

    def fire_period(self, mid: str) -> int:
        return self.micro_resolution // self.speeds[mid]


@dataclass(frozen=True)
class Event:
    """One log entry; ``data`` holds the kind-specific payload."""

    tick: int
    kind: str
    machine: str
    data: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        obj = {"tick": self.tick, "kind": self.kind, "machine": self.machine}
        obj.update(self.data)
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Event":
        obj = dict(obj)
        return cls(
            tick=obj.pop("tick"),
            kind=obj.pop("kind"),
            machine=obj.pop("machine"),
            data=obj,
        )


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class EventLog:
    """Replayable record of one run: header meta, events, halt trailer.

    The JSONL form is canonical: sorted keys, no whitespace, one object per
    line. Identical runs serialize to identical bytes.
    """

    def __init__(self, meta: Mapping, events=None, end_reason: Optional[str] = None):
        self.meta = dict(meta)
        self.events: List[Event] = list(events or ())
        self.end_reason = end_reason

    def append(self, event: Event) -> None:
        self.events.append(event)

    def to_jsonl(self) -> str:
        lines = [_dumps(self.meta)]
        lines.extend(_dumps(e.to_json_obj()) for e in self.events)
        if self.end_reason is not None:
            lines.append(_dumps({"halt_reason": self.end_reason}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "EventLog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty event log")
        meta = json.loads(lines[0])
        if meta.get("schema") != LOG_SCHEMA:
            raise ValueError("first line is not a tmnet log header")
        events = []
        end_reason = None
        for ln in lines[1:]:
            obj = json.loads(ln)
            if "halt_reason" in obj:
                end_reason = obj["halt_reason"]
            else:
                events.append(Event.from_json_obj(obj))
        return cls(meta, events, end_reason)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return (
            self.meta == other.meta
            and self.events == other.events
            and self.end_reason == other.end_reason
        )

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


@dataclass
class RunResult:
    """Outcome of a run: final machine snapshots, timed sink streams, log."""

    final: Dict[str, MachineSnapshot]
    sinks: Dict[str, list]
    log: EventLog
    halt_reason: Optional[str]


def sink_streams(result: RunResult) -> Dict[str, list]:
    """Sink streams with timestamps stripped."""
    return {sid: [sym for _, sym in pairs] for sid, pairs in result.sinks.items()}


def _effective_schedules(network: Network, sources) -> Dict[str, tuple]:
    schedules = {sid: src.schedule for sid, src in network.sources.items()}
    for sid, entries in (sources or {}).items():
        if sid not in schedules:
            raise ValueError(f"schedule for unknown source {sid!r}")
        src = network.sources[sid]
        # reuse the source constructor for schedule validation
        schedules[sid] = ExternalSource(sid, src.machine, src.tape, entries).schedule
    return schedules


def run(
    network: Network,
    clocks: Optional[ClockConfig] = None,
    sources: Optional[Mapping[str, Sequence]] = None,
    budget: int = DEFAULT_BUDGET,
) -> RunResult:
    """Simulate the network for at most ``budget`` global steps.

    ``sources`` may override the schedule of any declared external source.
    The returned log replays to the same result. Raises InvalidNetwork when
    validation fails.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    report = validate_network(network)
    if not report.ok:
        raise InvalidNetwork(report)
    if clocks is None:
        clocks = ClockConfig.from_network(network)
    missing = set(network.machines) - set(clocks.speeds)
    if missing:
        raise ValueError(f"clock speeds missing for machines {sorted(missing)}")
    extra = set(clocks.speeds) - set(network.machines)
    if extra:
        raise ValueError(f"clock speeds for unknown machines {sorted(extra)}")
    schedules = _effective_schedules(network, sources)
    enc = _enc.EncodedNetwork(network, clocks.speeds, clocks.micro_resolution, schedules)
    outcome = engine.run_encoded(enc, budget * clocks.micro_resolution)
    return _materialize(enc, clocks, budget, outcome)


def _log_meta(clocks: ClockConfig, budget: int) -> dict:
    return {
        "schema": LOG_SCHEMA,
        "budget": budget,
        "micro_resolution": clocks.micro_resolution,
        "speeds": dict(sorted(clocks.speeds.items())),
    }


def _materialize(enc, clocks: ClockConfig, budget: int, outcome) -> RunResult:
    """Turn the kernel's integer records back into events and snapshots."""
    reason_code, records, state, halted, trans, work_cells, work_heads, in_cells, in_read = outcome
    syms = enc.symbols
    log = EventLog(_log_meta(clocks, budget))
    sinks = {sid: [] for sid in enc.sink_ids}
    r = records
    i = 0
    while i < len(r):
        tick, kind = r[i], r[i + 1]
        if kind == _enc.K_INJECT:
            srci, m, tape, sym = r[i + 2], r[i + 3], r[i + 4], r[i + 5]
            log.append(Event(tick, "inject", enc.machine_ids[m], {
                "source": enc.source_ids[srci], "tape": tape, "symbol": syms[sym]}))
            i += 6
        elif kind == _enc.K_TRANS:
            m, ridx = r[i + 2], r[i + 3]
            ni = enc.num_inputs[m]
            isc = [syms[c] for c in r[i + 4:i + 4 + ni]]
            adv = [bool(c) for c in r[i + 4 + ni:i + 4 + 2 * ni]]
            rule = enc.specs[m].rules[ridx]
            log.append(Event(tick, "transition", enc.machine_ids[m], {
                "from": rule.match_state, "to": rule.next_state, "rule": ridx,
                "scanned": isc, "advanced": adv,
                "write": list(rule.work_write), "move": list(rule.work_move),
                "emit": list(rule.outputs)}))
            i += 4 + 2 * ni
        elif kind == _enc.K_IDLE:
            m, st = r[i + 2], r[i + 3]
            nw, ni = enc.num_work[m], enc.num_inputs[m]
            wsc = [syms[c] for c in r[i + 4:i + 4 + nw]]
            isc = [syms[c] for c in r[i + 4 + nw:i + 4 + nw + ni]]
            log.append(Event(tick, "idle", enc.machine_ids[m], {
                "state": enc.state_names[m][st], "work": wsc, "scanned": isc}))
            i += 4 + nw + ni
        elif kind == _enc.K_RDBLANK:
            m, tape = r[i + 2], r[i + 3]
            log.append(Event(tick, "read-blank", enc.machine_ids[m], {"tape": tape}))
            i += 4
        elif kind == _enc.K_HALT:
            m = r[i + 2]
            log.append(Event(tick, "halt", enc.machine_ids[m], {}))
            i += 3
        elif kind == _enc.K_ROUTE:
            m, port, dm, dt, sym = r[i + 2], r[i + 3], r[i + 4], r[i + 5], r[i + 6]
            log.append(Event(tick, "route", enc.machine_ids[m], {
                "port": port, "to_machine": enc.machine_ids[dm], "to_tape": dt,
                "symbol": syms[sym]}))
            i += 7
        elif kind == _enc.K_SINKROUTE:
            m, port, si, sym = r[i + 2], r[i + 3], r[i + 4], r[i + 5]
            sid = enc.sink_ids[si]
            sinks[sid].append((tick, syms[sym]))
            log.append(Event(tick, "route", enc.machine_ids[m], {
                "port": port, "sink": sid, "symbol": syms[sym]}))
            i += 6
        else:
            raise AssertionError(f"unknown record kind {kind}")
    reason = HALT_REASONS[reason_code]
    log.end_reason = reason
    final = {}
    for m, mid in enumerate(enc.machine_ids):
        work = []
        for j in range(enc.num_work[m]):
            cells = [syms[c] for c in work_cells[m][j]]
            while cells and cells[-1] == BLANK:
                cells.pop()
            work.append((tuple(cells), work_heads[m][j]))
        inputs = []
        for k in range(enc.num_inputs[m]):
            inputs.append((tuple(syms[c] for c in in_cells[m][k]), in_read[m][k]))
        final[mid] = MachineSnapshot(
            state=enc.state_names[m][state[m]],
            halted=bool(halted[m]),
            transitions=trans[m],
            work_tapes=tuple(work),
            input_tapes=tuple(inputs),
        )
    return RunResult(final=final, sinks=sinks, log=log, halt_reason=reason)


def replay(log: EventLog, network: Network) -> RunResult:
    """Reconstruct machine states and sink streams by re-applying a log.

    Every event is verified against the network; inconsistency raises
    LogMismatch. A truncated log yields the state at the cut point, with
    halt_reason None when the trailer is missing.
    """
    report = validate_network(network)
    if not report.ok:
        raise InvalidNetwork(report)
    states = {mid: MachineState(spec) for mid, spec in network.machines.items()}
    sinks = {sid: [] for sid in sorted(network.sinks)}
    conn_by_port = {(c.source.machine, c.source.index): c.dest for c in network.connections}
    pending = {}
    last_fired = {}

    def fail(ev, message):
        raise LogMismatch(f"tick {ev.tick}, {ev.kind} of {ev.machine!r}: {message}")

    for ev in log.events:
        st = states.get(ev.machine)
        if st is None:
            fail(ev, "machine does not exist in this network")
        if ev.kind == "inject":
            src = network.sources.get(ev.data["source"])
            if src is None or src.machine != ev.machine or src.tape != ev.data["tape"]:
                fail(ev, "no such source binding")
            try:
                st.deliver(src.tape, ev.data["symbol"])
            except TmnetError as exc:
                fail(ev, str(exc))
        elif ev.kind == "transition":
            if st.halted:
                fail(ev, "machine has already halted")
            if ev.data["from"] != st.current_state:
                fail(ev, f"machine is in state {st.current_state!r}")
            scanned = st.scanned_inputs()
            if scanned != list(ev.data["scanned"]):
                fail(ev, "scanned symbols do not match the tapes")
            found = find_rule(st.spec, st.current_state, st.scanned_work(), scanned)
            if found is None or found[0] != ev.data["rule"]:
                fail(ev, "rule selection does not match")
            rule = found[1]
            if (ev.data["to"] != rule.next_state
                    or list(ev.data["write"]) != list(rule.work_write)
                    or list(ev.data["move"]) != list(rule.work_move)
                    or list(ev.data["emit"]) != list(rule.outputs)):
                fail(ev, "event fields disagree with the selected rule")
            outcome = st.step(scanned)
            if list(outcome.advanced) != list(ev.data["advanced"]):
                fail(ev, "input head movement does not match")
            for port, sym in enumerate(outcome.emissions):
                if sym is not None:
                    pending[(ev.machine, port)] = sym
            last_fired[ev.machine] = (ev.tick, found[1], outcome.advanced)
        elif ev.kind == "idle":
            if st.halted:
                fail(ev, "machine has already halted")
            if ev.data["state"] != st.current_state:
                fail(ev, f"machine is in state {st.current_state!r}")
            if st.scanned_work() != list(ev.data["work"]):
                fail(ev, "working tape symbols do not match")
            if st.scanned_inputs() != list(ev.data["scanned"]):
                fail(ev, "scanned symbols do not match the tapes")
            if find_rule(st.spec, st.current_state, st.scanned_work(),
                         st.scanned_inputs()) is not None:
                fail(ev, "a rule matches but the log records an idle tick")
        elif ev.kind == "read-blank":
            fired = last_fired.get(ev.machine)
            tape = ev.data["tape"]
            if fired is None or fired[0] != ev.tick:
                fail(ev, "no transition this tick")
            _, rule, advanced = fired
            if rule.input_moves[tape] != MOVE_RIGHT or advanced[tape]:
                fail(ev, "head did not degrade on that tape")
        elif ev.kind == "halt":
            if not st.halted:
                fail(ev, "machine has not halted")
        elif ev.kind == "route":
            port = ev.data["port"]
            sym = pending.pop((ev.machine, port), None)
            if sym is None or sym != ev.data["symbol"]:
                fail(ev, "route does not match an emission")
            if "sink" in ev.data:
                sink = network.sinks.get(ev.data["sink"])
                if sink is None or sink.machine != ev.machine or sink.port != port:
                    fail(ev, "no such sink binding")
                sinks[ev.data["sink"]].append((ev.tick, sym))
            else:
                dest = conn_by_port.get((ev.machine, port))
                if (dest is None or dest.machine != ev.data["to_machine"]
                        or dest.index != ev.data["to_tape"]):
                    fail(ev, "no such connection")
                try:
                    states[dest.machine].deliver(dest.index, sym)
                except TmnetError as exc:
                    fail(ev, str(exc))
        else:
            fail(ev, "unknown event kind")

    final = {mid: st.snapshot() for mid, st in states.items()}
    return RunResult(final=final, sinks=sinks, log=log, halt_reason=log.end_reason)
