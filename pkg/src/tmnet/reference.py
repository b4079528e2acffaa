"""Naive reference scheduler for cross-checking the engine.

Built directly on the public machine and network operations, with its own
tick loop, injection timing, and event construction. It shares only data
types and validation with the fast path, never stepping or routing code,
so the two implementations can be compared field by field.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

from .errors import InvalidNetwork, SymbolNotInAlphabet
from .machine import MOVE_RIGHT, MachineState, find_rule
from .network import Network, route, validate_network
from .scheduler import (
    ALL_HALTED,
    BUDGET_EXHAUSTED,
    DEFAULT_BUDGET,
    QUIESCENT,
    ClockConfig,
    Event,
    EventLog,
    RunResult,
    _effective_schedules,
    _log_meta,
)


def _timed_schedule(entries: Sequence, resolution: int) -> list:
    """Expand (global_step, symbol) entries onto the micro-tick grid."""
    timed = []
    offset = 0
    last_t = None
    for pos, (t, sym) in enumerate(entries):
        offset = offset + 1 if t == last_t else 0
        last_t = t
        timed.append((t * resolution + offset, pos, sym))
    timed.sort(key=lambda item: (item[0], item[1]))
    return [(tick, sym) for tick, _, sym in timed]


def run_reference(
    network: Network,
    clocks: Optional[ClockConfig] = None,
    sources: Optional[Mapping[str, Sequence]] = None,
    budget: int = DEFAULT_BUDGET,
) -> RunResult:
    """Simulate with the naive interpreter; same contract as run()."""
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
    resolution = clocks.micro_resolution
    schedules = {
        sid: _timed_schedule(entries, resolution)
        for sid, entries in _effective_schedules(network, sources).items()
    }
    for sid, entries in schedules.items():
        src = network.sources[sid]
        spec = network.machines[src.machine]
        for _, sym in entries:
            if sym not in spec.tape_alphabet:
                raise SymbolNotInAlphabet(
                    f"source {sid!r} injects {sym!r} outside the tape alphabet "
                    f"of {src.machine!r}"
                )

    states = {mid: MachineState(spec) for mid, spec in network.machines.items()}
    order = sorted(states)
    source_order = sorted(network.sources)
    src_ptr = {sid: 0 for sid in source_order}
    log = EventLog(_log_meta(clocks, budget))
    sinks = {sid: [] for sid in sorted(network.sinks)}
    total_micro = budget * resolution

    def injections_pending() -> bool:
        return any(src_ptr[sid] < len(schedules[sid]) for sid in source_order)

    def anyone_can_fire() -> bool:
        for mid in order:
            st = states[mid]
            if st.halted:
                continue
            if find_rule(st.spec, st.current_state, st.scanned_work(),
                         st.scanned_inputs()) is not None:
                return True
        return False

    tick = 0
    while True:
        if states and all(st.halted for st in states.values()):
            reason = ALL_HALTED
            break
        if not injections_pending() and not anyone_can_fire():
            reason = QUIESCENT
            break
        if tick >= total_micro:
            reason = BUDGET_EXHAUSTED
            break
        for sid in source_order:
            entries = schedules[sid]
            p = src_ptr[sid]
            src = network.sources[sid]
            while p < len(entries) and entries[p][0] == tick:
                sym = entries[p][1]
                states[src.machine].deliver(src.tape, sym)
                log.append(Event(tick, "inject", src.machine, {
                    "source": sid, "tape": src.tape, "symbol": sym}))
                p += 1
            src_ptr[sid] = p
        emissions = {}
        for mid in order:
            st = states[mid]
            if st.halted or tick % clocks.fire_period(mid):
                continue
            scanned = st.scanned_inputs()
            work_before = st.scanned_work()
            outcome = st.step(scanned)
            if not outcome.fired:
                log.append(Event(tick, "idle", mid, {
                    "state": st.current_state, "work": work_before,
                    "scanned": scanned}))
                continue
            rule = st.spec.rules[outcome.rule_index]
            log.append(Event(tick, "transition", mid, {
                "from": rule.match_state, "to": rule.next_state,
                "rule": outcome.rule_index,
                "scanned": list(outcome.scanned),
                "advanced": list(outcome.advanced),
                "write": list(rule.work_write), "move": list(rule.work_move),
                "emit": list(rule.outputs)}))
            for k in range(st.spec.num_inputs):
                if rule.input_moves[k] == MOVE_RIGHT and not outcome.advanced[k]:
                    log.append(Event(tick, "read-blank", mid, {"tape": k}))
            if outcome.halted:
                log.append(Event(tick, "halt", mid, {}))
            if any(sym is not None for sym in outcome.emissions):
                emissions[mid] = outcome.emissions
        routed = route(network, emissions)
        for mid, port, kind, dest, sym in routed.ordered:
            if kind == "tape":
                states[dest.machine].deliver(dest.index, sym)
                log.append(Event(tick, "route", mid, {
                    "port": port, "to_machine": dest.machine,
                    "to_tape": dest.index, "symbol": sym}))
            else:
                sinks[dest].append((tick, sym))
                log.append(Event(tick, "route", mid, {
                    "port": port, "sink": dest, "symbol": sym}))
        tick += 1

    log.end_reason = reason
    final = {mid: st.snapshot() for mid, st in states.items()}
    return RunResult(final=final, sinks=sinks, log=log, halt_reason=reason)
