"""Readers and writers for the on-disk JSON formats.

Machines, networks, and traces each have a documented JSON shape (see
docs/formats.md). Network files may reference machine files by relative
path. Port references are written "machineId.portIndex" throughout.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

from .context import ContextTrace, ContextVariable, EvaluationVector
from .machine import MachineSpec, TransitionRule, make_rule
from .network import (
    Connection,
    ExternalSink,
    ExternalSource,
    Network,
    PortRef,
)
from .scheduler import EventLog

Pathish = Union[str, Path]


def machine_from_dict(obj: Mapping) -> MachineSpec:
    """Build a MachineSpec from its JSON object form."""
    num_work = int(obj.get("num_work_tapes", 1))
    rules = []
    for r in obj.get("rules", ()):
        rules.append(make_rule(
            state=r["state"],
            work=r["work"] if num_work == 1 else tuple(r["work"]),
            inputs=tuple(r.get("inputs", ())),
            next_state=r["next"],
            write=r["write"] if num_work == 1 else tuple(r["write"]),
            move=r["move"] if num_work == 1 else tuple(r["move"]),
            input_moves=tuple(r.get("input_moves", ())),
            outputs=tuple(r.get("outputs", ())),
        ))
    return MachineSpec(
        id=obj["id"],
        states=frozenset(obj["states"]),
        input_alphabet=frozenset(obj["input_alphabet"]),
        tape_alphabet=frozenset(obj["tape_alphabet"]),
        num_inputs=int(obj["num_inputs"]),
        num_outputs=int(obj["num_outputs"]),
        rules=tuple(rules),
        start_state=obj["start"],
        halt_state=obj["halt"],
        speed=int(obj.get("speed", 1)),
        num_work_tapes=num_work,
    )


def machine_to_dict(spec: MachineSpec) -> dict:
    """Inverse of machine_from_dict; single-work-tape fields stay scalar."""
    scalar = spec.num_work_tapes == 1

    def work_field(values):
        return values[0] if scalar else list(values)

    obj = {
        "id": spec.id,
        "states": sorted(spec.states),
        "input_alphabet": sorted(spec.input_alphabet),
        "tape_alphabet": sorted(spec.tape_alphabet),
        "num_inputs": spec.num_inputs,
        "num_outputs": spec.num_outputs,
        "start": spec.start_state,
        "halt": spec.halt_state,
        "speed": spec.speed,
        "rules": [
            {
                "state": rule.match_state,
                "work": work_field(rule.match_work),
                "inputs": list(rule.match_inputs),
                "next": rule.next_state,
                "write": work_field(rule.work_write),
                "move": work_field(rule.work_move),
                "input_moves": list(rule.input_moves),
                "outputs": list(rule.outputs),
            }
            for rule in spec.rules
        ],
    }
    if not scalar:
        obj["num_work_tapes"] = spec.num_work_tapes
    return obj


def load_machine(path: Pathish) -> MachineSpec:
    with open(path, encoding="utf-8") as fp:
        return machine_from_dict(json.load(fp))


def save_machine(spec: MachineSpec, path: Pathish) -> None:
    Path(path).write_text(
        json.dumps(machine_to_dict(spec), indent=2, sort_keys=False) + "\n",
        encoding="utf-8",
    )


def network_from_dict(obj: Mapping, base: Optional[Path] = None) -> Network:
    """Build a Network; machine entries may be inline objects or paths."""
    machines: Dict[str, MachineSpec] = {}
    for entry in obj.get("machines", ()):
        if isinstance(entry, str):
            ref = Path(entry)
            if base is not None and not ref.is_absolute():
                ref = base / ref
            spec = load_machine(ref)
        else:
            spec = machine_from_dict(entry)
        if spec.id in machines:
            raise ValueError(f"machine id {spec.id!r} appears twice")
        machines[spec.id] = spec
    connections = tuple(
        Connection(PortRef.parse(c["from"]), PortRef.parse(c["to"]))
        for c in obj.get("connections", ())
    )
    sources = {}
    for s in obj.get("sources", ()):
        ref = PortRef.parse(s["to"])
        schedule = tuple((int(t), sym) for t, sym in s.get("schedule", ()))
        sources[s["id"]] = ExternalSource(s["id"], ref.machine, ref.index, schedule)
    sinks = {}
    for s in obj.get("sinks", ()):
        ref = PortRef.parse(s["from"])
        sinks[s["id"]] = ExternalSink(s["id"], ref.machine, ref.index)
    return Network(
        machines=machines, connections=connections, sources=sources, sinks=sinks
    )


def network_to_dict(network: Network) -> dict:
    """Inverse of network_from_dict with machines inlined."""
    obj = {
        "machines": [
            machine_to_dict(network.machines[mid])
            for mid in sorted(network.machines)
        ],
        "connections": [
            {"from": str(c.source), "to": str(c.dest)} for c in network.connections
        ],
    }
    if network.sources:
        obj["sources"] = [
            {
                "id": sid,
                "to": f"{src.machine}.{src.tape}",
                **({"schedule": [[t, sym] for t, sym in src.schedule]}
                   if src.schedule else {}),
            }
            for sid, src in sorted(network.sources.items())
        ]
    if network.sinks:
        obj["sinks"] = [
            {"id": sid, "from": f"{sink.machine}.{sink.port}"}
            for sid, sink in sorted(network.sinks.items())
        ]
    return obj


def load_network(path: Pathish) -> Network:
    path = Path(path)
    with open(path, encoding="utf-8") as fp:
        return network_from_dict(json.load(fp), base=path.parent)


def save_network(network: Network, path: Pathish) -> None:
    Path(path).write_text(
        json.dumps(network_to_dict(network), indent=2) + "\n", encoding="utf-8"
    )


def trace_from_dict(obj: Mapping) -> ContextTrace:
    variables = {
        v["id"]: ContextVariable(v["id"], v.get("description", ""))
        for v in obj.get("variables", ())
    }
    vectors = {
        v["var"]: EvaluationVector(
            v["var"], tuple((int(t), val) for t, val in v.get("evals", ()))
        )
        for v in obj.get("vectors", ())
    }
    bindings_in = {}
    for vid, target in obj.get("bindings_in", {}).items():
        ref = PortRef.parse(target)
        bindings_in[vid] = (ref.machine, ref.index)
    bindings_out = dict(obj.get("bindings_out", {}))
    return ContextTrace(
        variables=variables,
        vectors=vectors,
        c_a=tuple(obj.get("c_a", ())),
        bindings_in=bindings_in,
        bindings_out=bindings_out,
    )


def trace_to_dict(trace: ContextTrace) -> dict:
    return {
        "variables": [
            {"id": var.id, **({"description": var.description}
                              if var.description else {})}
            for _, var in sorted(trace.variables.items())
        ],
        "vectors": [
            {"var": vid, "evals": [[t, val] for t, val in vec.evals]}
            for vid, vec in sorted(trace.vectors.items())
        ],
        "c_a": list(trace.c_a),
        "bindings_in": {
            vid: f"{machine}.{tape}"
            for vid, (machine, tape) in sorted(trace.bindings_in.items())
        },
        "bindings_out": dict(sorted(trace.bindings_out.items())),
    }


def load_trace(path: Pathish) -> ContextTrace:
    with open(path, encoding="utf-8") as fp:
        return trace_from_dict(json.load(fp))


def save_trace(trace: ContextTrace, path: Pathish) -> None:
    Path(path).write_text(
        json.dumps(trace_to_dict(trace), indent=2) + "\n", encoding="utf-8"
    )


def load_mapping(path: Pathish) -> Dict[str, list]:
    """Refinement mapping: coarse procedure label to fine procedure labels."""
    with open(path, encoding="utf-8") as fp:
        obj = json.load(fp)
    if not isinstance(obj, dict):
        raise ValueError("mapping file must hold one JSON object")
    return {str(k): [str(x) for x in v] for k, v in obj.items()}


def load_log(path: Pathish) -> EventLog:
    return EventLog.from_jsonl(Path(path).read_text(encoding="utf-8"))


def save_log(log: EventLog, path: Pathish) -> None:
    Path(path).write_text(log.to_jsonl(), encoding="utf-8")
