"""Exports: DOT rendering, a minimal DOT reader, and tree serialization.

Graphs render with procedures as boxes and context elements as ellipses.
to_tree/from_tree convert graphs, run results, and reports to and from
JSON-compatible dictionaries with a schema version; the round trip is the
identity. Output is deterministic byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Mapping

from .context import AwarenessReport, EffectivenessReport, VectorStatus
from .machine import MachineSnapshot
from .modeldsl import CONTEXT, PROCEDURE, Graph, GraphNode
from .scheduler import Event, EventLog, RunResult

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RenderConfig:
    graph_name: str = "model"
    procedure_shape: str = "box"
    context_shape: str = "ellipse"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: Graph, config: RenderConfig = RenderConfig()) -> str:
    """Render a graph as DOT text, one node or edge statement per line."""
    lines = [f"digraph {_quote(config.graph_name)} {{"]
    for node in graph.nodes:
        shape = (
            config.procedure_shape if node.kind == PROCEDURE else config.context_shape
        )
        label = f"{node.key} : {node.label}"
        lines.append(
            f"    {_quote(node.label)} [label={_quote(label)}, shape={shape}];"
        )
    for src, dst in graph.edges:
        lines.append(f"    {_quote(src)} -> {_quote(dst)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ParsedDot:
    name: str
    nodes: Mapping[str, Mapping[str, str]]
    edges: tuple


_DOT_HEADER_RE = re.compile(r'^digraph\s+(?:"((?:[^"\\]|\\.)*)"|(\w+))\s*\{$')
_DOT_NODE_RE = re.compile(
    r'^(?:"((?:[^"\\]|\\.)*)"|(\w+))\s*\[(.*)\];$'
)
_DOT_EDGE_RE = re.compile(
    r'^(?:"((?:[^"\\]|\\.)*)"|(\w+))\s*->\s*(?:"((?:[^"\\]|\\.)*)"|(\w+))\s*;$'
)
_DOT_ATTR_RE = re.compile(r'(\w+)=(?:"((?:[^"\\]|\\.)*)"|(\w+))')


def _unescape(text: str) -> str:
    return text.replace('\\"', '"').replace("\\\\", "\\")


def parse_dot(text: str) -> ParsedDot:
    """Read the subset of DOT that to_dot emits; rejects anything else."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty document")
    m = _DOT_HEADER_RE.match(lines[0])
    if not m:
        raise ValueError(f"not a digraph header: {lines[0]!r}")
    name = _unescape(m.group(1)) if m.group(1) is not None else m.group(2)
    if lines[-1] != "}":
        raise ValueError("missing closing brace")
    nodes: Dict[str, Dict[str, str]] = {}
    edges: List[tuple] = []
    for ln in lines[1:-1]:
        em = _DOT_EDGE_RE.match(ln)
        if em:
            src = _unescape(em.group(1)) if em.group(1) is not None else em.group(2)
            dst = _unescape(em.group(3)) if em.group(3) is not None else em.group(4)
            edges.append((src, dst))
            continue
        nm = _DOT_NODE_RE.match(ln)
        if nm:
            node = _unescape(nm.group(1)) if nm.group(1) is not None else nm.group(2)
            attrs = {}
            for am in _DOT_ATTR_RE.finditer(nm.group(3)):
                value = (
                    _unescape(am.group(2)) if am.group(2) is not None else am.group(3)
                )
                attrs[am.group(1)] = value
            nodes[node] = attrs
            continue
        raise ValueError(f"unparseable statement: {ln!r}")
    return ParsedDot(name=name, nodes=nodes, edges=tuple(edges))


def to_tree(obj) -> dict:
    """JSON-compatible tree for a graph, run result, or report."""
    if isinstance(obj, Graph):
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "graph",
            "nodes": [
                {"kind": n.kind, "key": n.key, "label": n.label} for n in obj.nodes
            ],
            "edges": [[src, dst] for src, dst in obj.edges],
        }
    if isinstance(obj, RunResult):
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "run-result",
            "halt_reason": obj.halt_reason,
            "final": {
                mid: {
                    "state": snap.state,
                    "halted": snap.halted,
                    "transitions": snap.transitions,
                    "work_tapes": [
                        {"cells": list(cells), "head": head}
                        for cells, head in snap.work_tapes
                    ],
                    "input_tapes": [
                        {"cells": list(cells), "read_head": head}
                        for cells, head in snap.input_tapes
                    ],
                }
                for mid, snap in sorted(obj.final.items())
            },
            "sinks": {
                sid: [[tick, sym] for tick, sym in pairs]
                for sid, pairs in sorted(obj.sinks.items())
            },
            "log": {
                "meta": obj.log.meta,
                "events": [e.to_json_obj() for e in obj.log.events],
                "end_reason": obj.log.end_reason,
            },
        }
    if isinstance(obj, AwarenessReport):
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "awareness-report",
            "aware": obj.aware,
            "vacuous": obj.vacuous,
            "statuses": {
                vid: {
                    "status": s.status,
                    "expected": s.expected,
                    "read": s.read,
                    "completed_tick": s.completed_tick,
                    "produced_tick": s.produced_tick,
                }
                for vid, s in sorted(obj.statuses.items())
            },
        }
    if isinstance(obj, EffectivenessReport):
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "effectiveness-report",
            "metric": obj.metric,
            "threshold": obj.threshold,
            "aggregate": obj.aggregate,
            "per_sink": dict(sorted(obj.per_sink.items())),
            "similar": obj.similar,
            "degenerate": obj.degenerate,
            "dropped": list(obj.dropped),
            "full_streams": {k: list(v) for k, v in sorted(obj.full_streams.items())},
            "subset_streams": {
                k: list(v) for k, v in sorted(obj.subset_streams.items())
            },
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_tree(tree: Mapping):
    """Inverse of to_tree; dispatches on the tree's type field."""
    version = tree.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version!r}")
    kind = tree.get("type")
    if kind == "graph":
        return Graph(
            nodes=tuple(
                GraphNode(n["kind"], n["key"], n["label"]) for n in tree["nodes"]
            ),
            edges=tuple((src, dst) for src, dst in tree["edges"]),
        )
    if kind == "run-result":
        final = {}
        for mid, snap in tree["final"].items():
            final[mid] = MachineSnapshot(
                state=snap["state"],
                halted=snap["halted"],
                transitions=snap["transitions"],
                work_tapes=tuple(
                    (tuple(t["cells"]), t["head"]) for t in snap["work_tapes"]
                ),
                input_tapes=tuple(
                    (tuple(t["cells"]), t["read_head"]) for t in snap["input_tapes"]
                ),
            )
        log = EventLog(
            tree["log"]["meta"],
            [Event.from_json_obj(e) for e in tree["log"]["events"]],
            tree["log"]["end_reason"],
        )
        sinks = {
            sid: [(tick, sym) for tick, sym in pairs]
            for sid, pairs in tree["sinks"].items()
        }
        return RunResult(
            final=final, sinks=sinks, log=log, halt_reason=tree["halt_reason"]
        )
    if kind == "awareness-report":
        statuses = {
            vid: VectorStatus(
                vector=vid,
                status=s["status"],
                expected=s["expected"],
                read=s["read"],
                completed_tick=s["completed_tick"],
                produced_tick=s["produced_tick"],
            )
            for vid, s in tree["statuses"].items()
        }
        return AwarenessReport(
            aware=tree["aware"], vacuous=tree["vacuous"], statuses=statuses
        )
    if kind == "effectiveness-report":
        return EffectivenessReport(
            metric=tree["metric"],
            threshold=tree["threshold"],
            aggregate=tree["aggregate"],
            per_sink=tree["per_sink"],
            similar=tree["similar"],
            degenerate=tree["degenerate"],
            dropped=tuple(tree["dropped"]),
            full_streams=tree["full_streams"],
            subset_streams=tree["subset_streams"],
        )
    raise ValueError(f"unknown tree type {kind!r}")
