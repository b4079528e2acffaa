"""Parser, validator, and graph builder for the system-modeling language.

A model document has sections introduced by ``abstract.``, ``procedures.``,
``context.``, ``connections.``, and ``graph.`` headers. Procedures are
declared as ``<number> : [label]``, context elements as ``<letters> :
(label)``. Connection statements join two bracketed endpoints with an
arrow (Unicode or ASCII), optionally prefixed by connectivity clauses like
``con(a,b) /\\ con(b,a) :``. ``//`` starts a comment; a standalone comment
line attaches to the declaration above it. Graph section content is kept
verbatim and never interpreted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import (
    DuplicateLabel,
    IncompleteMapping,
    InvalidModel,
    ModelSyntaxError,
    UnknownSection,
)

ARROW_RIGHT = "->"
ARROW_BOTH = "<->"
ARROW_LEFT = "<-"

_ARROW_CANON = {
    "→": ARROW_RIGHT,
    "↔": ARROW_BOTH,
    "←": ARROW_LEFT,
    "->": ARROW_RIGHT,
    "<->": ARROW_BOTH,
    "<-": ARROW_LEFT,
}
_ARROW_PRETTY = {ARROW_RIGHT: "→", ARROW_BOTH: "↔", ARROW_LEFT: "←"}

_SECTIONS = ("abstract", "procedures", "context", "connections", "graph", "graphs")

_HEADER_RE = re.compile(r"^([A-Za-z_]+)\.(?:\s+(.*))?$")
_PROC_RE = re.compile(r"^(\d+)\s*:\s*\[([A-Za-z0-9_]+)\]$")
_CTX_RE = re.compile(r"^([A-Za-z]+)\s*:\s*\(([A-Za-z0-9_]+)\)$")
_ENDPOINT_RE = r"(\[[A-Za-z0-9_]+\]|\([A-Za-z0-9_]+\))"
_STMT_RE = re.compile(
    rf"^{_ENDPOINT_RE}\s*(<->|->|<-|→|↔|←)\s*{_ENDPOINT_RE}$"
)
_CON_RE = re.compile(r"^con\(\s*([A-Za-z0-9_]+)\s*,\s*([A-Za-z0-9_]+)\s*\)$")
_CON_SPLIT_RE = re.compile(r"∧|/\\|&")

PROCEDURE = "procedure"
CONTEXT = "context"


@dataclass(frozen=True)
class ProcedureDecl:
    num: int
    label: str
    comment: str = ""
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ContextDecl:
    letter: str
    label: str
    comment: str = ""
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Endpoint:
    kind: str
    label: str

    @classmethod
    def parse(cls, text: str) -> "Endpoint":
        if text.startswith("["):
            return cls(PROCEDURE, text[1:-1])
        return cls(CONTEXT, text[1:-1])

    def __str__(self) -> str:
        if self.kind == PROCEDURE:
            return f"[{self.label}]"
        return f"({self.label})"


@dataclass(frozen=True)
class ConnectionStmt:
    left: Endpoint
    right: Endpoint
    arrow: str
    con_terms: tuple = ()
    comment: str = ""
    line: int = field(default=0, compare=False)

    def edges(self) -> tuple:
        """Directed (from_endpoint, to_endpoint) pairs this statement asserts."""
        if self.arrow == ARROW_RIGHT:
            return ((self.left, self.right),)
        if self.arrow == ARROW_LEFT:
            return ((self.right, self.left),)
        return ((self.left, self.right), (self.right, self.left))


@dataclass(frozen=True)
class SystemModel:
    abstract: str = ""
    procedures: tuple = ()
    contexts: tuple = ()
    connections: tuple = ()
    graph_lines: tuple = ()


def _strip_comment(line: str) -> Tuple[str, str]:
    head, sep, tail = line.partition("//")
    return head.strip(), tail.strip() if sep else ""


def parse(text: str) -> SystemModel:
    """Parse a model document; raises on syntax errors.

    Raises ModelSyntaxError for malformed lines, DuplicateLabel for a
    number, letter, or label declared twice in one section, and
    UnknownSection for an unrecognized section header.
    """
    abstract_parts: List[str] = []
    procedures: List[ProcedureDecl] = []
    contexts: List[ContextDecl] = []
    connections: List[ConnectionStmt] = []
    graph_lines: List[str] = []
    section = None
    seen_proc_nums: Dict[int, int] = {}
    seen_labels: Dict[str, Dict[str, int]] = {"procedures": {}, "context": {}}
    seen_letters: Dict[str, int] = {}

    def attach_comment(comment: str, lineno: int) -> None:
        if section == "procedures" and procedures:
            decl = procedures[-1]
            merged = f"{decl.comment} {comment}".strip()
            procedures[-1] = ProcedureDecl(decl.num, decl.label, merged, decl.line)
        elif section == "context" and contexts:
            decl = contexts[-1]
            merged = f"{decl.comment} {comment}".strip()
            contexts[-1] = ContextDecl(decl.letter, decl.label, merged, decl.line)
        elif section == "connections" and connections:
            stmt = connections[-1]
            merged = f"{stmt.comment} {comment}".strip()
            connections[-1] = ConnectionStmt(
                stmt.left, stmt.right, stmt.arrow, stmt.con_terms, merged, stmt.line
            )
        # a comment with nothing above it carries no declaration; drop it

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        header = _HEADER_RE.match(line)
        if header:
            word = header.group(1)
            if word in _SECTIONS:
                section = "graph" if word == "graphs" else word
                rest = header.group(2)
                if rest:
                    if section == "abstract":
                        abstract_parts.append(rest.strip())
                    elif section == "graph":
                        graph_lines.append(rest.strip())
                    else:
                        raise ModelSyntaxError(
                            f"{word}. header takes no trailing text", lineno
                        )
                continue
            if section not in ("abstract", "graph"):
                # free-text sections may contain sentence-like lines
                raise UnknownSection(f"line {lineno}: unknown section {word!r}")
        if section is None:
            raise ModelSyntaxError("expected a section header", lineno)
        if section == "abstract":
            abstract_parts.append(line)
            continue
        if section == "graph":
            graph_lines.append(line)
            continue
        body, comment = _strip_comment(line)
        if not body:
            attach_comment(comment, lineno)
            continue
        if section == "procedures":
            m = _PROC_RE.match(body)
            if not m:
                raise ModelSyntaxError(
                    f"expected '<number> : [label]', got {body!r}", lineno,
                    column=line.find(body) + 1,
                )
            num = int(m.group(1))
            label = m.group(2)
            if num in seen_proc_nums:
                raise DuplicateLabel(
                    f"line {lineno}: procedure number {num} already declared "
                    f"on line {seen_proc_nums[num]}"
                )
            if label in seen_labels["procedures"]:
                raise DuplicateLabel(
                    f"line {lineno}: procedure label {label!r} already declared "
                    f"on line {seen_labels['procedures'][label]}"
                )
            seen_proc_nums[num] = lineno
            seen_labels["procedures"][label] = lineno
            procedures.append(ProcedureDecl(num, label, comment, lineno))
        elif section == "context":
            m = _CTX_RE.match(body)
            if not m:
                raise ModelSyntaxError(
                    f"expected '<letters> : (label)', got {body!r}", lineno,
                    column=line.find(body) + 1,
                )
            letter = m.group(1)
            label = m.group(2)
            if letter in seen_letters:
                raise DuplicateLabel(
                    f"line {lineno}: context id {letter!r} already declared "
                    f"on line {seen_letters[letter]}"
                )
            if label in seen_labels["context"]:
                raise DuplicateLabel(
                    f"line {lineno}: context label {label!r} already declared "
                    f"on line {seen_labels['context'][label]}"
                )
            seen_letters[letter] = lineno
            seen_labels["context"][label] = lineno
            contexts.append(ContextDecl(letter, label, comment, lineno))
        elif section == "connections":
            con_terms: List[tuple] = []
            stmt_text = body
            if ":" in body:
                clause_text, stmt_text = body.split(":", 1)
                stmt_text = stmt_text.strip()
                for term in _CON_SPLIT_RE.split(clause_text):
                    term = term.strip()
                    cm = _CON_RE.match(term)
                    if not cm:
                        raise ModelSyntaxError(
                            f"bad connectivity clause {term!r}", lineno,
                        )
                    con_terms.append((cm.group(1), cm.group(2)))
            m = _STMT_RE.match(stmt_text)
            if not m:
                raise ModelSyntaxError(
                    f"expected '<endpoint> <arrow> <endpoint>', got {stmt_text!r}",
                    lineno,
                )
            connections.append(ConnectionStmt(
                left=Endpoint.parse(m.group(1)),
                right=Endpoint.parse(m.group(3)),
                arrow=_ARROW_CANON[m.group(2)],
                con_terms=tuple(con_terms),
                comment=comment,
                line=lineno,
            ))
    return SystemModel(
        abstract=" ".join(abstract_parts),
        procedures=tuple(procedures),
        contexts=tuple(contexts),
        connections=tuple(connections),
        graph_lines=tuple(graph_lines),
    )


def pretty(model: SystemModel) -> str:
    """Canonical text form; parsing it back yields an equal model."""
    lines: List[str] = []
    if model.abstract:
        lines.append(f"abstract. {model.abstract}")
        lines.append("")
    lines.append("procedures.")
    for decl in model.procedures:
        suffix = f" // {decl.comment}" if decl.comment else ""
        lines.append(f"{decl.num} : [{decl.label}]{suffix}")
    lines.append("")
    lines.append("context.")
    for decl in model.contexts:
        suffix = f" // {decl.comment}" if decl.comment else ""
        lines.append(f"{decl.letter} : ({decl.label}){suffix}")
    lines.append("")
    lines.append("connections.")
    for stmt in model.connections:
        prefix = ""
        if stmt.con_terms:
            clause = " ∧ ".join(f"con({a}, {b})" for a, b in stmt.con_terms)
            prefix = f"{clause} : "
        suffix = f" // {stmt.comment}" if stmt.comment else ""
        lines.append(
            f"{prefix}{stmt.left} {_ARROW_PRETTY[stmt.arrow]} {stmt.right}{suffix}"
        )
    if model.graph_lines:
        lines.append("")
        lines.append("graph.")
        lines.extend(model.graph_lines)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Finding:
    kind: str
    subject: str
    message: str
    line: int = 0


@dataclass(frozen=True)
class ModelReport:
    findings: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def summary(self) -> str:
        if self.ok:
            return "model is valid"
        lines = [f"{f.kind}: {f.message}" for f in self.findings]
        return f"{len(lines)} finding(s): " + " | ".join(lines)


def validate_model(model: SystemModel) -> ModelReport:
    """Semantic checks beyond syntax.

    Reports endpoints that were never declared, labels declared as both a
    procedure and a context element, connectivity clauses that contradict
    their arrow, connections between two context elements, and procedures
    that no connection touches.
    """
    findings: List[Finding] = []

    def add(kind, subject, message, line=0):
        findings.append(Finding(kind, subject, message, line))

    proc_labels = {d.label for d in model.procedures}
    ctx_labels = {d.label for d in model.contexts}
    for label in sorted(proc_labels & ctx_labels):
        add("duplicate-declaration", label,
            f"{label!r} is declared as both a procedure and a context element")
    connected = set()
    for stmt in model.connections:
        for side in (stmt.left, stmt.right):
            declared = proc_labels if side.kind == PROCEDURE else ctx_labels
            if side.label not in declared:
                add("undeclared-label", side.label,
                    f"{side} is not declared", stmt.line)
            if side.kind == PROCEDURE:
                connected.add(side.label)
        if stmt.left.kind == CONTEXT and stmt.right.kind == CONTEXT:
            add("context-to-context", str(stmt.left),
                f"{stmt.left} {_ARROW_PRETTY[stmt.arrow]} {stmt.right} joins two "
                "context elements; every connection needs a procedure",
                stmt.line)
        if stmt.con_terms:
            required = {(f.label, t.label) for f, t in stmt.edges()}
            given = set(stmt.con_terms)
            if given != required:
                add("con-mismatch", str(stmt.left),
                    f"clauses {sorted(given)} do not match the arrow, "
                    f"which needs {sorted(required)}", stmt.line)
    for decl in model.procedures:
        if decl.label not in connected:
            add("never-connected", decl.label,
                f"procedure [{decl.label}] appears in no connection", decl.line)
    return ModelReport(tuple(findings))


@dataclass(frozen=True)
class GraphNode:
    kind: str
    key: str
    label: str


@dataclass(frozen=True)
class Graph:
    """Directed graph over declared labels, deterministically ordered."""

    nodes: tuple
    edges: tuple

    def node_labels(self) -> list:
        return [n.label for n in self.nodes]


def build_graph(model: SystemModel, include_isolated: bool = False) -> Graph:
    """Expand connection statements into a directed graph.

    Two-headed arrows become two directed edges; duplicates collapse.
    Nodes are ordered procedures first (by number), then context elements
    (by letter). Declared nodes that no edge touches are dropped unless
    ``include_isolated`` is set. Raises InvalidModel when validation found
    anything.
    """
    report = validate_model(model)
    if not report.ok:
        raise InvalidModel(report)
    order: List[GraphNode] = []
    for decl in sorted(model.procedures, key=lambda d: d.num):
        order.append(GraphNode(PROCEDURE, str(decl.num), decl.label))
    for decl in sorted(model.contexts, key=lambda d: d.letter):
        order.append(GraphNode(CONTEXT, decl.letter, decl.label))
    index = {node.label: i for i, node in enumerate(order)}
    edge_set = set()
    for stmt in model.connections:
        for f, t in stmt.edges():
            edge_set.add((f.label, t.label))
    if include_isolated:
        nodes = list(order)
    else:
        touched = {lab for edge in edge_set for lab in edge}
        nodes = [n for n in order if n.label in touched]
    edges = sorted(edge_set, key=lambda e: (index[e[0]], index[e[1]]))
    return Graph(nodes=tuple(nodes), edges=tuple(edges))


@dataclass(frozen=True)
class RefinementReport:
    """How fine-model edges account for coarse-model edges."""

    realized: Mapping[tuple, tuple]
    unrealized: tuple
    internal: tuple
    extraneous: tuple

    def __post_init__(self):
        object.__setattr__(self, "realized", dict(self.realized))

    @property
    def ok(self) -> bool:
        return not self.unrealized and not self.extraneous


def refine_check(
    coarse: Graph, fine: Graph, mapping: Mapping[str, Iterable[str]]
) -> RefinementReport:
    """Check that the fine graph refines the coarse one under a mapping.

    ``mapping`` partitions fine procedures into groups named by coarse
    procedures; context elements correspond by label. A coarse edge is
    realized when some fine edge projects onto it; a fine edge between two
    members of one group is internal; a fine edge projecting onto a
    missing coarse edge is extraneous. Raises IncompleteMapping when the
    mapping is not a bijection-of-groups over the procedure sets.
    """
    coarse_procs = {n.label for n in coarse.nodes if n.kind == PROCEDURE}
    fine_procs = {n.label for n in fine.nodes if n.kind == PROCEDURE}
    groups = {c: frozenset(members) for c, members in mapping.items()}
    unknown = set(groups) - coarse_procs
    if unknown:
        raise IncompleteMapping(f"mapping names unknown coarse procedures {sorted(unknown)}")
    missing = coarse_procs - set(groups)
    if missing:
        raise IncompleteMapping(f"mapping misses coarse procedures {sorted(missing)}")
    assigned: Dict[str, str] = {}
    for cname, members in sorted(groups.items()):
        for member in members:
            if member not in fine_procs:
                raise IncompleteMapping(
                    f"group {cname!r} names unknown fine procedure {member!r}"
                )
            if member in assigned:
                raise IncompleteMapping(
                    f"fine procedure {member!r} assigned to both "
                    f"{assigned[member]!r} and {cname!r}"
                )
            assigned[member] = cname
    unassigned = fine_procs - set(assigned)
    if unassigned:
        raise IncompleteMapping(f"mapping misses fine procedures {sorted(unassigned)}")

    def project(label: str) -> str:
        return assigned.get(label, label)

    coarse_edges = set(coarse.edges)
    realized: Dict[tuple, list] = {}
    internal = []
    extraneous = []
    for edge in fine.edges:
        image = (project(edge[0]), project(edge[1]))
        if image[0] == image[1]:
            internal.append(edge)
        elif image in coarse_edges:
            realized.setdefault(image, []).append(edge)
        else:
            extraneous.append(edge)
    unrealized = tuple(e for e in coarse.edges if e not in realized)
    return RefinementReport(
        realized={img: tuple(wits) for img, wits in realized.items()},
        unrealized=unrealized,
        internal=tuple(internal),
        extraneous=tuple(extraneous),
    )
