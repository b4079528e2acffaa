"""Networks of communicating Turing machines.

Machines own working tapes, consume one-way input tapes their peers append
to, and emit through output ports. A deterministic micro-tick scheduler
runs whole networks with per-machine clock speeds and external context
sources, and checkers judge context-awareness properties of a network
against a trace. A small modeling language describes systems abstractly
and exports their graphs.
"""

from .context import (
    AwarenessReport,
    ContextTrace,
    ContextVariable,
    EffectivenessReport,
    EncodingConfig,
    EvaluationVector,
    check_awareness,
    check_effective,
    encode_trace,
    run_with_trace,
)
from .errors import TmnetError
from .machine import (
    BLANK,
    WILDCARD,
    InputTape,
    MachineSpec,
    MachineState,
    TransitionRule,
    WorkTape,
    find_rule,
    make_rule,
)
from .modeldsl import (
    Graph,
    SystemModel,
    build_graph,
    parse,
    pretty,
    refine_check,
    validate_model,
)
from .network import (
    Connection,
    ExternalSink,
    ExternalSource,
    Network,
    PortRef,
    add_source,
    route,
    validate_network,
    wire,
)
from .product import compose_product, empty_producer, pair_network, product_network
from .reference import run_reference
from .scheduler import (
    ALL_HALTED,
    BUDGET_EXHAUSTED,
    DEFAULT_BUDGET,
    QUIESCENT,
    ClockConfig,
    Event,
    EventLog,
    RunResult,
    replay,
    run,
    sink_streams,
)
from .similarity import (
    SimilarityConfig,
    edit_similarity,
    get_metric,
    levenshtein,
    register_metric,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_HALTED",
    "AwarenessReport",
    "BLANK",
    "BUDGET_EXHAUSTED",
    "ClockConfig",
    "Connection",
    "ContextTrace",
    "ContextVariable",
    "DEFAULT_BUDGET",
    "EffectivenessReport",
    "EncodingConfig",
    "EvaluationVector",
    "Event",
    "EventLog",
    "ExternalSink",
    "ExternalSource",
    "Graph",
    "InputTape",
    "MachineSpec",
    "MachineState",
    "Network",
    "PortRef",
    "QUIESCENT",
    "RunResult",
    "SimilarityConfig",
    "SystemModel",
    "TmnetError",
    "TransitionRule",
    "WILDCARD",
    "WorkTape",
    "add_source",
    "build_graph",
    "check_awareness",
    "check_effective",
    "compose_product",
    "edit_similarity",
    "empty_producer",
    "encode_trace",
    "find_rule",
    "get_metric",
    "levenshtein",
    "make_rule",
    "pair_network",
    "parse",
    "pretty",
    "product_network",
    "refine_check",
    "register_metric",
    "replay",
    "route",
    "run",
    "run_reference",
    "run_with_trace",
    "sink_streams",
    "validate_model",
    "validate_network",
    "wire",
]
