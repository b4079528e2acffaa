"""Command-line interface.

Exit codes: 0 on success, 1 when the requested check finds problems (bad
documents, failed validation, negative verdicts, mismatched logs), 2 for
usage and I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .context import check_awareness, check_effective, run_with_trace
from .errors import TmnetError
from .export import RenderConfig, to_dot, to_tree
from .modeldsl import build_graph, parse as parse_model, pretty, refine_check, validate_model
from .scheduler import DEFAULT_BUDGET, ClockConfig, replay, run, sink_streams
from .similarity import SimilarityConfig

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


def _parse_speeds(text: str) -> dict:
    speeds = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        mid, sep, value = part.partition("=")
        if not sep or not value.strip().isdigit():
            raise ValueError(f"bad --speeds entry {part!r}; expected machine=integer")
        speeds[mid.strip()] = int(value)
    return speeds


def _read_model(path: str):
    return parse_model(Path(path).read_text(encoding="utf-8"))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_parse(args) -> int:
    model = _read_model(args.model)
    _emit(pretty(model), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    model = _read_model(args.model)
    report = validate_model(model)
    if report.ok:
        print("model is valid")
        return EXIT_OK
    for finding in report.findings:
        where = f" (line {finding.line})" if finding.line else ""
        print(f"{finding.kind}: {finding.message}{where}")
    return EXIT_FINDINGS


def cmd_graph(args) -> int:
    model = _read_model(args.model)
    graph = build_graph(model, include_isolated=args.include_isolated)
    if args.format == "dot":
        _emit(to_dot(graph, RenderConfig(graph_name=args.name)), args.output)
    else:
        _emit(json.dumps(to_tree(graph), indent=2) + "\n", args.output)
    return EXIT_OK


def _run_from_args(args):
    network = fileio.load_network(args.network)
    clocks = None
    if args.speeds:
        clocks = ClockConfig.from_network(network, _parse_speeds(args.speeds))
    if getattr(args, "trace", None):
        trace = fileio.load_trace(args.trace)
        result = run_with_trace(network, trace, clocks=clocks, budget=args.steps)
        return network, trace, result
    return network, None, run(network, clocks=clocks, budget=args.steps)


def _print_run_summary(result) -> None:
    print(f"halt reason: {result.halt_reason}")
    for mid in sorted(result.final):
        snap = result.final[mid]
        flag = " (halted)" if snap.halted else ""
        print(f"  {mid}: state={snap.state}{flag} transitions={snap.transitions}")
    for sid, stream in sorted(sink_streams(result).items()):
        print(f"  sink {sid}: {''.join(stream) if stream else '(empty)'}")
    print(f"events logged: {len(result.log)}")


def cmd_simulate(args) -> int:
    _, _, result = _run_from_args(args)
    if args.log:
        fileio.save_log(result.log, args.log)
    if args.json:
        print(json.dumps(to_tree(result), indent=2))
    else:
        _print_run_summary(result)
    return EXIT_OK


def cmd_replay(args) -> int:
    network = fileio.load_network(args.network)
    log = fileio.load_log(args.log)
    result = replay(log, network)
    if args.json:
        print(json.dumps(to_tree(result), indent=2))
    else:
        _print_run_summary(result)
    return EXIT_OK


def cmd_check_awareness(args) -> int:
    network = fileio.load_network(args.network)
    trace = fileio.load_trace(args.trace)
    clocks = None
    if args.speeds:
        clocks = ClockConfig.from_network(network, _parse_speeds(args.speeds))
    result = run_with_trace(network, trace, clocks=clocks, budget=args.steps)
    report = check_awareness(network, result, trace)
    if args.json:
        print(json.dumps(to_tree(report), indent=2))
    else:
        header = f"{'vector':<16} {'status':<24} {'read':>6} {'expected':>9}"
        print(header)
        print("-" * len(header))
        for vid in trace.c_a:
            s = report.statuses[vid]
            print(f"{vid:<16} {s.status:<24} {s.read:>6} {s.expected:>9}")
        if report.vacuous:
            print("active set is empty: vacuously not aware")
        print(f"aware: {'yes' if report.aware else 'no'}")
    return EXIT_OK if report.aware else EXIT_FINDINGS


def cmd_check_effective(args) -> int:
    network = fileio.load_network(args.network)
    trace = fileio.load_trace(args.trace)
    if args.keep is not None and args.drop is not None:
        raise ValueError("use either --keep or --drop, not both")
    if args.keep is not None:
        subset = [v for v in args.keep.split(",") if v]
    elif args.drop is not None:
        dropped = {v for v in args.drop.split(",") if v}
        subset = [v for v in trace.c_a if v not in dropped]
    else:
        subset = list(trace.c_a)
    clocks = None
    if args.speeds:
        clocks = ClockConfig.from_network(network, _parse_speeds(args.speeds))
    report = check_effective(
        network, trace, subset,
        clocks=clocks, budget=args.steps,
        similarity=SimilarityConfig(metric=args.metric, threshold=args.threshold),
    )
    if args.json:
        print(json.dumps(to_tree(report), indent=2))
    else:
        print(f"dropped vectors: {', '.join(report.dropped) or '(none)'}")
        for sid in sorted(report.per_sink):
            print(f"  sink {sid}: similarity {report.per_sink[sid]:.4f}")
        print(f"aggregate similarity: {report.aggregate:.4f} "
              f"(threshold {report.threshold})")
        if report.degenerate:
            print("note: subset equals the active set")
        print(f"effectively aware: {'yes' if report.similar else 'no'}")
    return EXIT_OK if report.similar else EXIT_FINDINGS


def cmd_refine(args) -> int:
    coarse = build_graph(_read_model(args.coarse))
    fine = build_graph(_read_model(args.fine))
    mapping = fileio.load_mapping(args.mapping)
    report = refine_check(coarse, fine, mapping)
    if args.json:
        obj = {
            "realized": {f"{a}->{b}": [f"{x}->{y}" for x, y in wits]
                         for (a, b), wits in sorted(report.realized.items())},
            "unrealized": [f"{a}->{b}" for a, b in report.unrealized],
            "internal": [f"{a}->{b}" for a, b in report.internal],
            "extraneous": [f"{a}->{b}" for a, b in report.extraneous],
            "ok": report.ok,
        }
        print(json.dumps(obj, indent=2))
    else:
        print(f"realized: {len(report.realized)} coarse edge(s)")
        for a, b in report.unrealized:
            print(f"  unrealized: {a} -> {b}")
        for a, b in report.extraneous:
            print(f"  extraneous: {a} -> {b}")
        print(f"internal fine edges: {len(report.internal)}")
        print(f"refinement holds: {'yes' if report.ok else 'no'}")
    return EXIT_OK if report.ok else EXIT_FINDINGS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmnet",
        description="Simulate networks of communicating Turing machines and "
                    "check context-awareness properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a model and print its canonical form")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("validate", help="report semantic findings in a model")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("graph", help="export a model's graph")
    p.add_argument("model")
    p.add_argument("--format", choices=("dot", "tree"), default="dot")
    p.add_argument("--name", default="model", help="graph name for DOT output")
    p.add_argument("--include-isolated", action="store_true",
                   help="keep declared nodes that no edge touches")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("simulate", help="run a network")
    p.add_argument("network")
    p.add_argument("--steps", type=int, default=DEFAULT_BUDGET,
                   help="global step budget")
    p.add_argument("--speeds", help="per-machine speeds, e.g. m0=1,m1=2")
    p.add_argument("--trace", help="context trace to encode and inject")
    p.add_argument("--log", help="write the event log to this JSONL file")
    p.add_argument("--json", action="store_true", help="print the full result tree")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="verify a log against a network")
    p.add_argument("network")
    p.add_argument("log")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("check-awareness", help="run a trace and judge awareness")
    p.add_argument("network")
    p.add_argument("trace")
    p.add_argument("--steps", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--speeds")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_awareness)

    p = sub.add_parser("check-effective",
                       help="compare sink behavior for a reduced active set")
    p.add_argument("network")
    p.add_argument("trace")
    p.add_argument("--keep", help="comma-separated vectors to keep")
    p.add_argument("--drop", help="comma-separated vectors to drop")
    p.add_argument("--metric", default="edit")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--steps", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--speeds")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_effective)

    p = sub.add_parser("refine", help="check a fine model against a coarse one")
    p.add_argument("coarse")
    p.add_argument("fine")
    p.add_argument("mapping")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_refine)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TmnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
