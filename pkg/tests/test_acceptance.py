"""Acceptance gate: the binding behavioral criteria, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every verdict
line; under plain ``pytest`` the lines are shown only for failures.
"""

import random
import warnings
from time import perf_counter

from tmnet import (
    BLANK,
    ClockConfig,
    ExternalSink,
    InputTape,
    MachineSpec,
    Network,
    WILDCARD,
    build_graph,
    check_awareness,
    check_effective,
    pair_network,
    parse,
    product_network,
    refine_check,
    run,
    run_reference,
    run_with_trace,
)
from tmnet.cli import main as cli_main
from tmnet.context import encode_trace, prepare_network
from tmnet.fileio import load_mapping, load_network, load_trace
from tmnet.machine import MOVE_RIGHT, make_rule

from helpers import (
    FIXTURES,
    producer_consumer_network,
    random_network,
    random_producer_consumer,
    random_speeds,
)


def verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" — {detail}"
    print(line, flush=True)
    assert ok, line


def free_runner(mid: str, symbol: str = "a") -> MachineSpec:
    """Machine that fires and emits on every due tick, forever."""
    alphabet = frozenset({BLANK, symbol})
    return MachineSpec(
        id=mid,
        states=frozenset({"q0", "hh"}),
        input_alphabet=alphabet,
        tape_alphabet=alphabet,
        num_inputs=0,
        num_outputs=1,
        rules=(
            make_rule("q0", WILDCARD, [], "q0", symbol, MOVE_RIGHT, [], [symbol]),
        ),
        start_state="q0",
        halt_state="hh",
    )


def test_criterion_1_model_corpus_counts():
    """Both bundled models parse to the documented element counts."""
    started = perf_counter()
    problems = []
    coarse = parse((FIXTURES / "model1.ctx").read_text(encoding="utf-8"))
    fine = parse((FIXTURES / "model2.ctx").read_text(encoding="utf-8"))
    if [d.num for d in coarse.procedures] != [1, 9]:
        problems.append("coarse procedure numbers")
    if len(coarse.procedures) != 2 or len(coarse.contexts) != 4:
        problems.append("coarse declaration counts")
    if len(coarse.connections) != 5:
        problems.append("coarse statement count")
    if len(build_graph(coarse).edges) != 8:
        problems.append("coarse edge count")
    if len(fine.procedures) != 8 or len(fine.contexts) != 4:
        problems.append("fine declaration counts")
    if len(fine.connections) != 12:
        problems.append("fine statement count")
    if len(build_graph(fine).edges) != 13:
        problems.append("fine edge count")
    elapsed = perf_counter() - started
    if elapsed >= 1.0:
        problems.append(f"too slow: {elapsed:.2f}s")
    verdict(
        "criterion 1: model corpus parses to 2/4/5->8 and 8/4/12->13",
        not problems,
        problems[0] if problems else f"{elapsed:.3f}s",
    )


def test_criterion_2_tape_discipline():
    """FIFO order, idempotent blank reads, monotone heads, at scale."""
    started = perf_counter()
    rng = random.Random(0x7A9E)
    rounds = 10_000
    problems = []
    for round_no in range(rounds):
        tape = InputTape()
        written = []
        consumed = 0
        for _ in range(rng.randint(0, 16)):
            if rng.random() < 0.5:
                sym = rng.choice("abc")
                tape.write(sym)
                written.append(sym)
            else:
                got = tape.read()
                if consumed < len(written):
                    if got != written[consumed]:
                        problems.append(f"round {round_no}: out of order")
                        break
                    consumed += 1
                elif got != BLANK:
                    problems.append(f"round {round_no}: frontier not blank")
                    break
            if not (0 <= tape.read_head <= tape.write_head):
                problems.append(f"round {round_no}: head order violated")
                break
            if tape.read_head != consumed or tape.write_head != len(written):
                problems.append(f"round {round_no}: head drift")
                break
        if problems:
            break
        tail = [tape.read() for _ in range(len(written) - consumed)]
        if tail != written[consumed:]:
            problems.append(f"round {round_no}: drained tail out of order")
            break
        before = tape.read_head
        if tape.read() != BLANK or tape.read_head != before:
            problems.append(f"round {round_no}: blank read moved the head")
            break
    elapsed = perf_counter() - started
    if not problems and elapsed >= 10.0:
        problems.append(f"too slow: {elapsed:.2f}s")
    verdict(
        "criterion 2: tape FIFO/idempotence/monotonicity over 10,000 interleavings",
        not problems,
        problems[0] if problems else f"{rounds} interleavings in {elapsed:.2f}s",
    )


def test_criterion_3_exact_speed_ratios():
    """Transition counts scale exactly with the configured clock speeds."""
    budget = 12
    problems = []
    for slow_speed, fast_speed in ((1, 1), (1, 2), (2, 3), (3, 5)):
        net = Network(
            machines={"b": free_runner("b"), "c": free_runner("c")},
            sinks={
                "sb": ExternalSink("sb", "b", 0),
                "sc": ExternalSink("sc", "c", 0),
            },
        )
        clocks = ClockConfig({"b": slow_speed, "c": fast_speed})
        result = run(net, clocks=clocks, budget=budget)
        counts = {mid: 0 for mid in net.machines}
        for event in result.log.events:
            if event.kind == "transition":
                counts[event.machine] += 1
        if counts["b"] * fast_speed != counts["c"] * slow_speed:
            problems.append(
                f"speeds {slow_speed}:{fast_speed} gave {counts['b']}:{counts['c']}")
        if counts["b"] != budget * slow_speed or counts["c"] != budget * fast_speed:
            problems.append(
                f"speeds {slow_speed}:{fast_speed} fired {counts}")
    verdict(
        "criterion 3: transition counts follow speeds 1:1, 1:2, 2:3, 3:5 exactly",
        not problems,
        problems[0] if problems else f"4 speed pairs over {budget} steps",
    )


def _runs_differ(net, clocks=None, sources=None, budget=20):
    fast = run(net, clocks=clocks, sources=sources, budget=budget)
    slow = run_reference(net, clocks=clocks, sources=sources, budget=budget)
    if fast.final != slow.final:
        return "final snapshots"
    if fast.sinks != slow.sinks:
        return "sink streams"
    if fast.halt_reason != slow.halt_reason:
        return "halt reason"
    if fast.log.to_jsonl() != slow.log.to_jsonl():
        return "event logs"
    return None


def test_criterion_4_engines_agree():
    """The optimized engine matches the reference on fixtures and 1,000 nets."""
    started = perf_counter()
    problems = []
    fixture_runs = [("hand chain", producer_consumer_network(), None, 20)]
    fixture_runs.append(
        ("simple", load_network(FIXTURES / "simple" / "network.json"), None, 30))
    for name in ("map_viewer", "redundancy"):
        net = load_network(FIXTURES / name / "network.json")
        trace = load_trace(FIXTURES / name / "trace.json")
        prepared = prepare_network(net, trace)
        fixture_runs.append(
            (name, prepared, encode_trace(trace, prepared), 40))
    for name, net, sources, budget in fixture_runs:
        differs = _runs_differ(net, sources=sources, budget=budget)
        if differs:
            problems.append(f"fixture {name}: {differs} differ")
    count = 1_000
    rng = random.Random(0xD1FF)
    for index in range(count):
        if problems:
            break
        net = random_network(rng)
        clocks = ClockConfig(random_speeds(rng, net)) if net.machines else None
        differs = _runs_differ(net, clocks=clocks, budget=rng.randint(0, 30))
        if differs:
            problems.append(f"random net {index}: {differs} differ")
    elapsed = perf_counter() - started
    if not problems and elapsed >= 60.0:
        problems.append(f"too slow: {elapsed:.2f}s")
    verdict(
        "criterion 4: optimized and reference runs agree field by field",
        not problems,
        problems[0] if problems else
        f"4 fixtures + {count} random networks in {elapsed:.1f}s",
    )


def test_criterion_5_product_machines_preserve_behavior():
    """Composed machines reproduce network sink streams exactly."""
    rng = random.Random(0xBEEF)
    count = 100
    problems = []
    for index in range(count):
        consumer, producer, wiring = random_producer_consumer(rng)
        budget = rng.randint(0, 12)
        pair = run(pair_network(consumer, producer, wiring), budget=budget)
        prod = run(product_network(consumer, producer, wiring), budget=budget)
        if pair.sinks != prod.sinks:
            problems.append(f"pair {index}: sink streams differ")
            break
    verdict(
        "criterion 5: 100 random compositions match their two-machine networks",
        not problems,
        problems[0] if problems else f"{count} pairs",
    )


def test_criterion_6_awareness_verdict_and_flip():
    """The bundled system is aware; starving one variable flips the verdict."""
    net = load_network(FIXTURES / "map_viewer" / "network.json")
    trace = load_trace(FIXTURES / "map_viewer" / "trace.json")
    problems = []
    full = check_awareness(net, run_with_trace(net, trace), trace)
    if not full.aware:
        problems.append("full run not aware")
    statuses = {s.status for s in full.statuses.values()}
    if len(full.statuses) != 4 or statuses != {"consumed-and-produced"}:
        problems.append("full run statuses")
    reduced_run = run_with_trace(
        net, trace, vectors=["user", "screen", "providers"])
    reduced = check_awareness(net, reduced_run, trace)
    if reduced.aware:
        problems.append("reduced run still aware")
    if reduced.statuses["location"].status != "unconsumed":
        problems.append("location not reported unconsumed")
    verdict(
        "criterion 6: aware on all four vectors; dropping (location) flips it",
        not problems,
        problems[0] if problems else "verdict flips as required",
    )


def test_criterion_7_effectiveness_scores():
    """Degenerate subsets score exactly 1.0; redundancy stays above 0.8."""
    net = load_network(FIXTURES / "redundancy" / "network.json")
    trace = load_trace(FIXTURES / "redundancy" / "trace.json")
    problems = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        degenerate = check_effective(net, trace, subset=list(trace.c_a))
    if degenerate.aggregate != 1.0:
        problems.append(f"degenerate scored {degenerate.aggregate!r}")
    if not degenerate.degenerate:
        problems.append("degenerate subset not flagged")
    reduced = check_effective(net, trace, subset=["r1"])
    if reduced.aggregate < 0.8:
        problems.append(f"reduced scored {reduced.aggregate:.4f} < 0.8")
    if not reduced.similar:
        problems.append("reduced subset judged dissimilar")
    if reduced.degenerate:
        problems.append("reduced subset wrongly flagged degenerate")
    verdict(
        "criterion 7: degenerate subset scores 1.0; one-vector drop stays >= 0.8",
        not problems,
        problems[0] if problems else
        f"degenerate 1.0, reduced {reduced.aggregate:.4f}",
    )


def test_criterion_8_deterministic_logs(tmp_path, capsys):
    """Two identical simulate invocations write byte-identical logs."""
    network = str(FIXTURES / "simple" / "network.json")
    first, second = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
    problems = []
    for target in (first, second):
        if cli_main(["simulate", network, "--steps", "8",
                     "--log", str(target)]) != 0:
            problems.append("simulate exited nonzero")
    capsys.readouterr()
    bytes_one, bytes_two = first.read_bytes(), second.read_bytes()
    if bytes_one != bytes_two:
        problems.append("logs differ between invocations")
    if not bytes_one:
        problems.append("log file is empty")
    verdict(
        "criterion 8: repeated simulate runs write byte-identical logs",
        not problems,
        problems[0] if problems else f"{len(bytes_one)} bytes each",
    )


def test_criterion_9_refinement_of_bundled_models():
    """The fine model realizes every coarse edge with nothing extraneous."""
    coarse = build_graph(
        parse((FIXTURES / "model1.ctx").read_text(encoding="utf-8")))
    fine = build_graph(
        parse((FIXTURES / "model2.ctx").read_text(encoding="utf-8")))
    mapping = load_mapping(FIXTURES / "mappings" / "model1_to_model2.json")
    report = refine_check(coarse, fine, mapping)
    problems = []
    if len(coarse.edges) != 8:
        problems.append("coarse model does not have 8 edges")
    if set(report.realized) != set(coarse.edges):
        problems.append("not every coarse edge is realized")
    if report.unrealized:
        problems.append(f"unrealized: {report.unrealized}")
    if report.extraneous:
        problems.append(f"extraneous: {report.extraneous}")
    if not report.ok:
        problems.append("refinement verdict negative")
    verdict(
        "criterion 9: all 8 coarse edges realized with zero extraneous edges",
        not problems,
        problems[0] if problems else
        f"{len(report.realized)} realized, {len(report.internal)} internal",
    )
