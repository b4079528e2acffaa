#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure-Python fallbacks.

Times the two hot paths — the network stepping loop and the edit-distance
routine — on identical inputs and reports the speedup. Runs with the
fallback alone when the compiled extension is not built.

    python3 benchmarks/bench_kernels.py [--machines N] [--steps N]
                                        [--length N] [--repeat N]
"""

import argparse
import random
from time import perf_counter

from tmnet import BLANK, WILDCARD, ClockConfig
from tmnet.engine import _kernel_py
from tmnet.engine.encode import EncodedNetwork
from tmnet.machine import MOVE_RIGHT, MachineSpec, make_rule
from tmnet.network import Connection, ExternalSink, Network, PortRef

try:
    from tmnet.engine import _kernel as _compiled
except ImportError:
    _compiled = None

SYMBOLS = ("a", "b")
ALPHABET = frozenset({BLANK, *SYMBOLS})


def pulse(mid: str) -> MachineSpec:
    """Input-free machine that emits the two symbols alternately, forever."""
    rules = tuple(
        make_rule(f"p{i}", WILDCARD, [], f"p{(i + 1) % len(SYMBOLS)}",
                  sym, MOVE_RIGHT, [], [sym])
        for i, sym in enumerate(SYMBOLS)
    )
    return MachineSpec(
        id=mid,
        states=frozenset({f"p{i}" for i in range(len(SYMBOLS))} | {"hh"}),
        input_alphabet=ALPHABET,
        tape_alphabet=ALPHABET,
        num_inputs=0,
        num_outputs=1,
        rules=rules,
        start_state="p0",
        halt_state="hh",
    )


def forwarder(mid: str) -> MachineSpec:
    """Machine that copies every input symbol to its work tape and onward."""
    rules = tuple(
        make_rule("c0", WILDCARD, [sym], "c0", sym, MOVE_RIGHT,
                  [MOVE_RIGHT], [sym])
        for sym in SYMBOLS
    )
    return MachineSpec(
        id=mid,
        states=frozenset({"c0", "hh"}),
        input_alphabet=ALPHABET,
        tape_alphabet=ALPHABET,
        num_inputs=1,
        num_outputs=1,
        rules=rules,
        start_state="c0",
        halt_state="hh",
    )


def relay_chain(length: int) -> Network:
    """A pulse source feeding a chain of forwarders that ends in a sink."""
    machines = {"m0": pulse("m0")}
    connections = []
    for i in range(1, length):
        machines[f"m{i}"] = forwarder(f"m{i}")
        connections.append(
            Connection(PortRef(f"m{i - 1}", 0), PortRef(f"m{i}", 0)))
    last = f"m{length - 1}"
    return Network(
        machines=machines,
        connections=tuple(connections),
        sinks={"out": ExternalSink("out", last, 0)},
    )


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        started = perf_counter()
        fn()
        times.append(perf_counter() - started)
    return min(times)


def report(label: str, pure_seconds: float, compiled_seconds) -> None:
    print(f"  {'pure-python':<12} {pure_seconds:8.3f} s")
    if compiled_seconds is None:
        print(f"  {'compiled':<12} {'(not built)':>10}")
    else:
        ratio = pure_seconds / compiled_seconds if compiled_seconds else float("inf")
        print(f"  {'compiled':<12} {compiled_seconds:8.3f} s   ({ratio:.1f}x faster)")


def bench_stepping(machines: int, steps: int, repeat: int) -> None:
    net = relay_chain(machines)
    clocks = ClockConfig.from_network(net)
    enc = EncodedNetwork(net, clocks.speeds, clocks.micro_resolution, {})
    total_micro = steps * enc.micro_resolution
    print(f"stepping loop: {machines} machines x {steps} steps")
    if _compiled is not None:
        pure_out = _kernel_py.run_encoded(enc, total_micro)
        compiled_out = _compiled.run_encoded(enc, total_micro)
        assert list(pure_out[1]) == list(compiled_out[1]), \
            "kernels disagree; benchmark aborted"
    pure = best_of(lambda: _kernel_py.run_encoded(enc, total_micro), repeat)
    compiled = (
        best_of(lambda: _compiled.run_encoded(enc, total_micro), repeat)
        if _compiled is not None else None
    )
    report("stepping", pure, compiled)


def bench_levenshtein(length: int, repeat: int) -> None:
    rng = random.Random(0xD15C)
    left = [rng.randrange(16) for _ in range(length)]
    right = list(left)
    for _ in range(length // 10):
        right[rng.randrange(length)] = rng.randrange(16)
    print(f"edit distance: {length} x {length} tokens")
    if _compiled is not None:
        assert _kernel_py.levenshtein(left, right) == \
            _compiled.levenshtein(left, right), \
            "kernels disagree; benchmark aborted"
    pure = best_of(lambda: _kernel_py.levenshtein(left, right), repeat)
    compiled = (
        best_of(lambda: _compiled.levenshtein(left, right), repeat)
        if _compiled is not None else None
    )
    report("levenshtein", pure, compiled)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--machines", type=int, default=8)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--length", type=int, default=1200)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _compiled is None:
        print("note: compiled extension not built; timing the fallback only")
    bench_stepping(args.machines, args.steps, args.repeat)
    bench_levenshtein(args.length, args.repeat)


if __name__ == "__main__":
    main()
