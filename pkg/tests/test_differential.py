"""The optimized engine against the naive reference interpreter."""

import random

from tmnet import ClockConfig, run, run_reference
from tmnet.context import prepare_network, encode_trace
from tmnet.fileio import load_network, load_trace

from helpers import FIXTURES, producer_consumer_network, random_network, random_speeds


def assert_equivalent(net, clocks=None, sources=None, budget=20):
    fast = run(net, clocks=clocks, sources=sources, budget=budget)
    slow = run_reference(net, clocks=clocks, sources=sources, budget=budget)
    assert fast.final == slow.final
    assert fast.sinks == slow.sinks
    assert fast.halt_reason == slow.halt_reason
    assert fast.log.to_jsonl() == slow.log.to_jsonl()


def test_reference_agrees_on_hand_checked_chain():
    """Both interpreters produce the identical chain run."""
    assert_equivalent(producer_consumer_network())


def test_reference_agrees_on_simple_fixture():
    """Both interpreters agree on the bundled two-machine fixture."""
    net = load_network(FIXTURES / "simple" / "network.json")
    assert_equivalent(net, budget=30)


def test_reference_agrees_on_map_viewer_fixture():
    """Both interpreters agree on the map-viewer fixture with its trace."""
    net = load_network(FIXTURES / "map_viewer" / "network.json")
    trace = load_trace(FIXTURES / "map_viewer" / "trace.json")
    prepared = prepare_network(net, trace)
    schedules = encode_trace(trace, prepared)
    assert_equivalent(prepared, sources=schedules, budget=40)


def test_reference_agrees_on_redundancy_fixture():
    """Both interpreters agree on the redundancy fixture with its trace."""
    net = load_network(FIXTURES / "redundancy" / "network.json")
    trace = load_trace(FIXTURES / "redundancy" / "trace.json")
    prepared = prepare_network(net, trace)
    schedules = encode_trace(trace, prepared)
    assert_equivalent(prepared, sources=schedules, budget=40)


def test_reference_agrees_on_random_networks():
    """A randomized batch with random speeds and budgets matches exactly."""
    rng = random.Random(0xCAFE)
    for _ in range(150):
        net = random_network(rng)
        clocks = ClockConfig(random_speeds(rng, net)) if net.machines else None
        assert_equivalent(net, clocks=clocks, budget=rng.randint(0, 20))
