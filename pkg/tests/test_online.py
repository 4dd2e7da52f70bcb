from __future__ import annotations

import itertools

import numpy as np
import pytest

from online_coalitions.algorithms import AllSingletons, CNSMatcher, GreedyWelfare, GrandCoalition, UniformRandom
from online_coalitions.errors import CapacityError, DomainError, ProtocolViolation
from online_coalitions.game import Game, Partition, random_game
from online_coalitions.online import (
    Observation,
    OnlinePolicy,
    Trace,
    check_order,
    min_over_orders,
    prefix_stability,
    run_online,
)
from online_coalitions.stability import Concept, is_stable

A, B, C = 0, 1, 2


@pytest.fixture
def prop1() -> Game:
    return Game.from_pairs(3, {(A, B): -1, (A, C): 3, (B, C): 3})


class Probe(OnlinePolicy):
    """Records every observation and tries to read past the prefix."""

    name = "probe"

    def __init__(self):
        self.seen = []

    def place(self, obs):
        self.seen.append(obs)
        t = obs.agent
        with pytest.raises(IndexError):
            obs.game.utilities[t][t + 1]
        with pytest.raises(IndexError):
            obs.game.utilities[t + 1]
        return None


class OutOfRange(OnlinePolicy):
    name = "bad"

    def place(self, obs):
        return len(obs.partition.blocks)


def test_single_agent_trace():
    g = Game(((0,),))
    for policy in (AllSingletons(), GrandCoalition(), CNSMatcher(), GreedyWelfare(), UniformRandom()):
        trace = run_online(g, [0], policy, seed=1)
        assert trace.partitions == (Partition(((0,),)),)


def test_prop1_matcher_opens_second_coalition(prop1):
    trace = run_online(prop1, (A, B, C), CNSMatcher(validate=False))
    assert trace.partitions[1] == Partition(((A,), (B,)))
    assert trace.final == Partition(((A, C), (B,)))


def test_observation_confinement(prop1):
    probe = Probe()
    g = Game.from_pairs(5, {(0, 4): 7, (2, 3): -2})
    run_online(g, (4, 2, 0, 3, 1), probe)
    assert [obs.game.n for obs in probe.seen] == [1, 2, 3, 4, 5]
    # arrival indexing with original labels
    assert probe.seen[2].game.labels == (4, 2, 0)
    assert probe.seen[2].game.utilities[2][0] == 7
    assert probe.seen[4].partition.domain == {0, 1, 2, 3}


def test_protocol_violation(prop1):
    with pytest.raises(ProtocolViolation):
        run_online(prop1, None, OutOfRange())


def test_bad_order(prop1):
    with pytest.raises(DomainError):
        run_online(prop1, (0, 0, 1), AllSingletons())
    assert check_order(prop1, None) == (0, 1, 2)


def test_replay_with_same_seed():
    rng = np.random.default_rng(0)
    g = random_game(6, [-1, 0, 2], rng)
    order = (3, 1, 5, 0, 2, 4)
    first = run_online(g, order, UniformRandom(), seed=42)
    assert first == run_online(g, order, UniformRandom(), seed=42)
    others = {run_online(g, order, UniformRandom(), seed=s).final for s in range(20)}
    assert len(others) > 1


def test_traces_are_irrevocable():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        g = random_game(n, [-1, 1, 2], rng)
        order = [int(a) for a in rng.permutation(n)]
        for policy in (UniformRandom(), GreedyWelfare(), GrandCoalition()):
            trace = run_online(g, order, policy, seed=3)
            assert trace.is_irrevocable()
            parts = trace.partitions
            for t in range(1, n):
                assert parts[t].remove(order[t]) == parts[t - 1]
                assert parts[t].domain == set(order[: t + 1])


def test_irrevocability_detects_tampering():
    t = Trace((0, 1, 2), (Partition(((0,),)), Partition(((0, 1),)), Partition(((0,), (1, 2)))))
    assert not t.is_irrevocable()


def test_prefix_stability_examples(prop1):
    trace = run_online(prop1, None, CNSMatcher(validate=False))
    flags = prefix_stability(prop1, trace, Concept.CNS)
    assert flags[0] is True
    for concept in Concept:
        assert prefix_stability(prop1, trace, concept)[0]
    greedy = run_online(prop1, (A, B, C), GreedyWelfare())
    assert False in prefix_stability(prop1, greedy, Concept.CNS)


def test_prefix_stability_matches_matcher_on_feg():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = int(rng.integers(1, 7))
        g = random_game(n, [-1, 1], rng, symmetric=True)
        trace = run_online(g, [int(a) for a in rng.permutation(n)], CNSMatcher())
        assert all(prefix_stability(g, trace, Concept.CNS))


def test_min_over_orders_examples():
    friends = Game.from_pairs(3, {}, default=1)
    sweep = min_over_orders(friends, AllSingletons(), Concept.NS)
    assert not sweep.success and sweep.successes == 0 and sweep.orders == 6
    assert sweep.failing_order == (0, 1, 2)
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(1, 7))
        g = random_game(n, [-1, 1], rng, symmetric=True)
        assert min_over_orders(g, CNSMatcher(), Concept.CNS, every_prefix=True).success
    with pytest.raises(CapacityError):
        min_over_orders(Game.from_pairs(8, {}, default=1), AllSingletons(), Concept.NS)


def test_min_over_orders_agrees_with_direct_runs():
    rng = np.random.default_rng(4)
    for _ in range(10):
        g = random_game(4, [-1, 0, 1, 2], rng)
        for policy in (GreedyWelfare(), GrandCoalition()):
            sweep = min_over_orders(g, policy, Concept.IS)
            direct = [is_stable(g, run_online(g, o, policy).final, Concept.IS).stable for o in itertools.permutations(range(4))]
            assert sweep.successes == sum(direct)
            assert sweep.success == all(direct)
            if not sweep.success:
                assert sweep.failing_order == next(o for o, ok in zip(itertools.permutations(range(4)), direct) if not ok)


def test_observation_options():
    obs = Observation(Game.from_pairs(3, {}), Partition(((0,), (1,))))
    assert obs.agent == 2
    assert obs.options == [0, 1, None]
