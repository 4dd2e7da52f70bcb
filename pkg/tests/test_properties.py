from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import is_stable_naive
from online_coalitions.algorithms import CNSMatcher, GreedyWelfare, SerialDictatorship, UniformRandom, claim1_violations, dictator_violations
from online_coalitions.game import Game, Partition, coalition_utility, social_welfare
from online_coalitions.online import run_online
from online_coalitions.stability import Concept, is_deviation, is_stable, pareto_dominates

VALUES = st.sampled_from([Fraction(v) for v in (-3, -1, 0, 1, 2)] + [Fraction(1, 2), Fraction(-5, 3)])


@st.composite
def games(draw, n_max=6, values=VALUES, symmetric=None):
    n = draw(st.integers(1, n_max))
    sym = draw(st.booleans()) if symmetric is None else symmetric
    m = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.permutations(range(n), 2):
        if sym and j < i:
            m[i][j] = m[j][i]
        else:
            m[i][j] = draw(values)
    return Game(tuple(map(tuple, m)))


@st.composite
def games_with_partitions(draw, **kw):
    g = draw(games(**kw))
    labels = draw(st.lists(st.integers(0, g.n - 1), min_size=g.n, max_size=g.n))
    return g, Partition.from_rgs(labels)


@st.composite
def orders(draw, game):
    return tuple(draw(st.permutations(range(game.n))))


@settings(max_examples=300, deadline=None)
@given(games_with_partitions())
def test_lattice(case):
    g, p = case
    s = {c: is_stable(g, p, c).stable for c in Concept}
    assert not s[Concept.NS] or (s[Concept.IS] and s[Concept.CNS])
    assert not (s[Concept.IS] or s[Concept.CNS] or s[Concept.PO]) or s[Concept.CIS]


@settings(max_examples=200, deadline=None)
@given(games_with_partitions())
def test_witnesses_are_sound(case):
    g, p = case
    for c in Concept:
        v = is_stable(g, p, c)
        if v.stable:
            continue
        if c is Concept.PO:
            assert pareto_dominates(g, v.witness, p)
        else:
            assert is_deviation(g, p, v.witness, c)


@settings(max_examples=200, deadline=None)
@given(games_with_partitions(n_max=5))
def test_agrees_with_definitions(case):
    g, p = case
    for c in (Concept.NS, Concept.IS, Concept.CNS, Concept.CIS):
        assert is_stable(g, p, c).stable == is_stable_naive(g.utilities, p.blocks, c.value)


@settings(max_examples=100, deadline=None)
@given(games_with_partitions(symmetric=True))
def test_symmetric_welfare_is_twice_pair_sum(case):
    g, p = case
    pairs = sum((g.u(i, j) for b in p.blocks for i, j in itertools.combinations(b, 2)), Fraction(0))
    assert social_welfare(g, p) == 2 * pairs


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_runs_are_irrevocable_and_replayable(data):
    g = data.draw(games())
    order = data.draw(orders(g))
    seed = data.draw(st.integers(0, 2**32 - 1))
    for policy in (UniformRandom(), GreedyWelfare()):
        trace = run_online(g, order, policy, seed=seed)
        assert trace.is_irrevocable()
        assert trace == run_online(g, order, policy, seed=seed)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_matcher_invariants(data):
    x = data.draw(st.sampled_from([1, 2]))
    y = data.draw(st.sampled_from([y for y in (1, 2, 3, 5) if y >= x]))
    g = data.draw(games(values=st.sampled_from([Fraction(x), Fraction(-y)]), symmetric=True))
    trace = run_online(g, data.draw(orders(g)), CNSMatcher())
    for p in trace.partitions:
        assert is_stable(g, p, Concept.CNS)
        assert claim1_violations(g, p) == []


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_serial_dictatorship_invariants(data):
    g = data.draw(games(values=st.sampled_from([Fraction(v) for v in (-2, -1, 1, 3)] + [Fraction(1, 2)])))
    order = data.draw(orders(g))
    trace = run_online(g, order, SerialDictatorship())
    for p in trace.partitions:
        assert is_stable(g, p, Concept.PO)
        assert dictator_violations(g, p, order) == []


@settings(max_examples=100, deadline=None)
@given(games(), st.data())
def test_utility_adds_member_values(g, data):
    i = data.draw(st.integers(0, g.n - 1))
    members = data.draw(st.sets(st.integers(0, g.n - 1)))
    coalition = members | {i}
    for j in set(range(g.n)) - coalition:
        assert coalition_utility(g, i, coalition | {j}) - coalition_utility(g, i, coalition) == g.u(i, j)
