from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from online_coalitions.adversary import (
    FAMILIES,
    Entry,
    FamilySpec,
    InstanceDistribution,
    claim2_candidates,
    claim2_characterization,
    gen_prop1,
    gen_prop_cis_feng,
    gen_thm3,
    gen_thm5,
    gen_thm6,
    generate,
    sample,
    thm6_sampler,
)
from online_coalitions.errors import DomainError, ModeError
from online_coalitions.game import Game, GameClass, classify, restrict_game, value_set
from online_coalitions.oracle import all_stable, solve_minimax
from online_coalitions.stability import Concept


def test_prop1_family():
    dist = gen_prop1()
    full, stopped = dist.entries
    assert full.game.n == 3 and value_set(full.game) == {3, -1}
    assert GameClass.AFG in classify(full.game)
    assert stopped.arrival_game().utilities == restrict_game(full.game, [0, 1]).utilities
    assert not dist.distributional
    assert solve_minimax(dist, Concept.CNS, "worst").value == 0


def test_thm3_k1_matches_prop1_structure():
    dist = gen_thm3(1)
    assert len(dist) == 2
    positive = next(e for e in dist.entries if e.info["positive"] == (True,))
    assert positive.game == gen_prop1().entries[0].game


@pytest.mark.parametrize("k", [1, 2, 3])
def test_thm3_entries_are_symmetric_afgs(k):
    dist = gen_thm3(k)
    assert len(dist) == 2**k
    assert sum(e.probability for e in dist.entries) == 1
    for e in dist.entries:
        tags = classify(e.game)
        assert {GameClass.SYMMETRIC, GameClass.AFG} <= tags
        assert value_set(e.game) <= {3 * k, -1}


def test_thm3_gadgets_independent_uniform():
    dist = gen_thm3(2)
    counts = {}
    for e in dist.entries:
        counts[e.info["positive"]] = counts.get(e.info["positive"], 0) + e.probability
    assert counts == {bits: Fraction(1, 4) for bits in itertools.product((True, False), repeat=2)}
    for g in range(2):
        assert sum(e.probability for e in dist.entries if e.info["positive"][g]) == Fraction(1, 2)


def test_prop_cis_feng_family():
    dist = gen_prop_cis_feng()
    stopped, x, y = dist.entries
    for e in (x, y):
        assert {GameClass.SYMMETRIC, GameClass.FENG} <= classify(e.game)
    assert x.game.prefix(2) == y.game.prefix(2) == stopped.arrival_game()
    assert solve_minimax(dist, Concept.CIS, "worst").value == 0


def test_thm5_family():
    for k in (1, 2):
        dist = gen_thm5(k)
        for e in dist.entries:
            assert {GameClass.SYMMETRIC, GameClass.FENG} <= classify(e.game)
    a, b = gen_thm5(1).entries
    assert restrict_game(a.game, [0, 1]) == restrict_game(b.game, [0, 1])
    assert solve_minimax(gen_thm5(1), Concept.CIS).value == Fraction(1, 2)


@pytest.mark.parametrize("xy", [(1, 1), (1, 2), (3, 1), (1, Fraction(1, 2))])
def test_thm6_family(xy):
    x, y = xy
    dist = gen_thm6(2, x, y)
    assert len(dist) == math.comb(4, 2) * 2 == 12
    for e in dist.entries:
        assert e.game.n == 6
        assert GameClass.SYMMETRIC in classify(e.game)
        assert value_set(e.game) == {x, -y}
        d, B = e.info["d"], e.info["B"]
        assert d in B and len(B) == 2


def test_thm6_rejects_small_k():
    with pytest.raises(DomainError):
        gen_thm6(1)
    with pytest.raises(DomainError):
        gen_thm6(2, 0, 1)


def test_thm6_observation_compatibility():
    # before b arrives every entry shows the same all-enemies prefix
    dist = gen_thm6(2)
    prefixes = {e.arrival_game().prefix(4).utilities for e in dist.entries}
    assert len(prefixes) == 1


def test_thm6_is_value_k2():
    assert solve_minimax(gen_thm6(2, 1, 1), Concept.IS).value <= Fraction(1, 2)


def test_claim2_basic_shape():
    for x, y in [(1, 1), (1, 2), (3, 1)]:
        for e in gen_thm6(2, x, y).entries:
            found = list(claim2_candidates(2, x, y, e.info["B"], e.info["d"]))
            assert found[0][0] == 1
            assert all(S for fam, S, _ in found if fam in (2, 3))
            assert all(len(S) >= 2 for fam, S, _ in found if fam == 2)
    with pytest.raises(DomainError):
        list(claim2_candidates(2, 1, 1, (0, 1), 0, third="other"))


def test_claim2_k2_x1_y1_against_oracle():
    for e in gen_thm6(2, 1, 1).entries:
        predicted = set(claim2_characterization(2, 1, 1, e.info["B"], e.info["d"], third="summation"))
        assert set(all_stable(e.game, Concept.IS)) == predicted


def test_claim2_families_one_two_are_individually_stable():
    for x, y in [(1, 1), (1, 2), (3, 1), (1, Fraction(1, 2)), (5, 1)]:
        for e in gen_thm6(2, x, y).entries:
            stable = set(all_stable(e.game, Concept.IS))
            for fam, S, p in claim2_candidates(2, x, y, e.info["B"], e.info["d"]):
                if fam in (1, 2):
                    assert p in stable


def test_sample_examples():
    g = Game.from_pairs(2, {(0, 1): 1})
    point = InstanceDistribution.point_mass(g)
    assert all(sample(point, seed=s).game == g for s in range(5))
    with pytest.raises(ModeError):
        sample(gen_prop1(), seed=0)


def test_sample_thm3_frequencies():
    dist = gen_thm3(3)
    rng = np.random.default_rng(0)
    N = 10_000
    hits = np.zeros(3)
    for _ in range(N):
        hits += sample(dist, rng=rng).info["positive"]
    sigma = math.sqrt(N * 0.25)
    assert np.all(np.abs(hits - N / 2) <= 3 * sigma)


def test_sample_non_uniform():
    g1, g2 = Game.from_pairs(1, {}), Game.from_pairs(2, {})
    dist = InstanceDistribution("skew", (Entry(g1, (0,), Fraction(1, 4)), Entry(g2, (0, 1), Fraction(3, 4))))
    rng = np.random.default_rng(1)
    share = np.mean([sample(dist, rng=rng).game.n == 2 for _ in range(4000)])
    assert abs(share - 0.75) < 0.03


def test_thm6_sampler_k4():
    draw = thm6_sampler(4)
    rng = np.random.default_rng(2)
    for _ in range(50):
        e = draw(rng)
        assert len(e.info["B"]) == 4 and e.info["d"] in e.info["B"]
        assert e.game.n == 18


def test_probabilities_must_sum_to_one():
    g = Game.from_pairs(1, {})
    with pytest.raises(DomainError):
        InstanceDistribution("bad", (Entry(g, (0,), Fraction(1, 2)),))


def test_generate_registry():
    assert set(FAMILIES) == {"prop1-cns-afg", "thm3-cns-afg", "prop-cis-feng", "thm5-cis-feng", "thm6-is-xy"}
    dist = generate(FamilySpec("thm3-cns-afg", k=2, seed=9))
    assert dist.seed == 9 and len(dist) == 4
    with pytest.raises(DomainError):
        generate(FamilySpec("nope"))


def test_entry_stop_truncates():
    g = Game.from_pairs(3, {(0, 1): 1})
    e = Entry(g, (2, 0, 1), Fraction(1), stops_after=2)
    assert e.length == 2
    assert e.arrival_game().labels == (2, 0)
    assert value_set(e.arrival_game()) == {0}
