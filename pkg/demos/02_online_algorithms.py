"""
Keeping a partition stable while agents arrive
==============================================

The friend matcher keeps every prefix contractually Nash stable on
symmetric games with one friendship value x and one enmity value -y, y >= x.
Serial dictatorship keeps every prefix Pareto optimal on games without
zero utilities.
"""

import itertools

import numpy as np

from online_coalitions import CNSMatcher, Concept, SerialDictatorship, is_stable, run_online
from online_coalitions.algorithms import claim1_violations, dictator_violations
from online_coalitions.game import random_game

rng = np.random.default_rng(7)

# A symmetric friends-and-enemies game on five agents.
game = random_game(5, [1, -1], rng, symmetric=True)
trace = run_online(game, (3, 0, 4, 1, 2), CNSMatcher())
for t, p in enumerate(trace.partitions, 1):
    print(t, p, "CNS" if is_stable(game, p, Concept.CNS) else "not CNS")

# The guarantee holds for every arrival order, not just this one.
bad = 0
for order in itertools.permutations(range(game.n)):
    for p in run_online(game, order, CNSMatcher()).partitions:
        bad += not is_stable(game, p, Concept.CNS) or bool(claim1_violations(game, p))
print("prefixes violating CNS or the matcher invariants over all 120 orders:", bad)

# Serial dictatorship on a strict (zero-free), asymmetric game.
game = random_game(6, [-2, -1, 1, 2], rng)
order = [int(a) for a in rng.permutation(6)]
trace = run_online(game, order, SerialDictatorship())
print("arrival order", order)
for p in trace.partitions:
    print(p, "PO" if is_stable(game, p, Concept.PO) else "not PO", dictator_violations(game, p, order) or "")
