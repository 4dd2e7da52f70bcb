"""
Estimates, intervals and the full concept x class matrix
========================================================
"""

from online_coalitions import Concept, estimate_guarantee, evaluate_policy, gen_thm3, table_matrix
from online_coalitions.algorithms import UniformRandom
from online_coalitions.harness import default_table_config

dist = gen_thm3(2)
exact = evaluate_policy(dist, UniformRandom(), Concept.CNS)
est = estimate_guarantee(UniformRandom(), dist, Concept.CNS, trials=10_000, seed=1)
lo, hi = est.wilson95
print(f"exact {exact} = {float(exact):.5f}; estimate {est.successes}/{est.trials}, Wilson 95% [{float(lo):.5f}, {float(hi):.5f}]")

# Positive cells run the designated algorithm on random games of the class
# over every arrival order; negative cells solve the designated family.
report = table_matrix(default_table_config(instances=10, n_max=5, seed=0))
print(report.to_text())
print("all cells as expected:", report.passed)
