"""
What no online algorithm can do
===============================

Each adversarial family is a finite list of (game, arrival order) entries.
``solve_minimax`` computes the best success value any deterministic online
algorithm can reach on it, by backward induction over what the algorithm
can observe.
"""

from online_coalitions import Concept, evaluate_policy, is_stable, run_online, gen_prop1, gen_prop_cis_feng, gen_thm3, gen_thm5, gen_thm6, solve_minimax
from online_coalitions.algorithms import CNSMatcher, GreedyWelfare, UniformRandom

# Three agents, and the adversary may stop after the second.  Every
# deterministic algorithm fails on some branch.
print("CNS, stop-or-continue adversary:", solve_minimax(gen_prop1(), Concept.CNS, "worst").value)

# Independent gadgets, each with a hidden coin.  The optimum halves with
# every gadget, and two natural rules hit it exactly.
for k in (1, 2, 3):
    dist = gen_thm3(k)
    result = solve_minimax(dist, Concept.CNS)
    print(
        f"CNS, k={k}: optimum {result.value} over {result.nodes} observations;",
        f"matcher {evaluate_policy(dist, CNSMatcher(validate=False), Concept.CNS)},",
        f"greedy {evaluate_policy(dist, GreedyWelfare(), Concept.CNS)},",
        f"uniform random {evaluate_policy(dist, UniformRandom(), Concept.CNS)}",
    )

# Zero utilities break contractual individual stability too.
print("CIS, adaptive third agent:", solve_minimax(gen_prop_cis_feng(), Concept.CIS, "worst").value)
for k in (1, 2):
    print(f"CIS, k={k}:", solve_minimax(gen_thm5(k), Concept.CIS).value)

# Individual stability with a hidden friend set: at most 1/k.
for x, y in [(1, 1), (1, 2), (3, 1)]:
    print(f"IS, k=2, x={x}, y={y}:", solve_minimax(gen_thm6(2, x, y), Concept.IS).value)

# The optimal table is an ordinary online policy: replaying it through the
# engine on every entry reproduces the optimum.
dist = gen_thm3(2)
result = solve_minimax(dist, Concept.CNS)
policy = result.as_policy()
replayed = 0
for entry in dist.entries:
    game = entry.arrival_game()
    final = run_online(game, None, policy).final
    replayed += entry.probability * is_stable(game, final, Concept.CNS).stable
print("replayed value:", replayed, "from a table of", len(result.policy), "observations")
