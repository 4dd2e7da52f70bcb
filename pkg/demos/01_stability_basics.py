"""
Single-agent stability in a three-agent game
============================================

Agents a, b and c: a and b dislike each other, both like c.
"""

from online_coalitions import Concept, Game, Partition, all_stable, is_stable

a, b, c = 0, 1, 2
game = Game.from_pairs(3, {(a, b): -1, (a, c): 3, (b, c): 3})
print(game)

# The pair {a, c} leaves b alone.  b would gladly join (it gains 2), and the
# only question is whether anyone may object.
pi = Partition(((a, c), (b,)))
for concept in Concept:
    verdict = is_stable(game, pi, concept)
    print(f"{concept.value:>3}: {'stable' if verdict else 'unstable'}   witness: {verdict.witness}")

# a dislikes b, so b's move is blocked once the joined coalition has a veto
# (IS, CIS) but goes through when only the abandoned coalition can object
# (CNS) or nobody can (NS).

# Every partition that survives each concept:
for concept in Concept:
    found = all_stable(game, concept)
    print(f"{concept.value:>3}: " + "  ".join(str(p) for p in found))
