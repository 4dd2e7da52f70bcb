"""Online placement rules: the friend matcher for symmetric ``{-y, x}`` games,
online serial dictatorship for strict games, and simple baselines."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DomainError, PreconditionViolation
from .game import Game, Partition
from .online import START_SINGLETON, Observation, OnlinePolicy

__all__ = [
    "CNSMatcher",
    "SerialDictatorship",
    "AllSingletons",
    "GrandCoalition",
    "GreedyWelfare",
    "UniformRandom",
    "POLICIES",
    "make_policy",
    "cns_matcher_policy",
    "serial_dictatorship_policy",
    "baseline_policies",
    "dictator_state",
    "claim1_violations",
    "dictator_violations",
]


def _check_symmetric_two_valued(game: Game) -> None:
    u, labels = game.utilities, game.labels
    positive = negative = None
    for i in range(game.n):
        for j in range(i):
            v = u[i][j]
            pair = (labels[j], labels[i])
            if v != u[j][i]:
                raise PreconditionViolation(f"asymmetric utilities between agents {pair}", pair)
            if v == 0:
                raise PreconditionViolation(f"zero utility between agents {pair}", pair)
            if v > 0:
                if positive is None:
                    positive = (v, pair)
                elif v != positive[0]:
                    raise PreconditionViolation(f"second positive value {v} between agents {pair}", pair)
            else:
                if negative is None:
                    negative = (v, pair)
                elif v != negative[0]:
                    raise PreconditionViolation(f"second negative value {v} between agents {pair}", pair)
    if positive and negative and -negative[0] < positive[0]:
        raise PreconditionViolation(
            f"y = {-negative[0]} < x = {positive[0]} (agents {positive[1]})", positive[1]
        )


def _check_strict(game: Game) -> None:
    u = game.utilities
    for i in range(game.n):
        for j in range(game.n):
            if i != j and u[i][j] == 0:
                pair = (game.labels[i], game.labels[j])
                raise PreconditionViolation(f"zero utility u_{pair[0]}({pair[1]})", pair)


class CNSMatcher(OnlinePolicy):
    """Join a singleton friend if there is one, else the coalition of the
    earliest friend, else open a new coalition.

    Keeps every prefix contractually Nash stable on symmetric games whose
    utilities take one positive value ``x`` and one negative value ``-y``
    with ``y >= x``.  With ``validate`` the class is checked on each prefix.
    """

    name = "cns-matcher"

    def __init__(self, validate: bool = True):
        self.validate = validate

    def place(self, obs: Observation):
        game, part = obs.game, obs.partition
        if self.validate:
            _check_symmetric_two_valued(game)
        t = obs.agent
        friends = [j for j in range(t) if game.utilities[t][j] > 0]
        for j in friends:
            if len(part.block_of(j)) == 1:
                return part.block_index(j)
        if friends:
            return part.block_index(friends[0])
        return START_SINGLETON

    def __repr__(self):
        return f"CNSMatcher(validate={self.validate})"


class SerialDictatorship(OnlinePolicy):
    """Offer the newcomer to the coalitions in creation order; the first whose
    founder (dictator) likes the newcomer takes them, otherwise the newcomer
    founds a new coalition.

    In arrival indexing a coalition's founder is its smallest member and
    creation order is canonical block order, so no state is carried.
    """

    name = "serial-dictatorship"

    def __init__(self, validate: bool = True):
        self.validate = validate

    def place(self, obs: Observation):
        game = obs.game
        if self.validate:
            _check_strict(game)
        t = obs.agent
        for k, block in enumerate(obs.partition.blocks):
            if game.utilities[block[0]][t] > 0:
                return k
        return START_SINGLETON

    def __repr__(self):
        return f"SerialDictatorship(validate={self.validate})"


class AllSingletons(OnlinePolicy):
    name = "singletons"

    def place(self, obs):
        return START_SINGLETON


class GrandCoalition(OnlinePolicy):
    name = "grand"

    def place(self, obs):
        return 0 if obs.partition.blocks else START_SINGLETON


class GreedyWelfare(OnlinePolicy):
    """Maximise the immediate change in social welfare; ties go to the
    earliest block, and a new singleton (change 0) only wins outright."""

    name = "greedy-welfare"

    def place(self, obs):
        u, t = obs.game.utilities, obs.agent
        best, choice = Fraction(0), START_SINGLETON
        for k, block in enumerate(obs.partition.blocks):
            delta = sum((u[t][j] + u[j][t] for j in block), Fraction(0))
            if delta > best or (delta == best and choice is None):
                best, choice = delta, k
        return choice


class UniformRandom(OnlinePolicy):
    """Uniform over every legal placement."""

    name = "random"
    deterministic = False

    def place(self, obs):
        options = obs.options
        return options[int(obs.rng.integers(len(options)))]

    def distribution(self, obs):
        options = obs.options
        return [(o, Fraction(1, len(options))) for o in options]


POLICIES = {
    "cns-matcher": CNSMatcher,
    "serial-dictatorship": SerialDictatorship,
    "singletons": AllSingletons,
    "grand": GrandCoalition,
    "greedy-welfare": GreedyWelfare,
    "random": UniformRandom,
}


def make_policy(name: str, **kwargs) -> OnlinePolicy:
    try:
        cls = POLICIES[name]
    except KeyError:
        raise DomainError(f"unknown algorithm {name!r}; choose from {sorted(POLICIES)}") from None
    return cls(**kwargs)


def cns_matcher_policy(validate: bool = True) -> CNSMatcher:
    return CNSMatcher(validate)


def serial_dictatorship_policy(validate: bool = True) -> SerialDictatorship:
    return SerialDictatorship(validate)


def baseline_policies() -> dict[str, OnlinePolicy]:
    return {
        "all_singletons": AllSingletons(),
        "grand_coalition": GrandCoalition(),
        "greedy_welfare": GreedyWelfare(),
        "uniform_random": UniformRandom(),
    }


def dictator_state(partition: Partition, order: Sequence[int] | None = None) -> list[tuple[tuple[int, ...], int]]:
    """Coalitions with their dictators, in creation order.

    ``order`` maps arrival positions to agents; without it the partition is
    taken to be in arrival indexing already.
    """
    if order is None:
        return [(b, b[0]) for b in partition.blocks]
    position = {a: p for p, a in enumerate(order)}
    pairs = [(b, min(b, key=position.__getitem__)) for b in partition.blocks]
    return sorted(pairs, key=lambda pair: position[pair[1]])


def dictator_violations(game: Game, partition: Partition, order: Sequence[int] | None = None) -> list[str]:
    """Members that their coalition's dictator does not strictly like."""
    return [
        f"u_{leader}({x}) = {game.u(leader, x)} <= 0 in coalition {block}"
        for block, leader in dictator_state(partition, order)
        for x in block
        if x != leader and game.u(leader, x) <= 0
    ]


def claim1_violations(game: Game, partition: Partition) -> list[str]:
    """Check the two structural invariants the friend matcher maintains.

    (b) in every coalition of size at least 2 each member has a friend;
    (c) each friend of a singleton agent sits in a coalition of size at least
    2 whose other members are all enemies of that singleton agent.
    """
    u = game.utilities
    problems = []
    for block in partition.blocks:
        if len(block) < 2:
            continue
        for k in block:
            if not any(u[k][l] > 0 for l in block if l != k):
                problems.append(f"agent {k} has no friend in its coalition {block}")
    for block in partition.blocks:
        if len(block) != 1:
            continue
        (k,) = block
        for l in partition.domain:
            if l == k or u[k][l] <= 0:
                continue
            home = partition.block_of(l)
            if len(home) < 2:
                problems.append(f"singleton {k} has friend {l} in a singleton")
            elif any(u[k][b] >= 0 for b in home if b != l):
                problems.append(f"singleton {k} has a non-enemy beside friend {l} in {home}")
    return problems
