"""The online arrival driver.

Agents arrive one at a time.  At arrival ``t`` the policy sees only the game
among the agents that have already arrived, indexed by arrival position
(the newcomer is position ``t``), together with the current partition of the
earlier positions.  It answers with a block index of that partition or
``None`` for a new singleton; nothing placed earlier can be changed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError, ModeError, ProtocolViolation
from .game import Game, Partition, restrict_game
from .stability import DEFAULT_PO_GUARD, Concept, is_stable

__all__ = [
    "START_SINGLETON",
    "Observation",
    "OnlinePolicy",
    "Trace",
    "OrderSweep",
    "run_online",
    "prefix_stability",
    "min_over_orders",
    "check_order",
]

START_SINGLETON = None

DEFAULT_ORDER_GUARD = 7


@dataclass(frozen=True)
class Observation:
    """What a policy sees when the agent at arrival position ``game.n - 1`` arrives."""

    game: Game
    partition: Partition
    rng: np.random.Generator = field(default=None, compare=False, repr=False)

    @property
    def agent(self) -> int:
        return self.game.n - 1

    @property
    def options(self) -> list[int | None]:
        """Every legal placement: each existing block, then a new singleton."""
        return [*range(len(self.partition.blocks)), START_SINGLETON]


class OnlinePolicy:
    """Base class for placement rules.

    Subclasses implement :meth:`place`.  Randomized policies set
    ``deterministic = False``, draw only from ``obs.rng`` and override
    :meth:`distribution` so that exact evaluation stays possible.
    """

    name = "policy"
    deterministic = True

    def place(self, obs: Observation) -> int | None:
        raise NotImplementedError

    def distribution(self, obs: Observation) -> list[tuple[int | None, Fraction]]:
        if not self.deterministic:
            raise ModeError(f"policy {self.name!r} does not expose its placement distribution")
        return [(self.place(obs), Fraction(1))]

    def __repr__(self):
        return f"{type(self).__name__}()"


@dataclass(frozen=True)
class Trace:
    """Partitions after every arrival.

    ``steps[t]`` is over arrival positions ``0..t``; :attr:`partitions` gives
    the same partitions over the agents of the game.
    """

    order: tuple[int, ...]
    steps: tuple[Partition, ...]
    policy: str = ""
    seed: object = None

    @cached_property
    def partitions(self) -> tuple[Partition, ...]:
        return tuple(p.relabel(self.order) for p in self.steps)

    @property
    def final(self) -> Partition:
        return self.steps[-1].relabel(self.order) if self.steps else Partition()

    def is_irrevocable(self) -> bool:
        """``pi_t - sigma(t) == pi_{t-1}`` for every arrival."""
        parts = self.partitions
        return all(parts[t].remove(self.order[t]) == parts[t - 1] for t in range(1, len(parts)))


def check_order(game: Game, order: Sequence[int] | None) -> tuple[int, ...]:
    if order is None:
        return tuple(range(game.n))
    order = tuple(int(a) for a in order)
    if sorted(order) != list(range(game.n)):
        raise DomainError(f"arrival order {order} is not a permutation of the {game.n} agents")
    return order


def _append_is_irrevocable(before: Partition, after: Partition, t: int) -> bool:
    # t is the largest position, so it sits last in its block and a singleton {t} sorts last
    return tuple(b[:-1] if b[-1] == t else b for b in after.blocks if b != (t,)) == before.blocks


def run_online(game: Game, order: Sequence[int] | None, policy: OnlinePolicy, seed=None, rng=None) -> Trace:
    """Feed the agents of ``game`` to ``policy`` in ``order``.

    The engine owns the random stream: ``rng`` if given, otherwise a fresh
    ``numpy.random.default_rng(seed)``.
    """
    order = check_order(game, order)
    if rng is None:
        rng = np.random.default_rng(seed)
    arrival = game if order == tuple(range(game.n)) else restrict_game(game, order)
    current = Partition()
    steps = []
    for t in range(len(order)):
        choice = policy.place(Observation(arrival.prefix(t + 1), current, rng))
        if choice is not None:
            if not isinstance(choice, (int, np.integer)) or not 0 <= choice < len(current.blocks):
                raise ProtocolViolation(
                    f"{policy.name} returned placement {choice!r} with {len(current.blocks)} blocks available"
                )
            choice = int(choice)
        placed = current.with_agent(t, choice)
        if not _append_is_irrevocable(current, placed, t):
            raise ProtocolViolation(f"arrival {t} changed earlier coalitions")
        steps.append(placed)
        current = placed
    return Trace(order, tuple(steps), policy.name, seed)


def prefix_stability(game: Game, trace: Trace, concept: Concept, guard: int = DEFAULT_PO_GUARD) -> list[bool]:
    """Whether each prefix partition is stable in the game among the agents arrived so far."""
    return [is_stable(game, p, concept, guard).stable for p in trace.partitions]


@dataclass(frozen=True)
class OrderSweep:
    success: bool
    failing_order: tuple[int, ...] | None
    orders: int
    successes: int

    @property
    def probability(self) -> Fraction:
        return Fraction(self.successes, self.orders)


def min_over_orders(
    game: Game,
    policy: OnlinePolicy,
    concept: Concept,
    guard: int = DEFAULT_ORDER_GUARD,
    seed=0,
    every_prefix: bool = False,
) -> OrderSweep:
    """Run ``policy`` on every arrival order and report the first failing one.

    With ``every_prefix`` an order only counts as a success when all prefix
    partitions are stable, not just the final one.
    """
    if game.n > guard:
        raise CapacityError(f"{math.factorial(game.n)} arrival orders exceed the guard n <= {guard}")
    failing, total, ok = None, 0, 0
    for order in itertools.permutations(range(game.n)):
        trace = run_online(game, order, policy, seed=seed)
        if every_prefix:
            good = all(prefix_stability(game, trace, concept))
        else:
            good = is_stable(game, trace.final, concept).stable
        total += 1
        ok += good
        if not good and failing is None:
            failing = order
    return OrderSweep(failing is None, failing, total, ok)
