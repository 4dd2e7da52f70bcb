"""Additively separable hedonic games, partitions and class tags.

Utilities are exact rationals (:class:`fractions.Fraction`).  Agents of a
game are the indices ``0..n-1``; ``Game.labels`` records, for games obtained
by restriction, which agent of the parent game each index stands for.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DomainError

__all__ = [
    "Game",
    "Partition",
    "GameClass",
    "UASHG",
    "as_fraction",
    "coalition_utility",
    "partition_utility",
    "restrict_game",
    "restrict_partition",
    "remove_agent",
    "classify",
    "social_welfare",
    "random_game",
]


def as_fraction(value) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    raise DomainError(f"utilities must be exact (int, Fraction or 'p/q'), got {value!r}")


@dataclass(frozen=True)
class Game:
    """An ASHG ``(N, u)`` with ``utilities[i][j] = u_i(j)``."""

    utilities: tuple[tuple[Fraction, ...], ...]
    labels: tuple[int, ...] = None

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.utilities)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise DomainError(f"utility matrix is not square: row {i} has {len(row)} entries, expected {n}")
            if row[i] != 0:
                raise DomainError(f"self-utility u_{i}({i}) must be 0, got {row[i]}")
        labels = tuple(range(n)) if self.labels is None else tuple(self.labels)
        if len(labels) != n:
            raise DomainError("labels must name every agent exactly once")
        object.__setattr__(self, "utilities", rows)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def _trusted(cls, utilities, labels) -> Game:
        # skips validation; callers pass slices of an already validated game
        game = object.__new__(cls)
        object.__setattr__(game, "utilities", utilities)
        object.__setattr__(game, "labels", labels)
        return game

    @classmethod
    def from_pairs(cls, n: int, pairs: dict, default=0, symmetric: bool = True) -> Game:
        """Build a game from ``{(i, j): value}``; missing pairs get ``default``.

        With ``symmetric=True`` each pair sets both ``u_i(j)`` and ``u_j(i)``.
        """
        default = as_fraction(default)
        m = [[Fraction(0) if i == j else default for j in range(n)] for i in range(n)]
        for (i, j), value in pairs.items():
            if i == j:
                raise DomainError(f"pair ({i}, {j}) is a self-utility")
            m[i][j] = as_fraction(value)
            if symmetric:
                m[j][i] = m[i][j]
        return cls(tuple(map(tuple, m)))

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def agents(self) -> range:
        return range(len(self.utilities))

    def u(self, i: int, j: int) -> Fraction:
        return self.utilities[i][j]

    def prefix(self, t: int) -> Game:
        """The game restricted to its first ``t`` agents (by index)."""
        return Game._trusted(tuple(row[:t] for row in self.utilities[:t]), self.labels[:t])

    @cached_property
    def scaled(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        """``(scale, M)`` with ``M[i][j] = scale * u_i(j)`` integral and ``scale > 0``.

        Positive scaling preserves every comparison of utility sums, so the
        stability checkers work on ``M``.
        """
        scale = 1
        for row in self.utilities:
            for v in row:
                if v.denominator != 1:
                    scale = math.lcm(scale, v.denominator)
        if scale == 1:
            return 1, tuple(tuple(int(v) for v in row) for row in self.utilities)
        return scale, tuple(tuple(int(v * scale) for v in row) for row in self.utilities)

    def __str__(self):
        body = "\n".join("  [" + ", ".join(f"{v}" for v in row) + "]" for row in self.utilities)
        return f"Game(n={self.n}\n{body}\n)"


@dataclass(frozen=True)
class Partition:
    """A coalition structure over a finite set of agents, in canonical form.

    Members of a block are ascending and blocks are ordered by their smallest
    member, so equal partitions compare and hash equal.
    """

    blocks: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else -1))
        seen = set()
        for b in blocks:
            if not b:
                raise DomainError("partition blocks must be nonempty")
            for a in b:
                if a in seen:
                    raise DomainError(f"agent {a} appears in more than one block")
                seen.add(a)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def singletons(cls, agents: Iterable[int]) -> Partition:
        return cls(tuple((a,) for a in agents))

    @classmethod
    def grand(cls, agents: Iterable[int]) -> Partition:
        agents = tuple(agents)
        return cls((agents,) if agents else ())

    @classmethod
    def from_rgs(cls, rgs: Sequence[int], agents: Sequence[int] | None = None) -> Partition:
        """Decode a restricted growth string; ``rgs[p]`` is the block of ``agents[p]``."""
        agents = range(len(rgs)) if agents is None else agents
        groups: dict[int, list[int]] = {}
        for a, b in zip(agents, rgs):
            groups.setdefault(b, []).append(a)
        return cls(tuple(groups.values()))

    @cached_property
    def domain(self) -> frozenset[int]:
        return frozenset(a for b in self.blocks for a in b)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {a: k for k, b in enumerate(self.blocks) for a in b}

    def block_index(self, agent: int) -> int:
        try:
            return self._index[agent]
        except KeyError:
            raise DomainError(f"agent {agent} is not covered by the partition") from None

    def block_of(self, agent: int) -> tuple[int, ...]:
        return self.blocks[self.block_index(agent)]

    def rgs(self) -> tuple[int, ...]:
        """Restricted growth string over the sorted domain."""
        return tuple(self._index[a] for a in sorted(self.domain))

    def with_agent(self, agent: int, block: int | None) -> Partition:
        """Add a new agent to block ``block`` (canonical index) or as a singleton."""
        if agent in self._index:
            raise DomainError(f"agent {agent} is already placed")
        blocks = list(self.blocks)
        if block is None:
            blocks.append((agent,))
        else:
            blocks[block] = blocks[block] + (agent,)
        if self.blocks and agent < max(b[-1] for b in self.blocks):
            return Partition(tuple(blocks))
        # a new largest agent keeps the block order canonical
        out = object.__new__(Partition)
        object.__setattr__(out, "blocks", tuple(blocks))
        return out

    def restrict(self, agents: Iterable[int]) -> Partition:
        keep = set(agents)
        return Partition(tuple(t for t in (tuple(a for a in b if a in keep) for b in self.blocks) if t))

    def remove(self, agent: int) -> Partition:
        return self.restrict(self.domain - {agent})

    def relabel(self, mapping) -> Partition:
        return Partition(tuple(tuple(mapping[a] for a in b) for b in self.blocks))

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def coalition_utility(game: Game, agent: int, coalition: Iterable[int]) -> Fraction:
    """``u_i(C) = sum of u_i(j) over j in C``; the agent must belong to ``C``."""
    coalition = set(coalition)
    if agent not in coalition:
        raise DomainError(f"agent {agent} is not a member of coalition {sorted(coalition)}")
    row = game.utilities[agent]
    try:
        return sum((row[j] for j in coalition), Fraction(0))
    except IndexError:
        raise DomainError(f"coalition {sorted(coalition)} is not a subset of the game's agents") from None


def partition_utility(game: Game, agent: int, partition: Partition) -> Fraction:
    return coalition_utility(game, agent, partition.block_of(agent))


def restrict_game(game: Game, agents: Iterable[int]) -> Game:
    """The game ``G[M]``.

    A set is taken in ascending order; a sequence keeps its order, which is
    how arrival-indexed prefix games are built.  Labels of the result point
    back to the labels of ``game``.
    """
    if isinstance(agents, (set, frozenset)):
        agents = sorted(agents)
    agents = tuple(agents)
    if not agents:
        raise DomainError("cannot restrict a game to an empty agent set")
    if len(set(agents)) != len(agents) or not all(0 <= a < game.n for a in agents):
        raise DomainError(f"{agents} is not a set of agents of a game with n={game.n}")
    u = game.utilities
    return Game._trusted(
        tuple(tuple(u[i][j] for j in agents) for i in agents),
        tuple(game.labels[a] for a in agents),
    )


def restrict_partition(partition: Partition, agents: Iterable[int]) -> Partition:
    return partition.restrict(agents)


def remove_agent(partition: Partition, agent: int) -> Partition:
    return partition.remove(agent)


class GameClass(enum.Enum):
    SYMMETRIC = "symmetric"
    STRICT = "strict"
    AFG = "AFG"
    AEG = "AEG"
    FEG = "FEG"
    FENG = "FENG"

    def __repr__(self):
        return self.value


@dataclass(frozen=True)
class UASHG:
    """Tag carrying the set of off-diagonal utility values of a game."""

    values: frozenset[Fraction] = field(default_factory=frozenset)

    def __repr__(self):
        return "UASHG({" + ", ".join(str(v) for v in sorted(self.values)) + "})"


def value_set(game: Game) -> frozenset[Fraction]:
    u = game.utilities
    return frozenset(u[i][j] for i in game.agents for j in game.agents if i != j)


def classify(game: Game) -> frozenset:
    """All class tags whose defining predicate holds.

    A ``U``-ASHG only needs its values to lie in ``U``; AFG and AEG use the
    game's own agent count as the large value.
    """
    u, n = game.utilities, game.n
    values = value_set(game)
    tags = {UASHG(values)}
    if all(u[i][j] == u[j][i] for i in range(n) for j in range(i)):
        tags.add(GameClass.SYMMETRIC)
    if 0 not in values:
        tags.add(GameClass.STRICT)
    for tag, allowed in (
        (GameClass.AFG, {n, -1}),
        (GameClass.AEG, {1, -n}),
        (GameClass.FEG, {1, -1}),
        (GameClass.FENG, {1, 0, -1}),
    ):
        if values <= allowed:
            tags.add(tag)
    return frozenset(tags)


def social_welfare(game: Game, partition: Partition) -> Fraction:
    return sum((coalition_utility(game, i, b) for b in partition.blocks for i in b), Fraction(0))


def random_game(n: int, values: Sequence, rng, symmetric: bool = False) -> Game:
    """Utilities drawn uniformly from ``values`` with a numpy Generator."""
    values = [as_fraction(v) for v in values]
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1 if symmetric else 0, n):
            if i == j:
                continue
            m[i][j] = values[rng.integers(len(values))]
            if symmetric:
                m[j][i] = m[i][j]
    return Game(tuple(map(tuple, m)))
