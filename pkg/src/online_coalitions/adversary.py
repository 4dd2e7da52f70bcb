"""Adversarial instance families for online coalition formation.

Each generator returns an :class:`InstanceDistribution`: a finite list of
(game, arrival order) entries with exact probabilities.  An adversary that
stops early is modelled by an entry whose ``stops_after`` cuts the arrival
sequence; an adversary that picks the continuation after seeing the
algorithm's move is modelled by several entries sharing a prefix
("worst-case" families, scored by their minimum).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import DomainError, ModeError
from .game import Game, Partition, as_fraction, restrict_game

__all__ = [
    "Entry",
    "InstanceDistribution",
    "FamilySpec",
    "FAMILIES",
    "generate",
    "gen_prop1",
    "gen_thm3",
    "gen_prop_cis_feng",
    "gen_thm5",
    "gen_thm6",
    "thm6_sampler",
    "claim2_candidates",
    "claim2_characterization",
    "sample",
]


@dataclass(frozen=True)
class Entry:
    game: Game
    order: tuple[int, ...]
    probability: Fraction
    stops_after: int | None = None
    info: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def length(self) -> int:
        """Number of agents that actually arrive."""
        return self.game.n if self.stops_after is None else min(self.stops_after, self.game.n)

    @cached_property
    def _arrival(self) -> Game:
        return restrict_game(self.game, self.order[: self.length])

    def arrival_game(self) -> Game:
        """The game among the agents that arrive, indexed by arrival position."""
        return self._arrival


@dataclass(frozen=True)
class InstanceDistribution:
    family: str
    entries: tuple[Entry, ...]
    distributional: bool = True
    params: dict = field(default_factory=dict, compare=False, hash=False)
    seed: int | None = None

    def __post_init__(self):
        total = sum((e.probability for e in self.entries), Fraction(0))
        if self.entries and total != 1:
            raise DomainError(f"entry probabilities of {self.family} sum to {total}, not 1")

    def __len__(self):
        return len(self.entries)

    @cached_property
    def uniform(self) -> bool:
        return len({e.probability for e in self.entries}) <= 1

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    @classmethod
    def point_mass(cls, game: Game, order=None, family: str = "point") -> InstanceDistribution:
        order = tuple(range(game.n)) if order is None else tuple(order)
        return cls(family, (Entry(game, order, Fraction(1)),))


def _positive_rational(name, value) -> Fraction:
    value = as_fraction(value)
    if value <= 0:
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def gen_prop1() -> InstanceDistribution:
    """Three agents a, b, c with u(a,b) = -1 and u(a,c) = u(b,c) = 3, plus the
    adversary's option to stop after a and b."""
    full = Game.from_pairs(3, {(0, 1): -1, (0, 2): 3, (1, 2): 3})
    half = Fraction(1, 2)
    entries = (
        Entry(full, (0, 1, 2), half),
        Entry(restrict_game(full, [0, 1]), (0, 1), half, stops_after=2, info={"stopped": True}),
    )
    return InstanceDistribution("prop1-cns-afg", entries, distributional=False)


def gen_thm3(k: int) -> InstanceDistribution:
    """``k`` independent three-agent gadgets; in each the late agent c_i is
    worth ``3k`` to both a_i and b_i or ``-1`` to both, with equal odds.
    Every other pair is worth ``-1``."""
    if k < 1:
        raise DomainError("k must be at least 1")
    n, big = 3 * k, 3 * k
    entries = []
    for bits in itertools.product((True, False), repeat=k):
        pairs = {}
        for g, positive in enumerate(bits):
            a, b, c = 3 * g, 3 * g + 1, 3 * g + 2
            pairs[a, b] = -1
            pairs[a, c] = pairs[b, c] = big if positive else -1
        game = Game.from_pairs(n, pairs, default=-1)
        entries.append(Entry(game, tuple(range(n)), Fraction(1, 2**k), info={"positive": bits}))
    return InstanceDistribution("thm3-cns-afg", tuple(entries), params={"k": k})


def gen_prop_cis_feng() -> InstanceDistribution:
    """Two indifferent agents a, b; the third agent is chosen after seeing
    whether a and b were put together."""
    third = Fraction(1, 3)
    prefix = Game.from_pairs(2, {(0, 1): 0})
    apart = Game.from_pairs(3, {(0, 1): 0, (0, 2): -1, (1, 2): 1})
    together = Game.from_pairs(3, {(0, 1): 0, (0, 2): 1, (1, 2): 1})
    entries = (
        Entry(prefix, (0, 1), third, stops_after=2, info={"stopped": True}),
        Entry(apart, (0, 1, 2), third, info={"extension": "X"}),
        Entry(together, (0, 1, 2), third, info={"extension": "Y"}),
    )
    return InstanceDistribution("prop-cis-feng", entries, distributional=False)


def gen_thm5(k: int) -> InstanceDistribution:
    """``k`` gadgets with u(a_i,b_i) = 0, u(a_i,c_i) = 1 and u(b_i,c_i) = +1 or
    -1 with equal odds; all other pairs are neutral."""
    if k < 1:
        raise DomainError("k must be at least 1")
    n = 3 * k
    entries = []
    for signs in itertools.product((1, -1), repeat=k):
        pairs = {}
        for g, s in enumerate(signs):
            a, b, c = 3 * g, 3 * g + 1, 3 * g + 2
            pairs[a, b] = 0
            pairs[a, c] = 1
            pairs[b, c] = s
        game = Game.from_pairs(n, pairs, default=0)
        entries.append(Entry(game, tuple(range(n)), Fraction(1, 2**k), info={"bc": signs}))
    return InstanceDistribution("thm5-cis-feng", tuple(entries), params={"k": k})


def _thm6_game(k: int, x: Fraction, y: Fraction, B, d) -> Game:
    m = k * k
    b, c = m, m + 1
    pairs = {(b, c): x, (c, d): x}
    for a in B:
        pairs[b, a] = x
    return Game.from_pairs(m + 2, pairs, default=-y)


def gen_thm6(k: int, x=1, y=1) -> InstanceDistribution:
    """Agents a_1..a_{k^2}, then b, then c.  A hidden k-subset B of the a's are
    friends of b, and one member d of B is the only a that c likes; b and c
    are friends; every other pair is worth ``-y``."""
    if k < 2:
        raise DomainError("the thm6 family needs k >= 2")
    x, y = _positive_rational("x", x), _positive_rational("y", y)
    m = k * k
    prob = Fraction(1, math.comb(m, k) * k)
    entries = []
    for B in itertools.combinations(range(m), k):
        for d in B:
            entries.append(Entry(_thm6_game(k, x, y, B, d), tuple(range(m + 2)), prob, info={"B": B, "d": d}))
    return InstanceDistribution("thm6-is-xy", tuple(entries), params={"k": k, "x": x, "y": y})


def thm6_sampler(k: int, x=1, y=1):
    """Draw thm6 entries without materialising all of them (for large k)."""
    if k < 2:
        raise DomainError("the thm6 family needs k >= 2")
    x, y = _positive_rational("x", x), _positive_rational("y", y)
    m = k * k
    prob = Fraction(1, math.comb(m, k) * k)

    def draw(rng) -> Entry:
        B = tuple(sorted(int(a) for a in rng.choice(m, size=k, replace=False)))
        d = B[int(rng.integers(k))]
        return Entry(_thm6_game(k, x, y, B, d), tuple(range(m + 2)), prob, info={"B": B, "d": d})

    return draw


def claim2_candidates(k: int, x, y, B, d, third: str = "size"):
    """The individually stable partitions predicted for a thm6 entry.

    Yields ``(family, S, partition)``.  Family 2 needs ``|S| >= 2`` and
    ``(|S| - 1) y <= x``.  Family 3 uses ``|S| y <= x`` when ``third`` is
    ``"size"`` and ``(|S| + 1) y <= x`` (the value a member of S gets by
    summing over its coalition) when ``third`` is ``"summation"``.
    """
    if third not in ("size", "summation"):
        raise DomainError(f"unknown threshold {third!r}")
    x, y = as_fraction(x), as_fraction(y)
    m = k * k
    b, c = m, m + 1
    rest = [a for a in B if a != d]

    def with_singletons(blocks, used):
        return Partition(tuple(blocks) + tuple((a,) for a in range(m) if a not in used))

    yield 1, (), with_singletons([(b, c, d)], {d})
    for size in range(1, len(rest) + 1):
        for S in itertools.combinations(rest, size):
            if size >= 2 and (size - 1) * y <= x:
                yield 2, S, with_singletons([(c, d), (b, *S)], {d, *S})
            bound = size if third == "size" else size + 1
            if bound * y <= x:
                yield 3, S, with_singletons([(b, c, d, *S)], {d, *S})


def claim2_characterization(k: int, x, y, B, d, third: str = "size") -> list[Partition]:
    return [p for _, _, p in claim2_candidates(k, x, y, B, d, third)]


@dataclass(frozen=True)
class FamilySpec:
    family: str
    k: int = 1
    x: Fraction = Fraction(1)
    y: Fraction = Fraction(1)
    seed: int | None = None


FAMILIES = {
    "prop1-cns-afg": lambda spec: gen_prop1(),
    "thm3-cns-afg": lambda spec: gen_thm3(spec.k),
    "prop-cis-feng": lambda spec: gen_prop_cis_feng(),
    "thm5-cis-feng": lambda spec: gen_thm5(spec.k),
    "thm6-is-xy": lambda spec: gen_thm6(spec.k, spec.x, spec.y),
}


def generate(spec: FamilySpec) -> InstanceDistribution:
    try:
        make = FAMILIES[spec.family]
    except KeyError:
        raise DomainError(f"unknown family {spec.family!r}; choose from {sorted(FAMILIES)}") from None
    dist = make(spec)
    return InstanceDistribution(dist.family, dist.entries, dist.distributional, dist.params, spec.seed)


def sample(dist: InstanceDistribution, seed=None, rng=None) -> Entry:
    """Draw one entry according to its probability."""
    if not dist.distributional:
        raise ModeError(f"{dist.family} is a worst-case family and cannot be sampled")
    if rng is None:
        rng = np.random.default_rng(seed)
    if dist.uniform:
        return dist.entries[int(rng.integers(len(dist.entries)))]
    target = Fraction(rng.random())
    acc = Fraction(0)
    for entry in dist.entries:
        acc += entry.probability
        if target < acc:
            return entry
    return dist.entries[-1]
