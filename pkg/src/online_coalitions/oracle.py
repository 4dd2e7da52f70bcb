"""Brute-force ground truth.

* every partition of a small agent set, and the exact set of stable ones;
* the best success probability any deterministic online algorithm can reach
  on a finite instance distribution, by backward induction over what the
  algorithm can observe;
* the exact success probability of a given policy on such a distribution.
"""

from __future__ import annotations

import enum
import hashlib
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .adversary import InstanceDistribution
from .errors import CapacityError, DomainError, ModeError, ProtocolViolation
from .game import Game, Partition
from .online import Observation, OnlinePolicy, START_SINGLETON
from .partitions import iter_rgs, rgs_array
from .stability import DEFAULT_PO_GUARD, Concept, _first_deviation, is_stable, utility_vectors

__all__ = [
    "Mode",
    "ObservationKey",
    "SolveResult",
    "TablePolicy",
    "enumerate_partitions",
    "partitions_of",
    "all_stable",
    "exists_stable",
    "solve_minimax",
    "evaluate_policy",
    "observation_key",
]

DEFAULT_ENUM_GUARD = 12
DEFAULT_NODE_GUARD = 10**7


class Mode(str, enum.Enum):
    WORST = "worst"
    EXPECTED = "expected"

    def __str__(self):
        return self.value


def partitions_of(agents, guard: int = DEFAULT_ENUM_GUARD) -> Iterator[Partition]:
    """Every partition of ``agents`` (sorted), in restricted-growth-string order."""
    agents = sorted(agents)
    if len(agents) > guard:
        raise CapacityError(f"enumerating partitions of {len(agents)} agents exceeds the guard {guard}")
    for rgs in iter_rgs(len(agents)):
        yield Partition.from_rgs(rgs, agents)


def enumerate_partitions(n: int, guard: int = DEFAULT_ENUM_GUARD) -> Iterator[Partition]:
    if n < 1:
        raise DomainError("n must be at least 1")
    return partitions_of(range(n), guard)


def _non_dominated(V: np.ndarray) -> np.ndarray:
    keep = np.ones(len(V), dtype=bool)
    for r in range(len(V)):
        v = V[r]
        if ((V >= v).all(axis=1) & (V > v).any(axis=1)).any():
            keep[r] = False
    return keep


def all_stable(game: Game, concept: Concept, guard: int = DEFAULT_PO_GUARD, agents=None) -> list[Partition]:
    """Every ``concept``-stable partition of ``agents`` (default: all agents)."""
    concept = Concept(concept)
    agents = sorted(game.agents if agents is None else agents)
    if len(agents) > guard:
        raise CapacityError(f"{len(agents)} agents exceed the enumeration guard {guard}")
    if concept is Concept.PO:
        D, V = utility_vectors(game, agents)
        keep = _non_dominated(V)
        R = rgs_array(len(D))
        return [Partition.from_rgs(R[r].tolist(), D) for r in np.flatnonzero(keep)]
    M = game.scaled[1]
    found = []
    for p in partitions_of(agents, guard):
        if _first_deviation(M, p.blocks, concept) is None:
            found.append(p)
    return found


def exists_stable(game: Game, concept: Concept, guard: int = DEFAULT_PO_GUARD) -> bool:
    concept = Concept(concept)
    if game.n > guard:
        raise CapacityError(f"{game.n} agents exceed the enumeration guard {guard}")
    if concept is Concept.PO:
        D, V = utility_vectors(game, game.agents)
        return any(
            not ((V >= V[r]).all(axis=1) & (V > V[r]).any(axis=1)).any() for r in range(len(V))
        )
    M = game.scaled[1]
    return any(_first_deviation(M, p.blocks, concept) is None for p in partitions_of(game.agents, guard))


class ObservationKey(NamedTuple):
    """Everything an online algorithm knows when the ``arrived``-th agent appears."""

    arrived: int
    utilities: tuple
    partition: tuple[int, ...]

    def digest(self) -> str:
        text = repr((self.arrived, [[str(v) for v in row] for row in self.utilities], self.partition))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def observation_key(obs: Observation) -> ObservationKey:
    return ObservationKey(obs.game.n, obs.game.utilities, obs.partition.rgs())


@dataclass(frozen=True)
class SolveResult:
    value: Fraction
    mode: Mode
    concept: Concept
    policy: dict = field(repr=False)
    nodes: int = 0

    def as_policy(self) -> TablePolicy:
        return TablePolicy(self.policy)


class TablePolicy(OnlinePolicy):
    """Replays the placements chosen by :func:`solve_minimax`."""

    name = "minimax-table"

    def __init__(self, table: dict):
        self.table = table

    def place(self, obs):
        try:
            return self.table[observation_key(obs)]
        except KeyError:
            raise ProtocolViolation("observation not covered by the solved policy") from None


def _check_mode(dist: InstanceDistribution, mode) -> Mode:
    mode = Mode(mode)
    if mode is Mode.EXPECTED and not dist.distributional:
        raise ModeError(f"{dist.family} is a worst-case family; use mode 'worst'")
    if not dist.entries:
        raise DomainError("empty instance distribution")
    return mode


class _Solver:
    def __init__(self, dist, concept, mode, node_guard, guard):
        self.concept, self.mode = concept, mode
        self.node_guard, self.guard = node_guard, guard
        self.matrices: list[tuple] = []  # interned prefix matrices
        self.games: dict[int, Game] = {}
        ids: dict[tuple, int] = {}
        self.weight: dict[int, object] = {}  # mass of entries still arriving at a prefix
        self.stop_weight: dict[int, object] = {}
        self.children: dict[int, list[int]] = {}
        root = None
        for entry in dist.entries:
            H = entry.arrival_game().utilities
            L = len(H)
            w = entry.probability if mode is Mode.EXPECTED else 1
            parent = None
            for s in range(1, L + 1):
                key = tuple(row[:s] for row in H[:s])
                pid = ids.get(key)
                if pid is None:
                    pid = ids[key] = len(self.matrices)
                    self.matrices.append(key)
                    self.weight[pid] = 0
                    self.stop_weight[pid] = None
                    self.children[pid] = []
                    if parent is not None:
                        self.children[parent].append(pid)
                self.weight[pid] += w
                parent = pid
                if s == 1:
                    root = pid
            sw = self.stop_weight[parent]
            self.stop_weight[parent] = w if sw is None else sw + w
        self.root = root
        self.memo: dict[tuple, tuple] = {}

    def stable(self, pid, rgs) -> bool:
        game = self.games.get(pid)
        if game is None:
            M = self.matrices[pid]
            game = self.games[pid] = Game._trusted(M, tuple(range(len(M))))
        if self.concept is Concept.PO:
            return is_stable(game, Partition.from_rgs(rgs), Concept.PO, self.guard).stable
        blocks = {}
        for p, b in enumerate(rgs):
            blocks.setdefault(b, []).append(p)
        return _first_deviation(game.scaled[1], list(blocks.values()), self.concept) is None

    def value(self, pid, rgs):
        key = (pid, rgs)
        hit = self.memo.get(key)
        if hit is not None:
            return hit[0]
        expected = self.mode is Mode.EXPECTED
        ceiling = self.weight[pid] if expected else 1
        stop = self.stop_weight[pid]
        nblocks = max(rgs) + 1 if rgs else 0
        best = best_place = None
        for place in (*range(nblocks), START_SINGLETON):
            nxt = rgs + (nblocks if place is None else place,)
            if expected:
                v = stop * self.stable(pid, nxt) if stop is not None else 0
                for child in self.children[pid]:
                    v += self.value(child, nxt)
            else:
                v = 1
                if stop is not None and not self.stable(pid, nxt):
                    v = 0
                for child in self.children[pid]:
                    if v == 0:
                        break
                    v = min(v, self.value(child, nxt))
            if best is None or v > best:
                best, best_place = v, place
            if best == ceiling:
                break
        self.memo[key] = (best, best_place)
        if len(self.memo) > self.node_guard:
            raise CapacityError(f"observation tree exceeds the node guard {self.node_guard}")
        return best

    def complete(self):
        """Solve every observation the chosen placements can reach.

        Worst mode stops scanning children once a placement is known to
        fail, so some reachable observations may not have been visited.
        """
        stack, seen = [(self.root, ())], set()
        while stack:
            pid, rgs = key = stack.pop()
            if key in seen:
                continue
            seen.add(key)
            if key not in self.memo:
                self.value(pid, rgs)
            place = self.memo[key][1]
            nblocks = max(rgs) + 1 if rgs else 0
            nxt = rgs + (nblocks if place is None else place,)
            stack.extend((child, nxt) for child in self.children[pid])


def solve_minimax(
    dist: InstanceDistribution,
    concept: Concept,
    mode: Mode | str = Mode.EXPECTED,
    node_guard: int = DEFAULT_NODE_GUARD,
    guard: int = DEFAULT_PO_GUARD,
) -> SolveResult:
    """Best success value over all deterministic online algorithms.

    An algorithm is a map from what it has observed (the prefix game in
    arrival indexing and its own partition so far) to a placement.  Entries
    that share an observed prefix cannot be told apart, so the value of an
    observation is the best placement's summed value over the entries
    consistent with it; entries are scored when their arrivals end.
    ``mode="expected"`` weights entries by probability, ``mode="worst"``
    takes the minimum over entries.
    """
    concept = Concept(concept)
    mode = _check_mode(dist, mode)
    solver = _Solver(dist, concept, mode, node_guard, guard)
    depth = max(e.length for e in dist.entries)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * depth + 100))
    value = Fraction(solver.value(solver.root, ()))
    solver.complete()
    policy = {
        ObservationKey(len(rgs) + 1, solver.matrices[pid], rgs): place
        for (pid, rgs), (_, place) in solver.memo.items()
    }
    return SolveResult(value, mode, concept, policy, len(solver.memo))


def _success_probability(H: Game, policy: OnlinePolicy, concept, guard, t=0, part=None) -> Fraction:
    part = Partition() if part is None else part
    if t == H.n:
        return Fraction(int(is_stable(H, part, concept, guard).stable))
    obs = Observation(H.prefix(t + 1), part)
    total = Fraction(0)
    for place, prob in policy.distribution(obs):
        if place is not None and not (isinstance(place, (int, np.integer)) and 0 <= place < len(part.blocks)):
            raise ProtocolViolation(f"{policy.name} returned placement {place!r}")
        if prob:
            nxt = part.with_agent(t, None if place is None else int(place))
            total += prob * _success_probability(H, policy, concept, guard, t + 1, nxt)
    return total


def evaluate_policy(
    dist: InstanceDistribution,
    policy: OnlinePolicy,
    concept: Concept,
    mode: Mode | str = Mode.EXPECTED,
    guard: int = DEFAULT_PO_GUARD,
) -> Fraction:
    """Exact success value of ``policy`` on ``dist``.

    Randomized policies are handled through their placement distribution, so
    the result is exact for them too.
    """
    concept = Concept(concept)
    mode = _check_mode(dist, mode)
    values = [(e.probability, _success_probability(e.arrival_game(), policy, concept, guard)) for e in dist.entries]
    if mode is Mode.EXPECTED:
        return sum((p * v for p, v in values), Fraction(0))
    return min(v for _, v in values)
