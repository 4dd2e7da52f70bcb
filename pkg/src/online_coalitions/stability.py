"""Single-agent deviations, the four deviation-based stability concepts and
Pareto optimality.

A partition may cover only some agents of a game; all checks then consider
exactly the covered agents, which is the same as checking against the
restricted game.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import CapacityError, DomainError, InvalidDeviation
from .game import Game, Partition, coalition_utility, partition_utility
from .partitions import rgs_array

__all__ = [
    "Concept",
    "Deviation",
    "StabilityVerdict",
    "DEFAULT_PO_GUARD",
    "apply_deviation",
    "deviation_gain",
    "consent_abandoned",
    "consent_welcoming",
    "is_deviation",
    "find_deviation",
    "is_stable",
    "pareto_dominates",
    "is_pareto_optimal",
    "utility_vectors",
]

DEFAULT_PO_GUARD = 10


class Concept(str, enum.Enum):
    NS = "NS"
    IS = "IS"
    CNS = "CNS"
    CIS = "CIS"
    PO = "PO"

    def __str__(self):
        return self.value


# (abandoned coalition must consent, welcoming coalition must consent)
_CONSENT = {
    Concept.NS: (False, False),
    Concept.IS: (False, True),
    Concept.CNS: (True, False),
    Concept.CIS: (True, True),
}


@dataclass(frozen=True)
class Deviation:
    """Agent ``agent`` moves to block ``target`` (canonical index), or to a
    new singleton coalition when ``target`` is None."""

    agent: int
    target: int | None = None

    def __str__(self):
        where = "new singleton" if self.target is None else f"block {self.target}"
        return f"agent {self.agent} -> {where}"


@dataclass(frozen=True)
class StabilityVerdict:
    concept: Concept
    stable: bool
    witness: Union[Deviation, Partition, None] = None

    def __bool__(self):
        return self.stable


def _target_block(partition: Partition, dev: Deviation) -> tuple[int, ...]:
    own = partition.block_index(dev.agent)
    if dev.target is None:
        if len(partition.blocks[own]) == 1:
            raise InvalidDeviation(f"agent {dev.agent} already forms a singleton")
        return ()
    if not 0 <= dev.target < len(partition.blocks):
        raise InvalidDeviation(f"no block with index {dev.target}")
    if dev.target == own:
        raise InvalidDeviation(f"agent {dev.agent} already belongs to block {own}")
    return partition.blocks[dev.target]


def apply_deviation(partition: Partition, dev: Deviation) -> Partition:
    target = _target_block(partition, dev)
    i = dev.agent
    blocks = []
    for b in partition.blocks:
        if i in b:
            b = tuple(a for a in b if a != i)
        if b == target:
            b = b + (i,)
        if b:
            blocks.append(b)
    if dev.target is None:
        blocks.append((i,))
    return Partition(tuple(blocks))


def deviation_gain(game: Game, partition: Partition, dev: Deviation) -> Fraction:
    target = _target_block(partition, dev)
    i = dev.agent
    return coalition_utility(game, i, target + (i,)) - partition_utility(game, i, partition)


def consent_abandoned(game: Game, partition: Partition, dev: Deviation) -> bool:
    """Every other member of the deviator's old coalition is weakly better off."""
    _target_block(partition, dev)
    i = dev.agent
    return all(game.u(j, i) <= 0 for j in partition.block_of(i) if j != i)


def consent_welcoming(game: Game, partition: Partition, dev: Deviation) -> bool:
    """Every member of the coalition being joined is weakly better off."""
    target = _target_block(partition, dev)
    return all(game.u(j, dev.agent) >= 0 for j in target)


def is_deviation(game: Game, partition: Partition, dev: Deviation, concept: Concept) -> bool:
    """Whether ``dev`` is an ``concept`` deviation (a Nash deviation plus the consents)."""
    need_abandoned, need_welcoming = _CONSENT[Concept(concept)]
    return (
        deviation_gain(game, partition, dev) > 0
        and (not need_abandoned or consent_abandoned(game, partition, dev))
        and (not need_welcoming or consent_welcoming(game, partition, dev))
    )


def _first_deviation(M, blocks, concept: Concept):
    """Scan order: deviators ascending, targets in block order then a new singleton."""
    need_abandoned, need_welcoming = _CONSENT[concept]
    where = {a: k for k, b in enumerate(blocks) for a in b}
    for i in sorted(where):
        k = where[i]
        own = blocks[k]
        if need_abandoned and any(M[j][i] > 0 for j in own):
            continue
        row = M[i]
        current = sum(row[j] for j in own)
        for t, b in enumerate(blocks):
            if t == k:
                continue
            if sum(row[j] for j in b) > current and not (need_welcoming and any(M[j][i] < 0 for j in b)):
                return i, t
        if current < 0 and len(own) > 1:
            return i, None
    return None


def find_deviation(game: Game, partition: Partition, concept: Concept) -> Deviation | None:
    """The first ``concept`` deviation in deterministic scan order, or None."""
    concept = Concept(concept)
    if concept is Concept.PO:
        raise DomainError("Pareto optimality is not a single-agent deviation concept")
    found = _first_deviation(game.scaled[1], partition.blocks, concept)
    return None if found is None else Deviation(*found)


def is_stable(game: Game, partition: Partition, concept: Concept, guard: int = DEFAULT_PO_GUARD) -> StabilityVerdict:
    concept = Concept(concept)
    if concept is Concept.PO:
        return is_pareto_optimal(game, partition, guard)
    dev = find_deviation(game, partition, concept)
    return StabilityVerdict(concept, dev is None, dev)


def pareto_dominates(game: Game, better: Partition, worse: Partition) -> bool:
    """All agents weakly prefer ``better`` and at least one strictly."""
    if better.domain != worse.domain:
        raise DomainError("Pareto dominance compares partitions of the same agent set")
    strict = False
    for i in better.domain:
        a, b = partition_utility(game, i, better), partition_utility(game, i, worse)
        if a < b:
            return False
        strict = strict or a > b
    return strict


@lru_cache(maxsize=512)
def _vectors_cached(M: tuple[tuple[int, ...], ...]) -> np.ndarray:
    m = len(M)
    big = max((abs(v) for row in M for v in row), default=0) * max(m, 1)
    A = np.array(M, dtype=object if big >= 2**62 else np.int64).reshape(m, m)
    R = rgs_array(m)
    out = []
    for start in range(0, len(R), 4096):
        chunk = R[start:start + 4096]
        same = chunk[:, :, None] == chunk[:, None, :]
        out.append((same * A[None, :, :]).sum(axis=2))
    V = np.concatenate(out) if out else np.zeros((1, 0), dtype=np.int64)
    V.setflags(write=False)
    return V


def utility_vectors(game: Game, agents) -> tuple[tuple[int, ...], np.ndarray]:
    """Scaled utility vectors of every partition of ``agents``.

    Returns the sorted agent tuple ``D`` and an array whose row ``r`` holds
    the (scaled) utility of each agent of ``D`` in the partition encoded by
    restricted growth string ``r`` of ``rgs_array(len(D))``.
    """
    D = tuple(sorted(agents))
    M = game.scaled[1]
    return D, _vectors_cached(tuple(tuple(M[i][j] for j in D) for i in D))


def _vector_of(game: Game, partition: Partition, D) -> list[int]:
    M = game.scaled[1]
    return [sum(M[i][j] for j in partition.block_of(i)) for i in D]


def is_pareto_optimal(game: Game, partition: Partition, guard: int = DEFAULT_PO_GUARD) -> StabilityVerdict:
    """Enumerate every partition of the covered agents and look for a dominating one."""
    m = len(partition.domain)
    if m > guard:
        raise CapacityError(f"Pareto check over {m} agents exceeds the enumeration guard {guard}")
    D, V = utility_vectors(game, partition.domain)
    v = np.array(_vector_of(game, partition, D), dtype=V.dtype)
    dominating = np.flatnonzero((V >= v).all(axis=1) & (V > v).any(axis=1))
    if len(dominating) == 0:
        return StabilityVerdict(Concept.PO, True)
    witness = Partition.from_rgs(rgs_array(m)[dominating[0]].tolist(), D)
    return StabilityVerdict(Concept.PO, False, witness)
