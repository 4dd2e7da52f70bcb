"""Experiment orchestration: Monte Carlo success estimates and the
possibility/impossibility matrix over stability concepts and game classes."""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np
from scipy.stats import binomtest

from .adversary import Entry, FamilySpec, InstanceDistribution, generate, sample
from .algorithms import make_policy
from .errors import DomainError, ModeError
from .game import random_game
from .online import OnlinePolicy, run_online
from .oracle import solve_minimax
from .stability import DEFAULT_PO_GUARD, Concept, is_stable

__all__ = [
    "SCHEMA_VERSION",
    "wilson_interval",
    "GuaranteeEstimate",
    "estimate_guarantee",
    "CellSpec",
    "ExperimentConfig",
    "CellResult",
    "TableReport",
    "default_table_config",
    "table_matrix",
    "CLASSES",
]

SCHEMA_VERSION = 1

Source = Union[InstanceDistribution, Callable[[np.random.Generator], Entry]]


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[Fraction, Fraction]:
    """Wilson score interval, returned as exact binary fractions of the float bounds."""
    if trials < 1 or not 0 <= successes <= trials:
        raise DomainError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    p_hat = Fraction(successes, trials)
    # float rounding must not push the interval off its own centre estimate
    return min(Fraction(ci.low), p_hat), max(Fraction(ci.high), p_hat)


@dataclass(frozen=True)
class GuaranteeEstimate:
    """Empirical success rate of one policy on one instance family.

    The rate is conditional on the family; it is not a bound over all games.
    """

    policy: str
    concept: str
    family: str
    params: dict
    trials: int
    successes: int
    p_hat: Fraction
    wilson95: tuple[Fraction, Fraction]
    seed: int

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "policy": self.policy,
            "concept": self.concept,
            "family": self.family,
            "params": {k: str(v) for k, v in self.params.items()},
            "trials": self.trials,
            "successes": self.successes,
            "p_hat": str(self.p_hat),
            "wilson95": [float(self.wilson95[0]), float(self.wilson95[1])],
            "seed": self.seed,
        }


def _count_successes(policy: OnlinePolicy, source: Source, concept: Concept, seed: int, trials: range, guard: int) -> int:
    hits = 0
    for trial in trials:
        rng = np.random.default_rng([seed, trial])
        entry = sample(source, rng=rng) if isinstance(source, InstanceDistribution) else source(rng)
        game = entry.arrival_game()
        trace = run_online(game, None, policy, rng=rng)
        hits += is_stable(game, trace.final, concept, guard).stable
    return hits


def estimate_guarantee(
    policy: OnlinePolicy,
    source: Source,
    concept: Concept,
    trials: int,
    seed: int = 0,
    guard: int = DEFAULT_PO_GUARD,
    workers: int = 1,
) -> GuaranteeEstimate:
    """Run ``policy`` on ``trials`` draws from ``source`` and count stable outcomes.

    Trial ``t`` uses the stream ``default_rng([seed, t])`` for both the draw
    and the policy's coin flips, so the counts do not depend on how trials
    are split across ``workers`` processes.
    """
    concept = Concept(concept)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if isinstance(source, InstanceDistribution):
        if not source.distributional:
            raise ModeError(f"{source.family} is a worst-case family and cannot be sampled")
        family, params = source.family, dict(source.params)
    else:
        family, params = getattr(source, "__name__", "sampler"), {}
    if workers > 1:
        chunks = [range(lo, min(lo + math.ceil(trials / workers), trials)) for lo in range(0, trials, math.ceil(trials / workers))]
        with ProcessPoolExecutor(workers) as pool:
            hits = sum(pool.map(_count_successes, *zip(*[(policy, source, concept, seed, c, guard) for c in chunks])))
    else:
        hits = _count_successes(policy, source, concept, seed, range(trials), guard)
    return GuaranteeEstimate(
        policy.name, concept.value, family, params, trials, hits, Fraction(hits, trials), wilson_interval(hits, trials), seed
    )


# ---------------------------------------------------------------- the matrix

CLASSES = ("strict", "FENG", "FEG", "AFG", "AEG")


def class_values(game_class: str, n: int) -> list[int]:
    return {
        "strict": [-3, -2, -1, 1, 2, 3],
        "FENG": [-1, 0, 1],
        "FEG": [-1, 1],
        "AFG": [-1, n],
        "AEG": [-n, 1],
    }[game_class]


@dataclass(frozen=True)
class CellSpec:
    """One cell: a concept, a game class and the evidence to produce.

    Positive cells run ``policy`` on ``trials`` random games of the class
    (every arrival order, every prefix).  Negative cells solve ``family`` and
    compare the optimum with ``bound``.
    """

    concept: Concept
    game_class: str
    policy: str | None = None
    family: str | None = None
    mode: str = "expected"
    params: dict = field(default_factory=dict)
    trials: int = 0
    seed: int = 0

    @property
    def kind(self) -> str:
        return "positive" if self.policy else "negative"


@dataclass(frozen=True)
class ExperimentConfig:
    cells: tuple[CellSpec, ...]


_THM6_VALUES = {"strict": (3, 1), "FENG": (1, 1), "FEG": (1, 1), "AFG": (6, 1), "AEG": (1, 6)}


def default_table_config(instances: int = 10, n_max: int = 5, seed: int = 0, k: int = 2) -> ExperimentConfig:
    """Evidence for every cell of the concept x class matrix.

    Impossibility cells use k = 2 so the thm6 family has n = 6, which makes
    its AFG and AEG variants genuine members of those classes.
    """
    cells = []
    positive = {"CNS": {"FEG", "AEG"}, "CIS": {"strict", "FEG", "AFG", "AEG"}, "PO": {"strict", "FEG", "AFG", "AEG"}}
    for concept in Concept:
        for cls in CLASSES:
            if cls in positive.get(concept.value, ()):
                policy = "cns-matcher" if concept is Concept.CNS else "serial-dictatorship"
                cells.append(CellSpec(concept, cls, policy=policy, params={"n_max": n_max}, trials=instances, seed=seed))
            elif concept in (Concept.NS, Concept.IS):
                x, y = _THM6_VALUES[cls]
                cells.append(CellSpec(concept, cls, family="thm6-is-xy", params={"k": 2, "x": x, "y": y}))
            elif cls == "FENG":
                cells.append(CellSpec(concept, cls, family="thm5-cis-feng", params={"k": k}))
            else:
                cells.append(CellSpec(concept, cls, family="thm3-cns-afg", params={"k": k}))
    return ExperimentConfig(tuple(cells))


@dataclass(frozen=True)
class CellResult:
    spec: CellSpec
    passed: bool
    detail: dict

    def to_dict(self) -> dict:
        return {
            "concept": self.spec.concept.value,
            "class": self.spec.game_class,
            "kind": self.spec.kind,
            "designation": self.spec.policy or self.spec.family,
            "params": {k: str(v) for k, v in self.spec.params.items()},
            "passed": self.passed,
            **self.detail,
        }


@dataclass(frozen=True)
class TableReport:
    results: tuple[CellResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "all_passed": self.passed, "cells": [r.to_dict() for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lookup = {(r.spec.concept.value, r.spec.game_class): r for r in self.results}
        width = 16
        lines = [("concept".ljust(8) + "".join(c.ljust(width) for c in CLASSES)).rstrip()]
        for concept in Concept:
            row = concept.value.ljust(8)
            for cls in CLASSES:
                r = lookup.get((concept.value, cls))
                if r is None:
                    cell = "-"
                elif r.spec.kind == "positive":
                    cell = f"yes {r.detail['orders']}o" if r.passed else "FAIL"
                else:
                    cell = f"no {r.detail['value']}" if r.passed else f"FAIL {r.detail['value']}"
                row += cell.ljust(width)
            lines.append(row.rstrip())
        lines.append("yes: arrival orders checked, all prefixes stable; no: best deterministic success value on the adversarial family")
        return "\n".join(lines)


def _bound(family: str, params: dict) -> Fraction:
    if family in ("thm3-cns-afg", "thm5-cis-feng"):
        return Fraction(1, 2 ** params["k"])
    if family == "thm6-is-xy":
        return Fraction(1, params["k"])
    return Fraction(0)


def _run_positive(spec: CellSpec) -> CellResult:
    rng = np.random.default_rng([spec.seed, CLASSES.index(spec.game_class), list(Concept).index(spec.concept)])
    policy = make_policy(spec.policy)
    symmetric = spec.concept is Concept.CNS
    n_max = int(spec.params.get("n_max", 5))
    orders = failures = 0
    first_failure = None
    for _ in range(spec.trials):
        n = int(rng.integers(1, n_max + 1))
        game = random_game(n, class_values(spec.game_class, n), rng, symmetric=symmetric)
        for order in itertools.permutations(range(n)):
            trace = run_online(game, order, policy)
            orders += 1
            if not all(is_stable(game, p, spec.concept).stable for p in trace.partitions):
                failures += 1
                if first_failure is None:
                    first_failure = {"utilities": [[str(v) for v in row] for row in game.utilities], "order": list(order)}
    detail = {"instances": spec.trials, "orders": orders, "failures": failures}
    if first_failure:
        detail["first_failure"] = first_failure
    return CellResult(spec, failures == 0, detail)


def _run_negative(spec: CellSpec) -> CellResult:
    params = spec.params
    dist = generate(FamilySpec(spec.family, k=int(params.get("k", 1)), x=Fraction(params.get("x", 1)), y=Fraction(params.get("y", 1))))
    result = solve_minimax(dist, spec.concept, spec.mode)
    bound = _bound(spec.family, {"k": int(params.get("k", 1))})
    return CellResult(spec, result.value <= bound, {"value": str(result.value), "bound": str(bound), "mode": spec.mode})


def table_matrix(config: ExperimentConfig | None = None) -> TableReport:
    config = default_table_config() if config is None else config
    results = []
    for spec in config.cells:
        if spec.game_class not in CLASSES:
            raise DomainError(f"unknown game class {spec.game_class!r}")
        if spec.policy and spec.family or not (spec.policy or spec.family):
            raise DomainError(f"cell ({spec.concept}, {spec.game_class}) needs exactly one of policy or family")
        results.append(_run_positive(spec) if spec.policy else _run_negative(spec))
    return TableReport(tuple(results))
