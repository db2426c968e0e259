"""Partitioning STAs into broadcast TWT groups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .engine import run_episode
from .model import Group, GroupAssignment, Scenario, TwtTriplet

Valuation = Callable[[int, frozenset], float]


@dataclass(frozen=True)
class EvalSpec:
    horizon: int = 20000
    seeds: tuple[int, ...] = (101, 102, 103)
    ra: str = "dpp"


@dataclass(frozen=True)
class GroupValuation:
    value: float
    spec: EvalSpec


def evaluate_group(scenario: Scenario, members: Iterable[int], triplet: TwtTriplet,
                   spec: EvalSpec = EvalSpec()) -> GroupValuation:
    """Weighted average timely throughput of ``members`` alone on ``triplet``.

    The estimate is a finite-horizon simulation averaged over ``spec.seeds``;
    the empty group is worth 0 by definition.
    """
    members = frozenset(members)
    if not members:
        return GroupValuation(0.0, spec)
    sub = scenario.subset(members)
    ga = GroupAssignment((Group(members, triplet),))
    total = 0.0
    for seed in spec.seeds:
        total += run_episode(sub, ga, spec.ra, spec.horizon, seed).system_timely_throughput
    return GroupValuation(total / len(spec.seeds), spec)


def simulated_valuation(scenario: Scenario, spec: EvalSpec = EvalSpec()) -> Valuation:
    """f(l, S) backed by simulation, memoised on (l, S)."""
    cache: dict[tuple[int, frozenset], float] = {}

    def f(l: int, members: frozenset) -> float:
        key = (l, frozenset(members))
        if key not in cache:
            cache[key] = evaluate_group(scenario, members, scenario.triplets[l], spec).value
        return cache[key]

    f.cache = cache
    return f


def marginal_gain(valuation: Valuation, l: int, current: Iterable[int], m: int) -> float:
    current = frozenset(current)
    if m in current:
        raise ValueError(f"STA {m} already in group {l + 1}")
    base = 0.0 if not current else valuation(l, current)
    return valuation(l, current | {m}) - base


def greedy_grouping(sta_ids: Sequence[int], triplets: Sequence[TwtTriplet],
                    valuation: Valuation) -> GroupAssignment:
    """Repeatedly place the (STA, group) pair with the largest marginal gain.

    Ties go to the smallest group index, then the smallest STA id.
    """
    L = len(triplets)
    if L < 1:
        raise ValueError("at least one group is required")
    groups: list[frozenset] = [frozenset() for _ in range(L)]
    left = sorted(sta_ids)
    while left:
        best = None
        for l in range(L):
            for m in left:
                gain = marginal_gain(valuation, l, groups[l], m)
                if best is None or gain > best[0]:
                    best = (gain, l, m)
        _, l, m = best
        groups[l] = groups[l] | {m}
        left.remove(m)
    return GroupAssignment(tuple(Group(g, tr) for g, tr in zip(groups, triplets)))


def rr_grouping(sta_ids: int | Sequence[int], triplets: Sequence[TwtTriplet]) -> GroupAssignment:
    """Fill groups in order with ascending STA ids, floor((M + L - 1) / L) per group."""
    ids = list(range(1, sta_ids + 1)) if isinstance(sta_ids, int) else sorted(sta_ids)
    L = len(triplets)
    if L < 1:
        raise ValueError("at least one group is required")
    size = (len(ids) + L - 1) // L
    groups = [frozenset(ids[l * size:(l + 1) * size]) for l in range(L)]
    return GroupAssignment(tuple(Group(g, tr) for g, tr in zip(groups, triplets)))
