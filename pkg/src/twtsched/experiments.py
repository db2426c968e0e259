"""Grouping + RA experiment drivers: single runs and parameter sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import config as cfgmod
from .engine import EpisodeMetrics, mean_stderr, run_episode
from .grouping import EvalSpec, greedy_grouping, rr_grouping, simulated_valuation
from .model import GroupAssignment, Scenario

log = logging.getLogger(__name__)


def eval_spec(doc: dict, ra: str) -> EvalSpec:
    g = doc["grouping"]
    return EvalSpec(horizon=int(g["eval_horizon"]), seeds=tuple(int(s) for s in g["eval_seeds"]),
                    ra=g["eval_ra"] or ra)


def make_grouping(doc: dict, scenario: Scenario, routine: str, ra: str) -> GroupAssignment:
    trips = list(scenario.triplets)
    if routine == "rr":
        return rr_grouping(scenario.sta_ids, trips)
    if routine == "fixed":
        return cfgmod.fixed_groups(doc, trips)
    if routine == "greedy":
        spec = eval_spec(doc, ra)
        log.info("greedy grouping of %d STAs into %d groups (%s valuation, %d blocks x %d seeds)",
                 len(scenario.stas), len(trips), spec.ra, spec.horizon, len(spec.seeds))
        return greedy_grouping(scenario.sta_ids, trips, simulated_valuation(scenario, spec))
    raise ValueError(f"unknown grouping routine {routine!r}")


def _episode(args) -> EpisodeMetrics:
    scenario, ga, ra, horizon, seed = args
    return run_episode(scenario, ga, ra, horizon, seed)


def map_jobs(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving map, optionally over worker processes."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


@dataclass
class SweepResult:
    axis: str
    rows: list[dict] = field(default_factory=list)
    groupings: dict = field(default_factory=dict)   # (axis_value, grouping, ra) -> member lists

    def values(self, axis_value, grouping: str, ra: str) -> list[float]:
        return [r["system_timely_throughput"] for r in self.rows
                if r["axis_value"] == axis_value and r["grouping"] == grouping and r["ra"] == ra]

    def summary(self) -> list[dict]:
        keys = []
        for r in self.rows:
            k = (r["axis_value"], r["grouping"], r["ra"])
            if k not in keys:
                keys.append(k)
        out = []
        for v, g, ra in keys:
            mean, se = mean_stderr(self.values(v, g, ra))
            out.append({"axis_value": v, "grouping": g, "ra": ra, "mean": mean, "stderr": se,
                        "n": len(self.values(v, g, ra))})
        return out

    def stat(self, axis_value, grouping: str, ra: str) -> tuple[float, float]:
        return mean_stderr(self.values(axis_value, grouping, ra))


def sweep_scenario(doc: dict, axis: str, value) -> Scenario:
    if axis == "p_avg":
        return cfgmod.scenario(doc, p_avg=float(value))
    if axis == "num_stas":
        return cfgmod.scenario(doc, num_stas=int(value))
    raise ValueError(f"unknown sweep axis {axis!r}")


def sweep(doc: dict, axis: str, values: Iterable, combos: Sequence[Sequence[str]],
          seeds: Sequence[int], horizon: int, jobs: int = 1) -> SweepResult:
    """Run every (axis value, grouping, ra, seed) episode; grouping is redone per axis value."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one axis value")
    result = SweepResult(axis)
    jobs_list, keys = [], []
    for v in values:
        sc = sweep_scenario(doc, axis, v)
        for grouping, ra in combos:
            ga = make_grouping(doc, sc, grouping, ra)
            result.groupings[(v, grouping, ra)] = ga.members()
            for seed in seeds:
                jobs_list.append((sc, ga, ra, horizon, seed))
                keys.append((v, grouping, ra, seed))
    metrics = map_jobs(_episode, jobs_list, jobs)
    for (v, grouping, ra, seed), m in zip(keys, metrics):
        row = {"axis_value": v, "grouping": grouping, "ra": ra, "seed": seed,
               "system_timely_throughput": m.system_timely_throughput,
               "violations": m.total_violations, "max_power": m.max_power}
        for sta, tt in zip(m.sta_ids, m.timely_throughput):
            row[f"sta{sta}"] = float(tt)
        result.rows.append(row)
    return result
