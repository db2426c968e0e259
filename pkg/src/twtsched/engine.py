"""Block-by-block simulation loop and experiment sweeps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import ChannelProcess
from .errors import ConfigError, InvariantError
from .model import GroupAssignment, Scenario, find_sp_overlap, validate_partition
from .phy import packets_per_block, rate_bps, LinkBudget
from .queueing import StaBuffer
from .ra import Allocator, RaDecision, SlotObservation, make_allocator
from .traffic import TrafficSource

log = logging.getLogger(__name__)

_TRAFFIC_STREAM = 0
_CHANNEL_STREAM = 1


def substream(seed: int, kind: int, sta_id: int) -> np.random.Generator:
    """Independent generator per (seed, purpose, STA); adding STAs leaves others untouched."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), kind, int(sta_id)]))


@dataclass
class Transition:
    """One realised block, all arrays aligned with ``EpisodeMetrics.sta_ids``."""

    t: int
    backlog: np.ndarray
    vq: np.ndarray
    arrivals: np.ndarray
    served: np.ndarray
    discarded: np.ndarray
    power: np.ndarray
    next_backlog: np.ndarray
    next_vq: np.ndarray
    active: tuple[int, ...]
    decision: RaDecision


@dataclass
class EpisodeMetrics:
    ra: str
    seed: int
    horizon: int
    sta_ids: list[int]
    group_of: list[int]
    weights: np.ndarray
    p_avg: np.ndarray
    arrived: np.ndarray
    transmitted: np.ndarray
    discarded_overflow: np.ndarray
    discarded_expiry: np.ndarray
    final_buffer: np.ndarray
    energy: np.ndarray
    final_vq: np.ndarray
    offered_bits: np.ndarray
    max_power: float = 0.0
    violations: dict[str, int] = field(default_factory=dict)

    @property
    def timely_throughput(self) -> np.ndarray:
        """Per-STA average timely throughput, packets per block."""
        return self.transmitted / self.horizon

    @property
    def avg_power(self) -> np.ndarray:
        return self.energy / self.horizon

    @property
    def system_timely_throughput(self) -> float:
        return float(np.sum(self.weights * self.timely_throughput))

    @property
    def conserved(self) -> bool:
        return bool(np.all(self.arrived == self.transmitted + self.discarded_overflow
                           + self.discarded_expiry + self.final_buffer))

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    def rows(self) -> list[dict]:
        out = []
        tt, pw = self.timely_throughput, self.avg_power
        for i, m in enumerate(self.sta_ids):
            out.append({
                "seed": self.seed, "ra": self.ra, "sta": m, "group": self.group_of[i] + 1,
                "weight": float(self.weights[i]), "arrived": int(self.arrived[i]),
                "transmitted": int(self.transmitted[i]),
                "discarded_overflow": int(self.discarded_overflow[i]),
                "discarded_expiry": int(self.discarded_expiry[i]),
                "final_buffer": int(self.final_buffer[i]),
                "timely_throughput": float(tt[i]), "avg_power": float(pw[i]),
                "p_avg": float(self.p_avg[i]), "final_virtual_queue": float(self.final_vq[i]),
            })
        out.append({
            "seed": self.seed, "ra": self.ra, "sta": "system", "group": "",
            "weight": "", "arrived": int(self.arrived.sum()),
            "transmitted": int(self.transmitted.sum()),
            "discarded_overflow": int(self.discarded_overflow.sum()),
            "discarded_expiry": int(self.discarded_expiry.sum()),
            "final_buffer": int(self.final_buffer.sum()),
            "timely_throughput": self.system_timely_throughput,
            "avg_power": float(self.avg_power.sum()), "p_avg": "", "final_virtual_queue": "",
        })
        return out


METRIC_COLUMNS = ["seed", "ra", "sta", "group", "weight", "arrived", "transmitted",
                  "discarded_overflow", "discarded_expiry", "final_buffer",
                  "timely_throughput", "avg_power", "p_avg", "final_virtual_queue"]


def check_schedule(scenario: Scenario, ga: GroupAssignment) -> None:
    report = validate_partition(ga, scenario.sta_ids)
    if not report.ok:
        raise ConfigError(f"invalid grouping: {report.describe()}")
    triplets = [g.triplet for g in ga.groups]
    clash = find_sp_overlap(triplets, [bool(g.stas) for g in ga.groups])
    if clash is not None:
        a, b, t = clash
        raise ConfigError(f"service periods of groups {a + 1} and {b + 1} overlap at block {t}")


def run_episode(scenario: Scenario, ga: GroupAssignment, ra: str | Allocator, horizon: int, seed: int,
                trace: Callable[[Transition], None] | None = None) -> EpisodeMetrics:
    """Simulate ``horizon`` blocks; deterministic in (scenario, ga, ra, horizon, seed)."""
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    check_schedule(scenario, ga)
    cfg = scenario.system
    allocator = make_allocator(ra, cfg) if isinstance(ra, str) else ra

    stas = sorted(scenario.stas, key=lambda s: s.id)
    ids = [s.id for s in stas]
    pos = {m: i for i, m in enumerate(ids)}
    M = len(stas)
    group_of = ga.group_of()
    groups = [(l, g.triplet, sorted(g.stas)) for l, g in enumerate(ga.groups) if g.stas]
    group_idx = [np.array([pos[m] for m in members], dtype=np.int64) for _, _, members in groups]

    sources = [TrafficSource(s.traffic, s.payload_bits, s.deadline_blocks,
                             substream(seed, _TRAFFIC_STREAM, s.id), cfg.ftt_seconds, cfg.a_max)
               for s in stas]
    channels = [ChannelProcess(cfg.gain_set, cfg.num_rus, substream(seed, _CHANNEL_STREAM, s.id),
                               cfg.gain_probs) for s in stas]
    buffers = [StaBuffer(s.buffer_cap) for s in stas]
    gain_values = np.asarray(cfg.gain_set, dtype=float)

    payload = np.array([s.payload_bits for s in stas], dtype=np.int64)
    cap = np.array([s.buffer_cap for s in stas], dtype=np.int64)
    p_avg = np.array([s.p_avg for s in stas], dtype=float)
    weights = np.array([s.weight for s in stas], dtype=float)
    vq = np.zeros(M)
    energy = np.zeros(M)
    offered_bits = np.zeros(M)
    arrivals = np.zeros(M, dtype=np.int64)
    overflow = np.zeros(M, dtype=np.int64)
    backlog = np.zeros(M, dtype=np.int64)
    violations = {"schedule": 0, "power_max": 0, "one_to_one": 0, "buffer_bound": 0, "late_tx": 0}
    max_power = 0.0
    levels = set(cfg.power_levels)

    # active group per block, -1 when no service period is running
    schedule = np.full(horizon + 1, -1, dtype=np.int64)
    tt = np.arange(1, horizon + 1)
    for j, (l, tr, _) in enumerate(groups):
        d = tt - tr.offset_blocks
        on = (d >= 0) & (d % tr.wake_interval_blocks < tr.sp_blocks)
        clash = on & (schedule[1:] >= 0)
        if clash.any():
            t0 = int(tt[clash][0])
            raise ConfigError(f"service periods of groups {groups[int(schedule[t0])][0] + 1} and "
                              f"{l + 1} overlap at block {t0}")
        schedule[1:][on] = j

    ncap_cache: dict[tuple[float, float, int], int] = {}
    zeros_f = np.zeros(M)
    no_decision = RaDecision()

    def capacity(p: float, h: float, beta: int) -> int:
        key = (p, h, beta)
        n = ncap_cache.get(key)
        if n is None:
            n = ncap_cache[key] = packets_per_block(
                rate_bps(LinkBudget(p, h, cfg.ru_bandwidth_hz, cfg.noise_power_w)), beta, cfg.ftt_seconds)
        return n

    for t in range(1, horizon + 1):
        for i in range(M):
            b = buffers[i]
            backlog[i] = b.length
            batch = sources[i].arrivals(t)
            n = batch.count
            arrivals[i] = n
            if n:
                offered_bits[i] += batch.bits
                overflow[i] = b.admit(batch, t)
            else:
                overflow[i] = 0

        j = schedule[t]
        power = zeros_f
        served = None
        decision = no_decision
        active: tuple[int, ...] = ()
        if j >= 0:
            power = np.zeros(M)
            served = np.zeros(M, dtype=np.int64)
            l, _, members = groups[j]
            idx = group_idx[j]
            active = tuple(members)
            gains = np.stack([gain_values[channels[i].indices(t)] for i in idx])
            obs = SlotObservation(t=t, stas=active, backlog=backlog[idx], arrivals=arrivals[idx],
                                  gains=gains, vq=vq[idx], energy=energy[idx],
                                  payload_bits=payload[idx], buffer_cap=cap[idx], p_avg=p_avg[idx])
            decision = allocator.allocate(obs, group=l)
            if not decision.is_feasible(active, cfg.num_rus, levels, cfg.p_max):
                violations["one_to_one"] += _count_infeasible(decision, active, cfg.num_rus)
            row = {m: r for r, m in enumerate(active)}
            for m, k, p in decision.pairs:
                if m not in row:
                    violations["schedule"] += 1
                    continue
                if p > cfg.p_max:
                    violations["power_max"] += 1
                i = pos[m]
                power[i] += p
                max_power = max(max_power, p)
                r = min(capacity(p, float(gains[row[m], k]), int(payload[i])), buffers[i].length)
                if r:
                    buffers[i].transmit(r, t)
                    served[i] = r

        expired = [0] * M
        for i in range(M):
            b = buffers[i]
            if b.runs and b.next_expiry() <= t:
                expired[i] = b.expire(t)
            if b.length > b.cap:
                violations["buffer_bound"] += 1

        next_vq = np.maximum(vq - p_avg + power, 0.0)
        if j >= 0:
            energy += power
        if trace is not None:
            trace(Transition(t=t, backlog=backlog.copy(), vq=vq, arrivals=arrivals.copy(),
                             served=np.zeros(M, dtype=np.int64) if served is None else served,
                             discarded=overflow + np.array(expired, dtype=np.int64), power=power.copy(),
                             next_backlog=np.array([b.length for b in buffers], dtype=np.int64),
                             next_vq=next_vq, active=active, decision=decision))
        vq = next_vq

    violations["late_tx"] = sum(b.late_transmissions for b in buffers)
    metrics = EpisodeMetrics(
        ra=getattr(allocator, "name", str(ra)), seed=seed, horizon=horizon, sta_ids=ids,
        group_of=[group_of[m] for m in ids], weights=weights, p_avg=p_avg,
        arrived=np.array([b.admitted for b in buffers], dtype=np.int64),
        transmitted=np.array([b.transmitted for b in buffers], dtype=np.int64),
        discarded_overflow=np.array([b.discarded_overflow for b in buffers], dtype=np.int64),
        discarded_expiry=np.array([b.discarded_expiry for b in buffers], dtype=np.int64),
        final_buffer=np.array([b.length for b in buffers], dtype=np.int64),
        energy=energy, final_vq=vq, offered_bits=offered_bits, max_power=max_power,
        violations=violations,
    )
    if not metrics.conserved:
        raise InvariantError("packet conservation violated at episode end")
    return metrics


def _count_infeasible(decision: RaDecision, active, num_rus: int) -> int:
    stas = [m for m, _, _ in decision.pairs]
    rus = [k for _, k, _ in decision.pairs]
    return (len(stas) - len(set(stas))) + (len(rus) - len(set(rus))) \
        + sum(1 for k in rus if not 0 <= k < num_rus)


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return math.nan, math.nan
    if x.size == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))
