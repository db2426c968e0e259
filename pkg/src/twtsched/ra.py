"""Per-block resource allocation: drift-plus-penalty, round-robin and greedy routines.

Every routine sees a :class:`SlotObservation` covering the STAs of the group
whose service period contains the current block, and returns an
:class:`RaDecision` of (sta, ru, power) triples. At most one RU per STA and
one STA per RU is ever assigned, and every power is a level of the
configured power set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assignment import solve_max_assignment, solve_min_assignment
from .model import GlobalConfig
from .phy import rate_array

_BUDGET_TOL = 1e-9

RA_ROUTINES = ("dpp", "rr", "greedy", "gbu")


@dataclass
class SlotObservation:
    """State seen by an allocator at block ``t``; arrays are aligned with ``stas``.

    ``backlog`` is B_m(t), the buffer at the start of the block before the
    arrivals ``arrivals`` = a_m(t) are admitted.
    """

    t: int
    stas: tuple[int, ...]
    backlog: np.ndarray
    arrivals: np.ndarray
    gains: np.ndarray          # (A, U) channel power gains
    vq: np.ndarray             # G_m(t)
    energy: np.ndarray         # energy spent through block t-1, watt*blocks
    payload_bits: np.ndarray
    buffer_cap: np.ndarray
    p_avg: np.ndarray

    @property
    def available(self) -> np.ndarray:
        """Packets transmittable this block, min(B + a, B_max)."""
        return np.minimum(self.backlog + self.arrivals, self.buffer_cap)

    def index(self, sta: int) -> int:
        return self.stas.index(sta)


@dataclass(frozen=True)
class RaDecision:
    pairs: tuple[tuple[int, int, float], ...] = ()   # (sta id, ru index, power in W)

    @property
    def assign(self) -> dict[int, int]:
        return {m: k for m, k, _ in self.pairs}

    @property
    def power(self) -> dict[int, float]:
        return {m: p for m, _, p in self.pairs}

    def sta_power(self, sta: int) -> float:
        return sum(p for m, _, p in self.pairs if m == sta)

    def is_feasible(self, active, num_rus: int, levels, p_max: float) -> bool:
        """One RU per STA, one STA per RU, schedule window and power limits."""
        stas = [m for m, _, _ in self.pairs]
        rus = [k for _, k, _ in self.pairs]
        lv = set(levels)
        return (len(set(stas)) == len(stas) and len(set(rus)) == len(rus)
                and all(m in active for m in stas)
                and all(0 <= k < num_rus for k in rus)
                and all(p in lv and p <= p_max for _, _, p in self.pairs))


# --- virtual queues and Lyapunov bookkeeping -------------------------------------------

def virtual_queue_update(g, p_actual, p_avg):
    """G <- max(G - P_avg + P, 0); scalars or arrays."""
    return np.maximum(np.asarray(g, dtype=float) - p_avg + p_actual, 0.0) if np.ndim(g) \
        else max(g - p_avg + p_actual, 0.0)


def lyapunov(backlog, vq) -> float:
    b = np.asarray(backlog, dtype=float)
    g = np.asarray(vq, dtype=float)
    return 0.5 * float(b @ b) + 0.5 * float(g @ g)


def drift_bound(backlog, vq, arrivals, served, discarded, power, p_avg) -> float:
    """Right-hand side of the one-step drift inequality for a realised transition."""
    b, g, a, r, d, p, pa = (np.asarray(x, dtype=float)
                            for x in (backlog, vq, arrivals, served, discarded, power, p_avg))
    return float(0.5 * np.sum(pa ** 2 + p ** 2 + a ** 2 + (r + d) ** 2)
                 + np.sum(g * (p - pa)) + np.sum(b * (a - r - d)))


# --- shared helpers ----------------------------------------------------------------------

def _floor_packets(rates: np.ndarray, beta: np.ndarray, cfg: GlobalConfig) -> np.ndarray:
    return np.floor(rates * cfg.ftt_seconds / beta + 1e-9).astype(np.int64)


def level_capacity(obs: SlotObservation, cfg: GlobalConfig) -> np.ndarray:
    """Capacity tensor (A, U, |P|) over the configured power levels."""
    levels = np.asarray(cfg.power_levels, dtype=float)
    rates = rate_array(levels[None, None, :], obs.gains[:, :, None], cfg.ru_bandwidth_hz, cfg.noise_power_w)
    return _floor_packets(rates, obs.payload_bits.astype(float)[:, None, None], cfg)


def sta_capacity(obs: SlotObservation, cfg: GlobalConfig, power: np.ndarray) -> np.ndarray:
    """Capacity matrix (A, U) when STA i transmits at ``power[i]``."""
    rates = rate_array(np.asarray(power, dtype=float)[:, None], obs.gains, cfg.ru_bandwidth_hz, cfg.noise_power_w)
    return _floor_packets(rates, obs.payload_bits.astype(float)[:, None], cfg)


def ub_value(obs: SlotObservation, decision: RaDecision, cfg: GlobalConfig,
             discarded: np.ndarray | None = None) -> float:
    """U_B = sum G (P - P_avg) + sum B (a - R - d) - V sum R for ``decision``.

    R follows the min-form of the per-block timely throughput; ``discarded``
    defaults to zero (it does not depend on the decision).
    """
    A = len(obs.stas)
    P = np.zeros(A)
    R = np.zeros(A)
    avail = obs.available
    for m, k, p in decision.pairs:
        i = obs.index(m)
        P[i] = p
        cap = sta_capacity(obs, cfg, np.full(A, p))[i, k]
        R[i] = min(cap, avail[i])
    d = np.zeros(A) if discarded is None else np.asarray(discarded, dtype=float)
    return float(np.sum(obs.vq * (P - obs.p_avg)) + np.sum(obs.backlog * (obs.arrivals - R - d))
                 - cfg.v_param * np.sum(R))


# --- drift-plus-penalty --------------------------------------------------------------------

def dpp_cost_tensor(obs: SlotObservation, cfg: GlobalConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per (STA, RU, power level) cost G P - (B + V) R and the matching R."""
    levels = np.asarray(cfg.power_levels, dtype=float)
    R = np.minimum(level_capacity(obs, cfg), obs.available[:, None, None])
    cost = obs.vq[:, None, None] * levels[None, None, :] \
        - (obs.backlog[:, None, None] + cfg.v_param) * R
    return cost, R


def dpp_pair_cost(m: int, k: int, obs: SlotObservation, cfg: GlobalConfig) -> tuple[float, float]:
    """Best power level for STA ``m`` on RU ``k`` and its cost; ties go to the lower power."""
    cost, _ = dpp_cost_tensor(obs, cfg)
    i = obs.index(m)
    j = int(np.argmin(cost[i, k]))
    return float(cfg.power_levels[j]), float(cost[i, k, j])


def dpp_step(obs: SlotObservation, cfg: GlobalConfig) -> RaDecision:
    """Minimise U_B over one-to-one assignments and power levels.

    Leaving a pair unassigned costs zero, so the assignment runs on
    min(cost, 0) and pairs that would not lower U_B are dropped afterwards.
    """
    if not obs.stas:
        return RaDecision()
    cost, R = dpp_cost_tensor(obs, cfg)
    best = np.argmin(cost, axis=2)
    ii, kk = np.indices(best.shape)
    best_cost = cost[ii, kk, best]
    best_r = R[ii, kk, best]
    pairs = []
    for i, k in solve_min_assignment(np.minimum(best_cost, 0.0)):
        c = best_cost[i, k]
        if c > 0 or (c == 0 and best_r[i, k] == 0):
            continue
        pairs.append((obs.stas[i], k, float(cfg.power_levels[best[i, k]])))
    return RaDecision(tuple(pairs))


# --- baselines -------------------------------------------------------------------------------

def budget_power(t: int, spent_energy: float, p_avg: float, p_max: float, levels) -> float:
    """Largest level <= min(p_avg * t - spent, p_max), or 0 when none fits."""
    budget = min(max(0.0, p_avg * t - spent_energy), p_max)
    best = 0.0
    for p in levels:
        if p <= budget + _BUDGET_TOL:
            best = p
    return float(best)


def budget_powers(obs: SlotObservation, cfg: GlobalConfig) -> np.ndarray:
    return np.array([budget_power(obs.t, e, pa, cfg.p_max, cfg.power_levels)
                     for e, pa in zip(obs.energy, obs.p_avg)])


@dataclass
class RoundRobinState:
    rotation: int = 0


def rr_step(obs: SlotObservation, state: RoundRobinState, cfg: GlobalConfig) -> RaDecision:
    """Cyclic RU allocation ignoring channel and buffer; the offset advances every call."""
    n = len(obs.stas)
    if n == 0:
        return RaDecision()
    U = cfg.num_rus
    order = sorted(range(n), key=lambda i: obs.stas[i])
    r = state.rotation
    state.rotation += 1
    if n >= U:
        chosen = [(order[(r + j) % n], j) for j in range(U)]
    else:
        chosen = [(order[j], (r + j) % U) for j in range(n)]
    power = budget_powers(obs, cfg)
    return RaDecision(tuple((obs.stas[i], k, float(power[i])) for i, k in chosen if power[i] > 0))


def greedy_step(obs: SlotObservation, cfg: GlobalConfig, buffer_aware: bool = True) -> RaDecision:
    """Max-weight assignment on the per-block timely throughput (or raw throughput) matrix."""
    if not obs.stas:
        return RaDecision()
    power = budget_powers(obs, cfg)
    value = sta_capacity(obs, cfg, power)
    if buffer_aware:
        value = np.minimum(value, obs.available[:, None])
    pairs = []
    for i, k in solve_max_assignment(value):
        if value[i, k] > 0:
            pairs.append((obs.stas[i], k, float(power[i])))
    return RaDecision(tuple(pairs))


# --- routine objects ---------------------------------------------------------------------------

class Allocator:
    name = ""

    def allocate(self, obs: SlotObservation, group: int = 0) -> RaDecision:
        raise NotImplementedError


@dataclass
class DppAllocator(Allocator):
    cfg: GlobalConfig
    name: str = "dpp"

    def allocate(self, obs, group=0):
        return dpp_step(obs, self.cfg)


@dataclass
class RoundRobinAllocator(Allocator):
    cfg: GlobalConfig
    name: str = "rr"
    states: dict = field(default_factory=dict)

    def allocate(self, obs, group=0):
        return rr_step(obs, self.states.setdefault(group, RoundRobinState()), self.cfg)


@dataclass
class GreedyAllocator(Allocator):
    cfg: GlobalConfig
    buffer_aware: bool = True
    name: str = "greedy"

    def allocate(self, obs, group=0):
        return greedy_step(obs, self.cfg, self.buffer_aware)


def make_allocator(name: str, cfg: GlobalConfig) -> Allocator:
    if name == "dpp":
        return DppAllocator(cfg)
    if name == "rr":
        return RoundRobinAllocator(cfg)
    if name == "greedy":
        return GreedyAllocator(cfg, True)
    if name == "gbu":
        return GreedyAllocator(cfg, False, name="gbu")
    raise ValueError(f"unknown RA routine {name!r}; expected one of {RA_ROUTINES}")
