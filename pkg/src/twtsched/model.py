"""Static configuration types, the TWT service-period calendar and partition checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConfigError
from .traffic import TrafficModel


@dataclass(frozen=True)
class StaProfile:
    id: int
    weight: float
    payload_bits: int
    deadline_blocks: int
    buffer_cap: int
    p_avg: float
    traffic: TrafficModel

    def __post_init__(self):
        if self.id < 1:
            raise ConfigError(f"sta {self.id}: id must be >= 1")
        if self.weight < 0:
            raise ConfigError(f"sta {self.id}: weight must be >= 0")
        if self.payload_bits <= 0:
            raise ConfigError(f"sta {self.id}: payload_bits must be > 0")
        if self.deadline_blocks < 1:
            raise ConfigError(f"sta {self.id}: deadline_blocks must be >= 1")
        if self.buffer_cap < 1:
            raise ConfigError(f"sta {self.id}: buffer_cap must be >= 1")
        if self.p_avg < 0:
            raise ConfigError(f"sta {self.id}: p_avg must be >= 0")


@dataclass(frozen=True)
class TwtTriplet:
    """Broadcast TWT parameters, all in blocks of one FTT."""

    offset_blocks: int
    wake_interval_blocks: int
    sp_blocks: int

    def __post_init__(self):
        if self.offset_blocks < 0:
            raise ConfigError("offset_blocks must be >= 0")
        if self.wake_interval_blocks < 1:
            raise ConfigError("wake_interval_blocks must be >= 1")
        if not 1 <= self.sp_blocks <= self.wake_interval_blocks:
            raise ConfigError("sp_blocks must satisfy 1 <= sp_blocks <= wake_interval_blocks")


def is_active(triplet: TwtTriplet, t: int) -> bool:
    """True iff block ``t`` lies in [o + n*tau, o + n*tau + zeta - 1] for some n >= 0."""
    if t < 1:
        raise ValueError("block indices start at 1")
    d = t - triplet.offset_blocks
    if d < 0:
        return False
    return d % triplet.wake_interval_blocks < triplet.sp_blocks


@dataclass(frozen=True)
class Group:
    stas: frozenset[int]
    triplet: TwtTriplet


@dataclass(frozen=True)
class GroupAssignment:
    groups: tuple[Group, ...]

    @classmethod
    def from_lists(cls, members: Sequence[Iterable[int]], triplets: Sequence[TwtTriplet]) -> "GroupAssignment":
        if len(members) != len(triplets):
            raise ConfigError(f"{len(members)} groups given for {len(triplets)} triplets")
        return cls(tuple(Group(frozenset(int(m) for m in g), tr) for g, tr in zip(members, triplets)))

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    def members(self) -> list[list[int]]:
        return [sorted(g.stas) for g in self.groups]

    def group_of(self) -> dict[int, int]:
        """Map STA id -> 0-based group index."""
        return {m: l for l, g in enumerate(self.groups) for m in g.stas}


@dataclass
class PartitionReport:
    duplicated: list[int] = field(default_factory=list)
    missing: list[int] = field(default_factory=list)
    unknown: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.duplicated or self.missing or self.unknown)

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.duplicated:
            parts.append(f"STA(s) {self.duplicated} in more than one group")
        if self.missing:
            parts.append(f"STA(s) {self.missing} not in any group")
        if self.unknown:
            parts.append(f"unknown STA(s) {self.unknown}")
        return "; ".join(parts)


def validate_partition(ga: GroupAssignment, stas: int | Iterable[int]) -> PartitionReport:
    """Check disjointness and coverage. ``stas`` is M (ids 1..M) or an explicit id set."""
    universe = set(range(1, stas + 1)) if isinstance(stas, int) else set(stas)
    seen: dict[int, int] = {}
    for g in ga.groups:
        for m in g.stas:
            seen[m] = seen.get(m, 0) + 1
    return PartitionReport(
        duplicated=sorted(m for m, c in seen.items() if c > 1),
        missing=sorted(universe - seen.keys()),
        unknown=sorted(seen.keys() - universe),
    )


def find_sp_overlap(triplets: Sequence[TwtTriplet], nonempty: Sequence[bool] | None = None,
                    horizon: int | None = None) -> tuple[int, int, int] | None:
    """First block where two SPs coincide, as (group_a, group_b, block) with 0-based groups.

    Only groups flagged in ``nonempty`` are considered. The scan covers one
    hyperperiod past the largest offset unless ``horizon`` is given.
    """
    idx = [l for l in range(len(triplets)) if nonempty is None or nonempty[l]]
    if len(idx) < 2:
        return None
    if horizon is None:
        from math import lcm
        period = 1
        for l in idx:
            period = lcm(period, triplets[l].wake_interval_blocks)
        horizon = max(triplets[l].offset_blocks for l in idx) + period
    for t in range(1, horizon + 1):
        on = [l for l in idx if is_active(triplets[l], t)]
        if len(on) > 1:
            return on[0], on[1], t
    return None


@dataclass(frozen=True)
class GlobalConfig:
    num_rus: int = 4
    ru_bandwidth_hz: float = 20e6
    noise_power_w: float = 1e-3
    ftt_seconds: float = 1e-3
    p_max: float = 1.0
    power_levels: tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 1.0)
    gain_set: tuple[float, ...] = (10.0, 0.1, 0.001)
    gain_probs: tuple[float, ...] | None = None
    v_param: float = 1e4
    a_max: int = 40

    def __post_init__(self):
        if self.num_rus < 1:
            raise ConfigError("num_rus must be >= 1")
        if self.ru_bandwidth_hz <= 0 or self.noise_power_w <= 0 or self.ftt_seconds <= 0:
            raise ConfigError("ru_bandwidth_hz, noise_power_w and ftt_seconds must be > 0")
        if not self.power_levels:
            raise ConfigError("power_levels must be non-empty")
        if list(self.power_levels) != sorted(self.power_levels) or self.power_levels[0] <= 0:
            raise ConfigError("power_levels must be positive and sorted ascending")
        if self.power_levels[-1] > self.p_max:
            raise ConfigError(f"power level {self.power_levels[-1]} exceeds p_max {self.p_max}")
        if not self.gain_set:
            raise ConfigError("gain_set must be non-empty")
        if any(h <= 0 for h in self.gain_set):
            raise ConfigError("gain_set values must be > 0")
        if self.gain_probs is not None:
            if len(self.gain_probs) != len(self.gain_set):
                raise ConfigError("gain_probs must match gain_set in length")
            if any(p < 0 for p in self.gain_probs) or abs(sum(self.gain_probs) - 1.0) > 1e-9:
                raise ConfigError("gain_probs must be a probability vector")
        if self.v_param <= 0:
            raise ConfigError("v_param must be > 0")
        if self.a_max < 1:
            raise ConfigError("a_max must be >= 1")


@dataclass(frozen=True)
class Scenario:
    """Everything a simulation needs besides the grouping, RA routine and seed."""

    system: GlobalConfig
    stas: tuple[StaProfile, ...]
    triplets: tuple[TwtTriplet, ...]

    def __post_init__(self):
        ids = [s.id for s in self.stas]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate STA ids in {ids}")
        for s in self.stas:
            if s.p_avg > self.system.p_max:
                raise ConfigError(f"sta {s.id}: p_avg {s.p_avg} exceeds p_max {self.system.p_max}")
        if not self.triplets:
            raise ConfigError("at least one TWT triplet is required")

    @property
    def sta_ids(self) -> list[int]:
        return [s.id for s in self.stas]

    def profile(self, sta_id: int) -> StaProfile:
        for s in self.stas:
            if s.id == sta_id:
                return s
        raise KeyError(sta_id)

    def subset(self, sta_ids: Iterable[int]) -> "Scenario":
        keep = set(sta_ids)
        return Scenario(self.system, tuple(s for s in self.stas if s.id in keep), self.triplets)

    def lyapunov_constant(self) -> float:
        """C = 1/2 * sum_m (P_avg^2 + P_max^2 + B_max^2 + A_max^2)."""
        sysc = self.system
        return 0.5 * sum(s.p_avg ** 2 + sysc.p_max ** 2 + s.buffer_cap ** 2 + sysc.a_max ** 2
                         for s in self.stas)
