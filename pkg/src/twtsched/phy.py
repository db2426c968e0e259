"""Rate function and per-block timely throughput."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# Guards floor() against products like 1.9999999999 that are 2 in exact arithmetic.
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class LinkBudget:
    power_w: float
    gain: float
    bandwidth_hz: float
    noise_w: float


def rate_bps(lb: LinkBudget) -> float:
    """Shannon rate b * log2(1 + P h / N); zero at zero power."""
    if lb.power_w <= 0:
        return 0.0
    return lb.bandwidth_hz * math.log2(1.0 + lb.power_w * lb.gain / lb.noise_w)


def rate_array(power, gain, bandwidth_hz: float, noise_w: float) -> np.ndarray:
    """Vectorised ``rate_bps`` over broadcastable power/gain arrays."""
    power = np.asarray(power, dtype=float)
    gain = np.asarray(gain, dtype=float)
    r = bandwidth_hz * np.log2(1.0 + power * gain / noise_w)
    return np.where(power > 0, r, 0.0)


def packets_per_block(rate, payload_bits: int, ftt_s: float):
    """floor(FTT * rate / beta); works on scalars and arrays."""
    if payload_bits <= 0:
        raise ConfigError("payload_bits must be > 0")
    x = np.floor(np.asarray(rate, dtype=float) * ftt_s / payload_bits + _FLOOR_EPS)
    return x.astype(np.int64) if x.ndim else int(x)


def timely_throughput(rate_sum_bps: float, payload_bits: int, ftt_s: float,
                      buffer_now: int, buffer_cap: int) -> int:
    """min{floor(FTT * rate / beta), B + a, B_max}."""
    if payload_bits <= 0:
        raise ConfigError("payload_bits must be > 0")
    return min(packets_per_block(rate_sum_bps, payload_bits, ftt_s), int(buffer_now), int(buffer_cap))
