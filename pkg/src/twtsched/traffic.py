"""Per-block packet arrival generators.

Three source families are supported: Bernoulli batches, buffered video with
Weibull-distributed frame sizes, and constant bit rate bursts. Frames and
bursts are fragmented into packets of the STA's payload size; the last
fragment counts as a full packet but only carries the leftover bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import ConfigError

# Shape commonly used for video frame sizes in WLAN evaluation methodology.
BV_WEIBULL_SHAPE = 0.8112

_CHUNK = 4096


@dataclass(frozen=True)
class Bernoulli:
    batch_size: int
    prob: float

    def __post_init__(self):
        if self.batch_size < 0:
            raise ConfigError("bernoulli batch_size must be >= 0")
        if not 0.0 <= self.prob <= 1.0:
            raise ConfigError("bernoulli prob must lie in [0, 1]")


@dataclass(frozen=True)
class BufferedVideo:
    fps: float = 30.0
    target_rate_bps: float = 12e6
    weibull_shape: float = BV_WEIBULL_SHAPE
    weibull_scale: float | None = None  # bytes; derived from the target rate when None

    def __post_init__(self):
        if self.fps <= 0:
            raise ConfigError("video fps must be > 0")
        if self.target_rate_bps < 0:
            raise ConfigError("video target_rate_bps must be >= 0")
        if self.weibull_shape <= 0:
            raise ConfigError("video weibull_shape must be > 0")

    @property
    def mean_frame_bytes(self) -> float:
        return self.target_rate_bps / (8.0 * self.fps)

    @property
    def scale_bytes(self) -> float:
        if self.weibull_scale is not None:
            return self.weibull_scale
        return self.mean_frame_bytes / math.gamma(1.0 + 1.0 / self.weibull_shape)

    def frame_interval_blocks(self, ftt_seconds: float) -> int:
        return max(1, round(1.0 / (self.fps * ftt_seconds)))


@dataclass(frozen=True)
class Cbr:
    burst_bytes: float
    interval_blocks: int

    def __post_init__(self):
        if self.burst_bytes < 0:
            raise ConfigError("cbr burst_bytes must be >= 0")
        if self.interval_blocks < 1:
            raise ConfigError("cbr interval_blocks must be >= 1")


TrafficModel = Union[Bernoulli, BufferedVideo, Cbr]


class ArrivalBatch(NamedTuple):
    count: int
    bits: float
    deadline_blocks: int


def mean_rate_bps(model: TrafficModel, payload_bits: int, ftt_seconds: float = 1e-3) -> float:
    """Analytic mean offered payload rate."""
    if isinstance(model, Bernoulli):
        return model.batch_size * model.prob * payload_bits / ftt_seconds
    if isinstance(model, Cbr):
        return model.burst_bytes * 8.0 / (model.interval_blocks * ftt_seconds)
    if isinstance(model, BufferedVideo):
        return model.target_rate_bps
    raise TypeError(f"unknown traffic model {model!r}")


def max_batch(model: TrafficModel) -> int | None:
    """Largest per-block count the model can emit before spilling, None if unbounded."""
    if isinstance(model, Bernoulli):
        return model.batch_size
    return None


class TrafficSource:
    """Stateful generator for one STA, driven by its own RNG substream.

    Bursts larger than ``a_max`` packets are released over consecutive
    blocks, at most ``a_max`` per block, so every batch respects the
    arrival bound while the offered load is preserved.
    """

    def __init__(self, model: TrafficModel, payload_bits: int, deadline_blocks: int,
                 rng: np.random.Generator, ftt_seconds: float = 1e-3, a_max: int = 40):
        if payload_bits <= 0:
            raise ConfigError("payload_bits must be > 0")
        if isinstance(model, Bernoulli) and model.batch_size > a_max:
            raise ConfigError(f"bernoulli batch_size {model.batch_size} exceeds a_max {a_max}")
        self.model = model
        self.payload_bits = payload_bits
        self.deadline_blocks = deadline_blocks
        self.rng = rng
        self.ftt_seconds = ftt_seconds
        self.a_max = a_max
        self._last_t = 0
        self._pending = 0
        self._pending_bits = 0.0
        self._chunk_start = 1
        self._chunk: np.ndarray | None = None
        self._is_bernoulli = isinstance(model, Bernoulli)
        self._empty = ArrivalBatch(0, 0.0, deadline_blocks)
        if isinstance(model, BufferedVideo):
            self._interval = model.frame_interval_blocks(ftt_seconds)
        elif isinstance(model, Cbr):
            self._interval = model.interval_blocks
        else:
            self._interval = 1

    def _bernoulli(self, t: int) -> int:
        m = self.model
        if m.prob == 0.0 or m.batch_size == 0:
            return 0
        while self._chunk is None or t >= self._chunk_start + _CHUNK:
            if self._chunk is not None:
                self._chunk_start += _CHUNK
            self._chunk = self.rng.random(_CHUNK) < m.prob
        return m.batch_size if self._chunk[t - self._chunk_start] else 0

    def _burst_bytes(self) -> float:
        m = self.model
        if isinstance(m, Cbr):
            return m.burst_bytes
        return float(self.rng.weibull(m.weibull_shape) * m.scale_bytes)

    def arrivals(self, t: int) -> ArrivalBatch:
        if t <= self._last_t:
            raise ValueError(f"blocks must be requested in increasing order (got {t} after {self._last_t})")
        self._last_t = t
        if self._is_bernoulli:
            n = self._bernoulli(t)
            return ArrivalBatch(n, float(n * self.payload_bits), self.deadline_blocks) if n else self._empty

        if (t - 1) % self._interval == 0:
            bits = self._burst_bytes() * 8.0
            if bits > 0:
                self._pending += math.ceil(bits / self.payload_bits)
                self._pending_bits += bits
        if self._pending == 0:
            return self._empty
        n = min(self._pending, self.a_max)
        self._pending -= n
        if self._pending == 0:
            bits, self._pending_bits = self._pending_bits, 0.0
        else:
            bits = float(n * self.payload_bits)
            self._pending_bits -= bits
        return ArrivalBatch(n, bits, self.deadline_blocks)


def generate_arrivals(source: TrafficSource, t: int) -> ArrivalBatch:
    return source.arrivals(t)


# Presets for the realistic traffic mix: (model, associated deadline in blocks at FTT = 1 ms).
def buffered_video() -> tuple[TrafficModel, int]:
    return BufferedVideo(fps=30.0, target_rate_bps=12e6), 30


def cbr1() -> tuple[TrafficModel, int]:
    return Cbr(burst_bytes=3000, interval_blocks=150), 150


def cbr2() -> tuple[TrafficModel, int]:
    return Cbr(burst_bytes=40000, interval_blocks=90), 90


PRESETS = {"bv": buffered_video, "cbr1": cbr1, "cbr2": cbr2}
