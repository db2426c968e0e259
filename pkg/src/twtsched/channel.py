"""I.i.d. block-fading channel power gains drawn from a finite gain set."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ConfigError

_CHUNK = 2048


def _probs(gain_set: Sequence[float], probs: Sequence[float] | None) -> np.ndarray | None:
    if not len(gain_set):
        raise ConfigError("gain_set must be non-empty")
    if probs is None:
        return None
    p = np.asarray(probs, dtype=float)
    if p.shape != (len(gain_set),) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ConfigError("gain probabilities must be a probability vector over gain_set")
    return p


def sample_channel(gain_set: Sequence[float], M: int, U: int, rng: np.random.Generator,
                   probs: Sequence[float] | None = None) -> np.ndarray:
    """One M x U matrix of gains, each entry drawn independently from ``gain_set``."""
    p = _probs(gain_set, probs)
    idx = rng.choice(len(gain_set), size=(M, U), p=p)
    return np.asarray(gain_set, dtype=float)[idx]


class ChannelProcess:
    """Gain-index sequence for one STA across all RUs, one row per block.

    Rows are produced in fixed-size chunks from a dedicated stream, so the
    gains seen by an STA at block t do not depend on which other STAs are
    simulated or which blocks were queried.
    """

    def __init__(self, gain_set: Sequence[float], num_rus: int, rng: np.random.Generator,
                 probs: Sequence[float] | None = None):
        self.gains = np.asarray(gain_set, dtype=float)
        self._p = _probs(gain_set, probs)
        self.num_rus = num_rus
        self.rng = rng
        self._start = 1
        self._chunk: np.ndarray | None = None

    def indices(self, t: int) -> np.ndarray:
        while self._chunk is None or t >= self._start + _CHUNK:
            if self._chunk is not None:
                self._start += _CHUNK
            self._chunk = self.rng.choice(len(self.gains), size=(_CHUNK, self.num_rus), p=self._p)
        if t < self._start:
            raise ValueError(f"block {t} already discarded (chunk starts at {self._start})")
        return self._chunk[t - self._start]

    def gains_at(self, t: int) -> np.ndarray:
        return self.gains[self.indices(t)]
