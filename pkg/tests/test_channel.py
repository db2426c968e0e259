import numpy as np
import pytest

from twtsched.channel import ChannelProcess, sample_channel
from twtsched.errors import ConfigError

GAINS = (10.0, 0.1, 0.001)


def test_uniform_frequencies():
    x = sample_channel(GAINS, 1000, 100, np.random.default_rng(1))
    for g in GAINS:
        assert abs(np.mean(x == g) - 1 / 3) < 0.01


def test_singleton_gain_set():
    assert np.all(sample_channel((1.0,), 3, 4, np.random.default_rng(0)) == 1.0)


def test_empty_gain_set():
    with pytest.raises(ConfigError):
        sample_channel((), 2, 2, np.random.default_rng(0))


def test_process_deterministic_and_block_indexed():
    a = ChannelProcess(GAINS, 4, np.random.default_rng(7))
    b = ChannelProcess(GAINS, 4, np.random.default_rng(7))
    # b skips ahead; block 3000 must still match
    rows_a = [a.gains_at(t) for t in range(1, 3001)]
    assert np.array_equal(rows_a[-1], b.gains_at(3000))
    assert np.array_equal(a.gains_at(3000), rows_a[-1])


def test_process_is_memoryless():
    p = ChannelProcess(GAINS, 1, np.random.default_rng(3))
    x = np.array([p.indices(t)[0] for t in range(1, 50001)], dtype=float)
    r = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert abs(r) < 0.02


def test_custom_probabilities():
    x = sample_channel(GAINS, 500, 200, np.random.default_rng(2), probs=(0.5, 0.5, 0.0))
    assert not np.any(x == 0.001)
    with pytest.raises(ConfigError):
        sample_channel(GAINS, 1, 1, np.random.default_rng(2), probs=(0.5, 0.6, 0.0))
