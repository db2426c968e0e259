import math

import numpy as np
import pytest

from twtsched.errors import ConfigError
from twtsched.traffic import (Bernoulli, BufferedVideo, Cbr, TrafficSource, buffered_video, cbr1, cbr2,
                              mean_rate_bps)


def _source(model, payload=12000, seed=0, a_max=40):
    return TrafficSource(model, payload, 30, np.random.default_rng(seed), 1e-3, a_max)


def _run(src, T):
    counts = np.zeros(T, dtype=np.int64)
    bits = 0.0
    for t in range(1, T + 1):
        b = src.arrivals(t)
        counts[t - 1] = b.count
        bits += b.bits
    return counts, bits


def test_bernoulli_counts_are_zero_or_batch():
    counts, _ = _run(_source(Bernoulli(10, 0.7)), 20000)
    assert set(np.unique(counts)) <= {0, 10}
    assert abs(counts.mean() - 7.0) < 0.1


def test_bernoulli_analytic_rate():
    assert mean_rate_bps(Bernoulli(10, 0.7), 12000) == pytest.approx(84e6)


def test_cbr_periodic_bursts():
    counts, bits = _run(_source(Cbr(3000, 150)), 600)
    # 24000 bits in 12000-bit packets, first burst at block 1
    assert list(np.nonzero(counts)[0] + 1) == [1, 151, 301, 451]
    assert set(counts[counts > 0]) == {2}
    assert bits == pytest.approx(4 * 24000)


def test_cbr_last_fragment_counts_as_packet():
    counts, bits = _run(_source(Cbr(2000, 10), payload=12000), 10)
    assert counts[0] == 2 and bits == pytest.approx(16000)


def test_cbr_zero_burst():
    counts, bits = _run(_source(Cbr(0, 5)), 50)
    assert counts.sum() == 0 and bits == 0
    assert mean_rate_bps(Cbr(0, 5), 12000) == 0


def test_preset_rates():
    assert mean_rate_bps(cbr1()[0], 12000) == pytest.approx(160e3)
    assert mean_rate_bps(cbr2()[0], 12000) == pytest.approx(40000 * 8 / 0.09)
    assert buffered_video()[0].frame_interval_blocks(1e-3) == 33


def test_large_burst_spills_over_a_max():
    # 40000 B = 320000 bits -> 27 packets, released 10 per block with a_max=10
    counts, bits = _run(_source(Cbr(40000, 90), a_max=10), 90)
    assert list(counts[:4]) == [10, 10, 7, 0]
    assert bits == pytest.approx(320000)


def test_bv_weibull_scale_matches_mean():
    m = BufferedVideo()
    assert m.scale_bytes * math.gamma(1 + 1 / m.weibull_shape) == pytest.approx(12e6 / 8 / 30)


def test_bv_frames_arrive_on_interval():
    counts, _ = _run(_source(BufferedVideo(), a_max=10**6), 33 * 20)
    assert all(counts[i] == 0 for i in range(len(counts)) if i % 33 != 0)


def test_blocks_must_increase():
    src = _source(Bernoulli(1, 0.5))
    src.arrivals(3)
    with pytest.raises(ValueError):
        src.arrivals(3)


def test_same_seed_same_sequence():
    a, _ = _run(_source(BufferedVideo(), seed=4), 2000)
    b, _ = _run(_source(BufferedVideo(), seed=4), 2000)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("bad", [lambda: Bernoulli(-1, 0.5), lambda: Bernoulli(1, 1.5),
                                 lambda: Cbr(10, 0), lambda: BufferedVideo(fps=0)])
def test_model_validation(bad):
    with pytest.raises(ConfigError):
        bad()


def test_batch_above_a_max_rejected():
    with pytest.raises(ConfigError):
        _source(Bernoulli(50, 0.5), a_max=40)
