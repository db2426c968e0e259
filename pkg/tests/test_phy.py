import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twtsched.errors import ConfigError
from twtsched.phy import LinkBudget, packets_per_block, rate_array, rate_bps, timely_throughput


def test_rate_reference_point():
    r = rate_bps(LinkBudget(1.0, 1.0, 2e6, 2e-7))
    assert r == pytest.approx(2e6 * math.log2(1 + 5e6))
    assert r / 1e6 == pytest.approx(44.507, abs=1e-3)


def test_zero_power_zero_rate():
    assert rate_bps(LinkBudget(0.0, 10.0, 2e6, 1e-3)) == 0.0


@given(p1=st.floats(0.01, 1.0), p2=st.floats(0.01, 1.0), h=st.floats(1e-3, 10.0))
def test_rate_monotone_in_power(p1, p2, h):
    lo, hi = sorted((p1, p2))
    assert rate_bps(LinkBudget(lo, h, 2e6, 1e-3)) <= rate_bps(LinkBudget(hi, h, 2e6, 1e-3))


def test_rate_array_matches_scalar():
    p = np.array([0.0, 0.2, 1.0])
    got = rate_array(p, 0.1, 20e6, 1e-3)
    assert np.allclose(got, [rate_bps(LinkBudget(x, 0.1, 20e6, 1e-3)) for x in p])


@pytest.mark.parametrize("rate, buf, cap, expected", [(24e6, 5, 10, 2), (120e6, 3, 10, 3), (0.0, 5, 10, 0),
                                                     (120e6, 30, 10, 10)])
def test_timely_throughput(rate, buf, cap, expected):
    assert timely_throughput(rate, 12000, 1e-3, buf, cap) == expected


def test_exact_multiple_not_floored_down():
    # 36 Mbps * 1 ms / 12000 bits is 3 in exact arithmetic
    assert packets_per_block(36e6, 12000, 1e-3) == 3


def test_nonpositive_payload():
    with pytest.raises(ConfigError):
        timely_throughput(1e6, 0, 1e-3, 1, 1)
