import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import bernoulli_scenario
from oracles import partitions
from twtsched.grouping import (EvalSpec, evaluate_group, greedy_grouping, marginal_gain, rr_grouping,
                               simulated_valuation)
from twtsched.model import GlobalConfig, TwtTriplet
from twtsched.traffic import Bernoulli

T3 = [TwtTriplet(2, 30, 7), TwtTriplet(16, 150, 2), TwtTriplet(10, 90, 5)]


@pytest.mark.parametrize("M, expected", [(8, [[1, 2, 3], [4, 5, 6], [7, 8]]),
                                         (3, [[1], [2], [3]]),
                                         (1, [[1], [], []])])
def test_rr_grouping(M, expected):
    assert rr_grouping(M, T3).members() == expected


def additive(v):
    return lambda l, S: float(sum(v[l][m - 1] for m in S))


def test_greedy_single_sta_picks_better_group():
    ga = greedy_grouping([1], T3[:2], lambda l, S: [2.0, 1.0][l] * len(S))
    assert ga.members() == [[1], []]


def test_greedy_additive_two_by_two():
    ga = greedy_grouping([1, 2], T3[:2], additive([[3, 1], [1, 3]]))
    assert ga.members() == [[1], [2]]


def test_greedy_tie_break_smallest_group_then_sta():
    ga = greedy_grouping([1, 2], T3[:2], lambda l, S: float(len(S)))
    assert ga.members() == [[1, 2], []]


@settings(max_examples=60, deadline=None)
@given(M=st.integers(1, 4), L=st.integers(1, 3), data=st.data())
def test_greedy_optimal_for_additive_valuations(M, L, data):
    v = [data.draw(st.lists(st.integers(0, 9), min_size=M, max_size=M)) for _ in range(L)]
    f = additive(v)
    ga = greedy_grouping(list(range(1, M + 1)), T3[:L], f)
    got = sum(f(l, set(g)) for l, g in enumerate(ga.members()))
    best = max(sum(f(l, g) for l, g in enumerate(p)) for p in partitions(list(range(1, M + 1)), L))
    assert got == best


def test_marginal_gain_from_empty():
    f = additive([[3, 1]])
    assert marginal_gain(f, 0, set(), 1) == 3
    with pytest.raises(ValueError):
        marginal_gain(f, 0, {1}, 1)


def test_evaluate_empty_group_is_zero():
    sc = bernoulli_scenario(M=2)
    assert evaluate_group(sc, [], T3[0]).value == 0.0


def test_evaluate_group_duty_cycle_ceiling():
    # saturated source, deterministic channel: 22 packets per active block, every other block
    cfg = GlobalConfig(gain_set=(10.0,))
    sc = bernoulli_scenario(M=1, p_avg=1.0, traffic=Bernoulli(40, 1.0), cfg=cfg)
    val = evaluate_group(sc, [1], TwtTriplet(1, 2, 1), EvalSpec(horizon=2000, seeds=(1, 2), ra="dpp"))
    assert val.value == pytest.approx(22 / 2)


def test_simulated_valuation_is_memoised_and_deterministic():
    sc = bernoulli_scenario(M=3)
    spec = EvalSpec(horizon=300, seeds=(1,), ra="greedy")
    f = simulated_valuation(sc, spec)
    a = f(0, frozenset({1, 2}))
    assert f(0, frozenset({2, 1})) == a and len(f.cache) == 1
    assert simulated_valuation(sc, spec)(0, frozenset({1, 2})) == a


def test_zero_traffic_sta_adds_nothing():
    sc = bernoulli_scenario(M=2, traffic=Bernoulli(10, 0.0))
    f = simulated_valuation(sc, EvalSpec(horizon=300, seeds=(1,)))
    assert marginal_gain(f, 0, set(), 1) == 0.0
