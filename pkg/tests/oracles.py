"""Brute-force reference implementations used by the tests."""

import itertools
import math

import numpy as np


def packets(power, gain, payload, cfg):
    if power <= 0:
        return 0
    bits = cfg.ru_bandwidth_hz * math.log2(1 + power * gain / cfg.noise_power_w) * cfg.ftt_seconds
    return math.floor(bits / payload + 1e-9)


def ub(obs, cfg, choice):
    """U_B for ``choice`` = {row index: (ru, power)}."""
    total = 0.0
    for i in range(len(obs.stas)):
        P, R = 0.0, 0
        if i in choice:
            k, P = choice[i]
            R = min(packets(P, obs.gains[i, k], int(obs.payload_bits[i]), cfg),
                    int(obs.backlog[i] + obs.arrivals[i]), int(obs.buffer_cap[i]))
        total += obs.vq[i] * (P - obs.p_avg[i]) + obs.backlog[i] * (obs.arrivals[i] - R) - cfg.v_param * R
    return total


def all_choices(A, U, levels):
    """Every partial one-to-one STA->RU map combined with every power tuple."""
    for rus in itertools.product([None] + list(range(U)), repeat=A):
        used = [k for k in rus if k is not None]
        if len(used) != len(set(used)):
            continue
        rows = [i for i in range(A) if rus[i] is not None]
        for powers in itertools.product(levels, repeat=len(rows)):
            yield {i: (rus[i], p) for i, p in zip(rows, powers)}


def min_ub(obs, cfg):
    return min(ub(obs, cfg, c) for c in all_choices(len(obs.stas), obs.gains.shape[1], cfg.power_levels))


def decision_choice(obs, decision):
    return {obs.index(m): (k, p) for m, k, p in decision.pairs}


def partitions(items, L):
    """All assignments of ``items`` to L labelled (possibly empty) groups."""
    for labels in itertools.product(range(L), repeat=len(items)):
        groups = [set() for _ in range(L)]
        for m, l in zip(items, labels):
            groups[l].add(m)
        yield groups


def random_dpp_instance(rng):
    from twtsched.model import GlobalConfig
    from conftest import make_obs

    A = int(rng.integers(1, 4))
    U = int(rng.integers(1, 4))
    nlev = int(rng.integers(1, 4))
    levels = tuple(sorted(rng.choice([0.1, 0.25, 0.5, 0.75, 1.0], size=nlev, replace=False).tolist()))
    cfg = GlobalConfig(num_rus=U, ru_bandwidth_hz=float(rng.choice([1e6, 5e6, 20e6])),
                       noise_power_w=1e-3, power_levels=levels,
                       gain_set=(10.0, 0.1, 0.001), v_param=float(rng.choice([0.5, 2.0, 10.0, 1e4])))
    obs = make_obs(backlog=rng.integers(0, 12, A), arrivals=rng.integers(0, 6, A),
                   gains=rng.choice(cfg.gain_set, size=(A, U)), vq=rng.uniform(0, 60, A).round(3),
                   payload=int(rng.choice([3000, 12000])), cap=int(rng.integers(3, 15)),
                   p_avg=float(rng.choice([0.1, 0.2, 0.5])), stas=sorted(rng.choice(np.arange(1, 9), A, replace=False)))
    return obs, cfg
