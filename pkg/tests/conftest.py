import numpy as np
import pytest

from twtsched.model import GlobalConfig, Scenario, StaProfile, TwtTriplet
from twtsched.ra import SlotObservation
from twtsched.traffic import Bernoulli


def make_obs(backlog, gains, vq=None, arrivals=None, energy=None, t=1, payload=12000, cap=50,
             p_avg=0.2, stas=None) -> SlotObservation:
    backlog = np.asarray(backlog, dtype=np.int64)
    A = len(backlog)
    z = np.zeros(A)
    return SlotObservation(
        t=t, stas=tuple(stas or range(1, A + 1)), backlog=backlog,
        arrivals=np.zeros(A, dtype=np.int64) if arrivals is None else np.asarray(arrivals, dtype=np.int64),
        gains=np.asarray(gains, dtype=float).reshape(A, -1) if A else np.zeros((0, 4)),
        vq=z.copy() if vq is None else np.asarray(vq, dtype=float),
        energy=z.copy() if energy is None else np.asarray(energy, dtype=float),
        payload_bits=np.full(A, payload, dtype=np.int64), buffer_cap=np.full(A, cap, dtype=np.int64),
        p_avg=np.full(A, p_avg))


def bernoulli_scenario(M=8, p_avg=0.2, triplets=None, traffic=None, cfg=None, deadline=30) -> Scenario:
    traffic = traffic or Bernoulli(10, 0.7)
    stas = tuple(StaProfile(id=m, weight=1.0, payload_bits=12000, deadline_blocks=deadline, buffer_cap=50,
                            p_avg=p_avg, traffic=traffic) for m in range(1, M + 1))
    triplets = triplets or (TwtTriplet(2, 30, 7), TwtTriplet(16, 150, 2), TwtTriplet(10, 90, 5))
    return Scenario(cfg or GlobalConfig(), stas, tuple(triplets))


@pytest.fixture
def cfg():
    return GlobalConfig()


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
