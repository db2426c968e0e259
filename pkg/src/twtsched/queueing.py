"""Deadline-bound per-STA packet buffer.

Within a block the order is: admit arrivals (overflow drops the oldest
packets), transmit earliest-expiry-first, then drop whatever has expired by
the end of the block. A packet whose expiry block equals the current block
can still be sent in that block.
"""

from __future__ import annotations

from .errors import InvariantError
from .traffic import ArrivalBatch


class StaBuffer:
    """FIFO of packet runs ``[arrival_block, expiry_block, count]`` in arrival order."""

    __slots__ = ("cap", "runs", "length", "admitted", "transmitted",
                 "discarded_overflow", "discarded_expiry", "late_transmissions", "_sorted")

    def __init__(self, cap: int):
        if cap < 1:
            raise ValueError("buffer cap must be >= 1")
        self.cap = cap
        self.runs: list[list[int]] = []
        self.length = 0
        self.admitted = 0
        self.transmitted = 0
        self.discarded_overflow = 0
        self.discarded_expiry = 0
        self.late_transmissions = 0
        self._sorted = True  # expiry is non-decreasing along the run list

    def __len__(self) -> int:
        return self.length

    def expiries(self) -> list[int]:
        return [r[1] for r in self.runs for _ in range(r[2])]

    def next_expiry(self) -> int | None:
        """Earliest expiry block in the buffer, None when empty."""
        if not self.runs:
            return None
        if self._sorted:
            return self.runs[0][1]
        return min(r[1] for r in self.runs)

    def conserved(self) -> bool:
        return self.admitted == (self.transmitted + self.discarded_overflow
                                 + self.discarded_expiry + self.length)

    def admit(self, batch: ArrivalBatch | int, t: int, deadline_blocks: int | None = None) -> int:
        """Append arrivals with expiry t + deadline; return the overflow discard count."""
        if isinstance(batch, ArrivalBatch):
            n, deadline = batch.count, batch.deadline_blocks
        else:
            n, deadline = int(batch), deadline_blocks
        if n < 0:
            raise ValueError("arrival count must be >= 0")
        if n == 0:
            return 0
        expiry = t + deadline
        runs = self.runs
        if runs and runs[-1][1] > expiry:
            self._sorted = False
        if runs and runs[-1][0] == t and runs[-1][1] == expiry:
            runs[-1][2] += n
        else:
            runs.append([t, expiry, n])
        self.length += n
        self.admitted += n
        excess = self.length - self.cap
        if excess <= 0:
            return 0
        dropped = excess
        while excess > 0:
            head = runs[0]
            if head[2] <= excess:
                excess -= head[2]
                runs.pop(0)
            else:
                head[2] -= excess
                excess = 0
        self.length = self.cap
        self.discarded_overflow += dropped
        return dropped

    def transmit(self, R: int, t: int) -> int:
        """Remove R packets, earliest expiry first (ties by arrival order)."""
        if R < 0:
            raise ValueError("R must be >= 0")
        if R == 0:
            return 0
        if R > self.length:
            raise InvariantError(f"block {t}: transmitting {R} packets from a buffer of {self.length}")
        runs = self.runs
        if self._sorted:
            order = range(len(runs))
        else:
            order = sorted(range(len(runs)), key=lambda i: (runs[i][1], runs[i][0], i))
        left = R
        for i in order:
            run = runs[i]
            take = min(left, run[2])
            if run[1] < t:
                self.late_transmissions += take
            run[2] -= take
            left -= take
            if left == 0:
                break
        self.runs = [r for r in runs if r[2] > 0]
        if not self._sorted:
            self._sorted = all(self.runs[i][1] <= self.runs[i + 1][1] for i in range(len(self.runs) - 1))
        self.length -= R
        self.transmitted += R
        return R

    def expire(self, t: int) -> int:
        """Drop every packet with expiry_block <= t; return the count."""
        runs = self.runs
        if not runs:
            return 0
        if self._sorted:
            if runs[0][1] > t:
                return 0
            k = 0
            n = 0
            while k < len(runs) and runs[k][1] <= t:
                n += runs[k][2]
                k += 1
            del runs[:k]
        else:
            n = sum(r[2] for r in runs if r[1] <= t)
            if n == 0:
                return 0
            self.runs = [r for r in runs if r[1] > t]
            self._sorted = all(self.runs[i][1] <= self.runs[i + 1][1] for i in range(len(self.runs) - 1))
        self.length -= n
        self.discarded_expiry += n
        return n

    def step(self, batch: ArrivalBatch, R: int, t: int) -> tuple[int, int]:
        """admit -> transmit -> expire; returns (B(t+1), d(t))."""
        d = self.admit(batch, t)
        self.transmit(R, t)
        d += self.expire(t)
        return self.length, d
