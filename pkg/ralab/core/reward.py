"""Frame counters, frame success rate and the rate-weighted reward

"""
from dataclasses import dataclass
from typing import NewType

from ralab.core.mcs import MCS_TABLE, McsIndex, theoretical_rate
from ralab.errors import CounterRegression, DomainError, InvariantViolation, ZeroAttempts

RewardValue = NewType("RewardValue", float)


@dataclass(frozen=True, slots=True)
class FrameStats:
    """Cumulative frame transmission counters"""
    successes: int
    attempts: int

    def __post_init__(self) -> None:
        if self.successes < 0 or self.attempts < 0:
            raise InvariantViolation(f"negative frame counters {self}")
        if self.successes > self.attempts:
            raise InvariantViolation(f"successes {self.successes} > attempts {self.attempts}")

    def __add__(self, other: "FrameStats") -> "FrameStats":
        return FrameStats(successes=self.successes + other.successes,
                          attempts=self.attempts + other.attempts)


ZERO_STATS = FrameStats(successes=0, attempts=0)


def compute_fsr(before: FrameStats, after: FrameStats) -> float:
    """Frame success rate over the window between two counter snapshots.

    Raises CounterRegression when a counter went backwards and ZeroAttempts when
    nothing was attempted in the window.
    """
    d_succ = after.successes - before.successes
    d_att = after.attempts - before.attempts

    if d_succ < 0 or d_att < 0:
        raise CounterRegression(f"counters went backwards: {before} -> {after}")

    if d_att == 0:
        raise ZeroAttempts(f"no frame attempted between {before} and {after}")

    if d_succ > d_att:
        raise InvariantViolation(f"window has {d_succ} successes for {d_att} attempts")

    return d_succ / d_att


def compute_reward(fsr: float, mcs: McsIndex) -> RewardValue:
    """FSR weighted by the rate of `mcs` relative to the highest rate. In [0, 1].

    """
    # also rejects NaN
    if not 0.0 <= fsr <= 1.0:
        raise DomainError(f"fsr={fsr} outside [0, 1]")
    return RewardValue(fsr * theoretical_rate(mcs) / MCS_TABLE.max_rate)
