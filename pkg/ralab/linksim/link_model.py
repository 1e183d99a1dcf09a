"""Parametric 802.11n link: logistic frame success rate against RSS, one
threshold per MCS

"""
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ralab.core.mcs import MCS_TABLE, N_MCS, McsIndex, theoretical_rate
from ralab.core.reward import FrameStats

DEFAULT_THRESHOLDS_DBM = (-88.0, -85.0, -82.0, -79.0, -76.0, -72.0, -68.0, -64.0)


class LinkModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    thresholds_dbm: tuple[float, ...] = Field(default=DEFAULT_THRESHOLDS_DBM,
                                              description="RSS at which each MCS delivers half its frames")
    steepness: float = Field(default=1.0, gt=0.0, description="Logistic slope k in 1/dB")
    attempts_rate: float = Field(default=1000.0, gt=0.0, description="Frames attempted per second")

    @field_validator("thresholds_dbm")
    @classmethod
    def _strictly_increasing(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if len(value) != N_MCS:
            raise ValueError(f"expected {N_MCS} thresholds, got {len(value)}")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("thresholds must be strictly increasing with the MCS index")
        return value


def fsr_at(model: LinkModel, mcs: McsIndex, rss: float) -> float:
    """Probability that a frame sent with `mcs` at `rss` dBm succeeds"""
    z = model.steepness * (model.thresholds_dbm[mcs] - rss)

    # evaluated on the side where exp cannot overflow
    if z >= 0.0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def generate_frames(model: LinkModel, mcs: McsIndex, rss: float,
                    duration: float, rng: np.random.Generator) -> FrameStats:
    """Frames sent over `duration` seconds: a fixed attempt count and binomial successes.

    One `rng.binomial` draw per call, nothing else, so a PCG64 generator with the
    same seed replays the same counts.
    """
    if duration < 0.0:
        raise ValueError(f"duration must be non-negative, got {duration}")

    return send_frames(model, mcs, rss, round(model.attempts_rate * duration), rng)


def send_frames(model: LinkModel, mcs: McsIndex, rss: float,
                attempts: int, rng: np.random.Generator) -> FrameStats:
    """Binomial successes of `attempts` frames; no draw when there is nothing to send"""
    if attempts == 0:
        return FrameStats(successes=0, attempts=0)

    successes = int(rng.binomial(attempts, fsr_at(model, mcs, rss)))
    return FrameStats(successes=successes, attempts=attempts)


def expected_rewards(model: LinkModel, rss: float) -> list[float]:
    """Expected reward of every MCS at `rss`"""
    return [fsr_at(model, mcs, rss) * theoretical_rate(mcs) / MCS_TABLE.max_rate for mcs in McsIndex]


def oracle_best_mcs(model: LinkModel, rss: float) -> McsIndex:
    """Brute-force best MCS at `rss`. Ties go to the lower index."""
    rewards = expected_rewards(model, rss)
    best = McsIndex.MCS0
    for mcs in McsIndex:
        if rewards[mcs] > rewards[best]:
            best = mcs
    return best
