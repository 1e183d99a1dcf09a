"""RSS trajectories that drive the simulated link

"""
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ralab.core.state import RSS_MAX_DBM, RSS_MIN_DBM, clamp_rss

NS_PER_S = 1_000_000_000


class TraceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["constant", "random_walk", "step"] = "constant"
    level: float = Field(default=-50.0, description="constant: the RSS level")
    start: float = Field(default=-60.0, description="random_walk: first RSS value")
    step_std: float = Field(default=1.0, ge=0.0, description="random_walk: dB per sqrt(second)")
    low: float = Field(default=RSS_MIN_DBM, description="random_walk: lower bound")
    high: float = Field(default=RSS_MAX_DBM, description="random_walk: upper bound")
    levels: tuple[float, ...] = Field(default=(-40.0, -80.0), description="step: levels, cycled")
    dwell_s: float = Field(default=1.0, gt=0.0, description="step: time spent on each level")
    seed: int = 0

    @model_validator(mode="after")
    def _check_bounds(self) -> "TraceConfig":
        if self.low > self.high:
            raise ValueError(f"low={self.low} above high={self.high}")
        if self.kind == "step" and not self.levels:
            raise ValueError("step trace needs at least one level")
        return self


class RssTrace:
    """Stateful RSS trajectory. Time is kept in integer nanoseconds.

    constant:    always `level`
    random_walk: Gaussian increments with std `step_std * sqrt(dt)`, clamped to [low, high]
    step:        `levels[k mod len(levels)]` during the k-th dwell period
    """

    def __init__(self, config: TraceConfig):
        self.config = config
        self.elapsed_ns = 0
        self.rng = np.random.default_rng(config.seed)
        self._low = clamp_rss(config.low)
        self._high = clamp_rss(config.high)
        self._dwell_ns = round(config.dwell_s * NS_PER_S)

        match config.kind:
            case "constant":
                self.rss = clamp_rss(config.level)
            case "random_walk":
                self.rss = min(max(config.start, self._low), self._high)
            case "step":
                self.rss = clamp_rss(config.levels[0])

    def advance_ns(self, dt_ns: int) -> float:
        if dt_ns < 0:
            raise ValueError(f"dt must be non-negative, got {dt_ns} ns")

        self.elapsed_ns += dt_ns
        match self.config.kind:
            case "random_walk":
                scale = self.config.step_std * math.sqrt(dt_ns / NS_PER_S)
                step = float(self.rng.normal(0.0, scale))
                self.rss = min(max(self.rss + step, self._low), self._high)
            case "step":
                levels = self.config.levels
                self.rss = clamp_rss(levels[(self.elapsed_ns // self._dwell_ns) % len(levels)])
        return self.rss


def advance_trace(trace: RssTrace, dt: float) -> float:
    """Advance `trace` by `dt` seconds and return the RSS at the new time"""
    if dt < 0.0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    return trace.advance_ns(round(dt * NS_PER_S))
