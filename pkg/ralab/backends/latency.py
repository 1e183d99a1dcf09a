"""Latencies injected into environment stages.

They let the profiler be checked against a known ground truth. The default
is no injection.
"""
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

NS_PER_MS = 1_000_000

InjectedStage = Literal["set_action", "get_reward", "get_state"]


class LatencySpec(BaseModel):
    """Fixed latency, or one sampled per call. Negative samples are cut to 0."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["fixed", "normal", "uniform"] = "fixed"
    ms: float = Field(default=0.0, ge=0.0, description="fixed value or normal mean")
    std_ms: float = Field(default=0.0, ge=0.0)
    low_ms: float = Field(default=0.0, ge=0.0)
    high_ms: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="before")
    @classmethod
    def _from_number(cls, data: Any) -> Any:
        # `set_action = 15.105` is shorthand for a fixed latency
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            return {"kind": "fixed", "ms": data}
        return data

    @model_validator(mode="after")
    def _check_range(self) -> "LatencySpec":
        if self.kind == "uniform" and self.low_ms > self.high_ms:
            raise ValueError(f"low_ms={self.low_ms} above high_ms={self.high_ms}")
        return self


class LatencyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    set_action: LatencySpec = LatencySpec()
    get_reward: LatencySpec = LatencySpec()
    get_state: LatencySpec = LatencySpec()


class LatencyModel:

    def __init__(self, config: LatencyConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng

    def sample_ns(self, stage: InjectedStage) -> int:
        spec: LatencySpec = getattr(self.config, stage)
        match spec.kind:
            case "fixed":
                ms = spec.ms
            case "normal":
                ms = max(float(self.rng.normal(spec.ms, spec.std_ms)), 0.0)
            case "uniform":
                ms = float(self.rng.uniform(spec.low_ms, spec.high_ms))
        return round(ms * NS_PER_MS)
