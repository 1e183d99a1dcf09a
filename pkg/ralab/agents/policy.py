import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ralab.core.mcs import N_MCS, McsIndex


class EpsilonSchedule(BaseModel):
    """Exploration rate decaying linearly from `start` to `end` over `decay_steps` decisions"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    start: float = Field(default=1.0, ge=0.0, le=1.0)
    end: float = Field(default=0.05, ge=0.0, le=1.0)
    decay_steps: int = Field(default=5000, ge=0)

    @model_validator(mode="after")
    def _check_order(self) -> "EpsilonSchedule":
        if self.end > self.start:
            raise ValueError(f"end={self.end} above start={self.start}")
        return self

    def value(self, step: int) -> float:
        if self.decay_steps == 0 or step >= self.decay_steps:
            return self.end
        return self.start + (self.end - self.start) * step / self.decay_steps


def greedy_action(values: np.ndarray) -> McsIndex:
    # np.argmax returns the first maximum, ties go to the lowest index
    return McsIndex(int(np.argmax(values)))


def eps_greedy(values: np.ndarray, epsilon: float, rng: np.random.Generator) -> McsIndex:
    """One uniform draw decides between exploring and exploiting.
    Exploring draws a second number for the action."""
    if rng.random() < epsilon:
        return McsIndex(int(rng.integers(0, N_MCS)))
    return greedy_action(values)
