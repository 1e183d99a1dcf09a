from pydantic import BaseModel, Field

from ralab.backends.step import STAGES, StageTimings

STEP_LOG_COLUMNS = ("step", "rss", "action", "fsr", "reward",
                    *(f"{stage}_ns" for stage in STAGES))


class StepRecord(BaseModel):
    """One pass of the decide / deploy / reward / state / train loop"""
    step: int = Field(ge=0, description="Index of the step within the run")
    rss: float = Field(description="State the action was decided on, dBm")
    action: int = Field(ge=0, description="Deployed MCS index")
    fsr: float = Field(description="Frame success rate over the observation window")
    reward: float = Field(description="Reward of the observation window")
    decide_ns: int = Field(ge=0)
    train_ns: int = Field(ge=0)
    set_action_ns: int = Field(ge=0)
    reward_wait_ns: int = Field(ge=0)
    get_reward_ns: int = Field(ge=0)
    get_state_ns: int = Field(ge=0)
    loss: float | None = Field(default=None, description="Training loss, when the agent computed one")

    @classmethod
    def from_step(cls, step: int, rss: float, action: int, fsr: float, reward: float,
                  timings: StageTimings, loss: float | None = None) -> "StepRecord":
        return cls(step=step, rss=rss, action=action, fsr=fsr, reward=reward, loss=loss,
                   **{f"{stage}_ns": ns for stage, ns in timings.as_dict().items()})

    @property
    def timings(self) -> StageTimings:
        return StageTimings(**{stage: getattr(self, f"{stage}_ns") for stage in STAGES})

    def log_row(self) -> dict[str, float | int]:
        return {column: getattr(self, column) for column in STEP_LOG_COLUMNS}
