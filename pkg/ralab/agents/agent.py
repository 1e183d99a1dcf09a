"""Agent side of the rate adaptation loop: action decision and training."""
import abc
import enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ralab.core.mcs import McsIndex
from ralab.core.state import Transition
from ralab.agents.policy import EpsilonSchedule


class AgentKind(str, enum.Enum):
    Q_LEARNING = "q_learning"
    DQN = "dqn"
    DQN_FROZEN = "dqn_frozen"


class AgentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: AgentKind = AgentKind.Q_LEARNING
    epsilon: EpsilonSchedule = EpsilonSchedule()
    gamma: float = Field(default=0.9, ge=0.0, le=1.0)

    # q_learning
    alpha: float = Field(default=0.1, gt=0.0, le=1.0)

    # dqn, dqn_frozen
    hidden: tuple[int, ...] = Field(default=(24, 24), description="hidden layer widths")
    replay_capacity: int = Field(default=10_000, ge=1)
    batch_size: int = Field(default=32, ge=1)
    lr: float = Field(default=1e-3, gt=0.0)
    state_input: Literal["bin", "rss"] = "bin"

    checkpoint: Path | None = Field(default=None, description="start from this saved agent")
    save_checkpoint: Path | None = Field(default=None, description="save the agent here when a run ends")


class Agent(abc.ABC):
    """Chooses an MCS for an RSS state and learns from transitions.

    States are RSS values in dBm inside the state grid. Tabular agents use the
    bin of the value, the DQN may read it unbinned.
    """

    kind: AgentKind

    def __init__(self, config: AgentConfig):
        self.config = config
        self.decisions = 0

    @property
    def training_enabled(self) -> bool:
        return True

    @abc.abstractmethod
    def action_values(self, state: float) -> list[float]:
        ...

    @abc.abstractmethod
    def decide(self, state: float) -> McsIndex:
        """Epsilon-greedy action. Advances the exploration schedule."""

    @abc.abstractmethod
    def greedy(self, state: float) -> McsIndex:
        """The action chosen with epsilon = 0. Does not touch the random stream."""

    @abc.abstractmethod
    def train(self, transition: Transition) -> float | None:
        """Learn from one transition. Returns the training loss when one was computed."""
