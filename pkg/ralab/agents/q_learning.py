"""Tabular Q-learning over the RSS state grid"""
import math

import numpy as np
from loguru import logger

from ralab.core.mcs import N_MCS, McsIndex
from ralab.core.state import N_STATES, Transition, clamp_rss, state_index
from ralab.errors import InvariantViolation
from ralab.agents.agent import Agent, AgentConfig, AgentKind
from ralab.agents.policy import eps_greedy, greedy_action


def state_row(state: float) -> int:
    return state_index(int(clamp_rss(math.floor(state))))


class QTable:
    """Action values, one row per state bin and one column per MCS"""

    def __init__(self, alpha: float, gamma: float, values: np.ndarray | None = None):
        if values is None:
            values = np.zeros((N_STATES, N_MCS), dtype=np.float64)
        values = np.array(values, dtype=np.float64)

        if values.shape != (N_STATES, N_MCS):
            raise InvariantViolation(f"Q-table shape {values.shape}, expected {(N_STATES, N_MCS)}")
        if not np.all(np.isfinite(values)):
            raise InvariantViolation("Q-table holds non-finite values")

        self.alpha = alpha
        self.gamma = gamma
        self.values = values

    def row(self, state: float) -> np.ndarray:
        return self.values[state_row(state)]


def q_update(table: QTable, transition: Transition) -> QTable:
    """Q(s,a) <- Q(s,a) + alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)), in place"""
    s = state_row(transition.state)
    a = int(transition.action)
    target = transition.reward + table.gamma * float(np.max(table.row(transition.next_state)))
    table.values[s, a] += table.alpha * (target - table.values[s, a])
    return table


class QLearningAgent(Agent):
    kind = AgentKind.Q_LEARNING

    def __init__(self, config: AgentConfig, rng: np.random.Generator, table: QTable | None = None):
        super().__init__(config)
        self.rng = rng
        self.table = table if table is not None else QTable(alpha=config.alpha, gamma=config.gamma)

    def action_values(self, state: float) -> list[float]:
        return self.table.row(state).tolist()

    def decide(self, state: float) -> McsIndex:
        epsilon = self.config.epsilon.value(self.decisions)
        self.decisions += 1
        return eps_greedy(self.table.row(state), epsilon, self.rng)

    def greedy(self, state: float) -> McsIndex:
        return greedy_action(self.table.row(state))

    def train(self, transition: Transition) -> None:
        q_update(self.table, transition)
        logger.debug(f"q_update {transition}")
        return None
