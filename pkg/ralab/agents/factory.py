import numpy as np

from ralab.errors import ConfigError
from ralab.agents.agent import Agent, AgentConfig, AgentKind
from ralab.agents.checkpoint import load_agent
from ralab.agents.dqn import DqnAgent
from ralab.agents.q_learning import QLearningAgent


def make_agent(config: AgentConfig, rng: np.random.Generator) -> Agent:
    """Fresh agent of `config.kind`, or the one saved at `config.checkpoint`.

    A frozen DQN without a checkpoint starts from a seeded random network.
    """
    training = config.kind != AgentKind.DQN_FROZEN

    if config.checkpoint is not None:
        agent = load_agent(config.checkpoint, rng, training_enabled=training)
        loaded_tabular = isinstance(agent, QLearningAgent)
        if loaded_tabular != (config.kind == AgentKind.Q_LEARNING):
            raise ConfigError("agent.checkpoint",
                              f"holds a {agent.kind.value} agent, agent.kind is {config.kind.value}")
        return agent

    match config.kind:
        case AgentKind.Q_LEARNING:
            return QLearningAgent(config, rng)
        case AgentKind.DQN | AgentKind.DQN_FROZEN:
            return DqnAgent(config, rng, training_enabled=training)
    raise ConfigError("agent.kind", f"unknown agent kind {config.kind}")
