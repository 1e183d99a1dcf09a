"""Agent checkpoints.

A checkpoint is a `torch.save` archive of one dict:

    format     "ralab-agent"
    version    1
    kind       "q_learning" | "dqn" | "dqn_frozen"
    config     the AgentConfig as JSON-compatible values
    decisions  decisions taken so far (position in the exploration schedule)
    state      q_learning: {"q_values": float64 tensor (76, 8)}
               dqn:        {"network": state dict, "replay": [(state, action, reward, next_state), ...]}

Only tensors and plain containers are stored, so checkpoints load with
`weights_only=True`.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import torch
from loguru import logger

from ralab.core.mcs import N_MCS, McsIndex
from ralab.core.state import Transition
from ralab.errors import IoFailure, RalabError, VersionMismatch
from ralab.agents.agent import Agent, AgentConfig, AgentKind
from ralab.agents.dqn import DqnAgent, Mlp
from ralab.agents.q_learning import QLearningAgent, QTable
from ralab.ralab_config import get_ralab_config

CHECKPOINT_FORMAT = "ralab-agent"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class AgentCheckpoint:
    kind: AgentKind
    config: AgentConfig
    decisions: int
    state: dict[str, Any]
    version: int = CHECKPOINT_VERSION


def make_checkpoint(agent: Agent) -> AgentCheckpoint:
    if isinstance(agent, QLearningAgent):
        state = {"q_values": torch.from_numpy(agent.table.values.copy())}
    elif isinstance(agent, DqnAgent):
        state = {
            "network": {name: tensor.detach().clone() for name, tensor in agent.net.state_dict().items()},
            "replay": [(float(t.state), int(t.action), float(t.reward), float(t.next_state))
                       for t in agent.replay.buffer],
        }
    else:
        raise TypeError(f"cannot checkpoint {type(agent).__name__}")
    return AgentCheckpoint(kind=agent.kind, config=agent.config, decisions=agent.decisions, state=state)


def save_agent(agent: Agent, path: Path) -> Path:
    checkpoint = make_checkpoint(agent)
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": checkpoint.version,
        "kind": checkpoint.kind.value,
        "config": checkpoint.config.model_dump(mode="json"),
        "decisions": checkpoint.decisions,
        "state": checkpoint.state,
    }

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(payload, path)
    except OSError as e:
        raise IoFailure(f"cannot write checkpoint {path}: {e}") from e

    if get_ralab_config().LOG_INFO:
        logger.info(f"saved {checkpoint.kind.value} agent to {path}")
    return path


def read_checkpoint(path: Path) -> AgentCheckpoint:
    try:
        payload = torch.load(Path(path), map_location="cpu", weights_only=True)
    except OSError as e:
        raise IoFailure(f"cannot read checkpoint {path}: {e}") from e
    except Exception as e:
        # torch reports a damaged archive through several exception types
        raise IoFailure(f"{path} is not a readable checkpoint: {e}") from e

    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise VersionMismatch(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise VersionMismatch(f"checkpoint version {payload.get('version')!r}, "
                              f"this build reads version {CHECKPOINT_VERSION}")

    try:
        return AgentCheckpoint(kind=AgentKind(payload["kind"]),
                               config=AgentConfig.model_validate(payload["config"]),
                               decisions=int(payload["decisions"]),
                               state=dict(payload["state"]),
                               version=payload["version"])
    except (KeyError, TypeError, ValueError) as e:
        raise VersionMismatch(f"{path} misses checkpoint fields: {e}") from e


def restore_agent(checkpoint: AgentCheckpoint, rng: np.random.Generator,
                  training_enabled: bool | None = None) -> Agent:
    """Rebuild an agent. A DQN checkpoint can come back frozen or training."""
    config = checkpoint.config
    try:
        if checkpoint.kind == AgentKind.Q_LEARNING:
            table = QTable(alpha=config.alpha, gamma=config.gamma,
                           values=checkpoint.state["q_values"].numpy())
            agent = QLearningAgent(config, rng, table=table)
        else:
            if training_enabled is None:
                training_enabled = checkpoint.kind == AgentKind.DQN
            net = Mlp((1, *config.hidden, N_MCS))
            net.load_state_dict(checkpoint.state["network"])
            agent = DqnAgent(config, rng, training_enabled=training_enabled, net=net)
            for state, action, reward, next_state in checkpoint.state["replay"]:
                agent.replay.push(Transition(state=state, action=McsIndex(action),
                                             reward=reward, next_state=next_state))
    except RalabError:
        raise
    except (KeyError, TypeError, ValueError, RuntimeError) as e:
        raise VersionMismatch(f"checkpoint state does not fit a {checkpoint.kind.value} agent: {e}") from e

    agent.decisions = checkpoint.decisions
    return agent


def load_agent(path: Path, rng: np.random.Generator, training_enabled: bool | None = None) -> Agent:
    agent = restore_agent(read_checkpoint(path), rng, training_enabled)
    if get_ralab_config().LOG_INFO:
        logger.info(f"loaded {agent.kind.value} agent from {path}")
    return agent
