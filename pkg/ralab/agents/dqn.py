"""Deep Q-network agent.

A small multilayer perceptron (default 1-24-24-8, rectifier hidden layers,
identity output) maps the normalized state to eight action values. Training
samples a uniform minibatch from a replay buffer and takes one SGD step on
the squared TD error. Targets come from the same network with gradients
stopped; there is no separate target network.
"""
import math
from collections import deque
from typing import Sequence

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F
from loguru import logger

from ralab.core.mcs import N_MCS, McsIndex
from ralab.core.state import Transition, normalize_state
from ralab.errors import DomainError, TrainingDisabled
from ralab.agents.agent import Agent, AgentConfig, AgentKind
from ralab.agents.policy import eps_greedy, greedy_action

DTYPE = torch.float64


class Mlp(nn.Module):

    def __init__(self, sizes: Sequence[int] = (1, 24, 24, N_MCS), rng: np.random.Generator | None = None):
        super().__init__()
        if len(sizes) < 2 or any(size < 1 for size in sizes):
            raise DomainError(f"invalid layer sizes {tuple(sizes)}")

        self.sizes = tuple(int(size) for size in sizes)
        self.layers = nn.ModuleList(nn.Linear(n_in, n_out, dtype=DTYPE)
                                    for n_in, n_out in zip(self.sizes[:-1], self.sizes[1:]))
        if rng is not None:
            self.reset_parameters(rng)

    def reset_parameters(self, rng: np.random.Generator) -> None:
        """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) from a numpy stream, torch's global seed is never used"""
        with torch.no_grad():
            for layer in self.layers:
                bound = 1.0 / math.sqrt(layer.in_features)
                layer.weight.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(layer.weight.shape))))
                layer.bias.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(layer.bias.shape))))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for layer in self.layers[:-1]:
            x = F.relu(layer(x))
        return self.layers[-1](x)


def mlp_forward(net: Mlp, inputs: float | Sequence[float]) -> np.ndarray:
    """Action values for one input vector (a bare float is a 1-vector)"""
    x = torch.as_tensor(np.atleast_1d(np.asarray(inputs, dtype=np.float64)))
    with torch.no_grad():
        return net(x).numpy()


class ReplayBuffer:

    def __init__(self, capacity: int):
        if capacity < 1:
            raise DomainError(f"replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.buffer: deque[Transition] = deque(maxlen=capacity)

    def push(self, transition: Transition) -> None:
        self.buffer.append(transition)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        """Uniform sample without replacement"""
        if batch_size > len(self.buffer):
            raise DomainError(f"cannot sample {batch_size} from {len(self.buffer)} transitions")
        picks = rng.choice(len(self.buffer), size=batch_size, replace=False)
        return [self.buffer[int(i)] for i in picks]

    def __len__(self) -> int:
        return len(self.buffer)


class DqnAgent(Agent):

    def __init__(self, config: AgentConfig, rng: np.random.Generator,
                 training_enabled: bool = True, net: Mlp | None = None):
        super().__init__(config)
        self.rng = rng
        self._training_enabled = training_enabled
        self.net = net if net is not None else Mlp((1, *config.hidden, N_MCS), rng=rng)
        self.optimizer = torch.optim.SGD(self.net.parameters(), lr=config.lr)
        self.replay = ReplayBuffer(config.replay_capacity)

    @property
    def kind(self) -> AgentKind:
        return AgentKind.DQN if self._training_enabled else AgentKind.DQN_FROZEN

    @property
    def training_enabled(self) -> bool:
        return self._training_enabled

    def encode(self, state: float) -> float:
        if self.config.state_input == "bin":
            state = math.floor(state)
        return normalize_state(state)

    def action_values(self, state: float) -> list[float]:
        return mlp_forward(self.net, self.encode(state)).tolist()

    def decide(self, state: float) -> McsIndex:
        # a frozen network only exploits
        epsilon = self.config.epsilon.value(self.decisions) if self._training_enabled else 0.0
        self.decisions += 1
        return eps_greedy(mlp_forward(self.net, self.encode(state)), epsilon, self.rng)

    def greedy(self, state: float) -> McsIndex:
        return greedy_action(mlp_forward(self.net, self.encode(state)))

    def train(self, transition: Transition) -> float | None:
        if not self._training_enabled:
            raise TrainingDisabled("this DQN agent is frozen")

        self.replay.push(transition)
        if len(self.replay) < self.config.batch_size:
            return None
        return dqn_train_step(self, self.replay.sample(self.config.batch_size, self.rng))


def batch_tensors(agent: DqnAgent, batch: Sequence[Transition]) -> tuple[torch.Tensor, ...]:
    states = torch.tensor([[agent.encode(t.state)] for t in batch], dtype=DTYPE)
    actions = torch.tensor([[int(t.action)] for t in batch], dtype=torch.int64)
    rewards = torch.tensor([t.reward for t in batch], dtype=DTYPE)
    next_states = torch.tensor([[agent.encode(t.next_state)] for t in batch], dtype=DTYPE)
    return states, actions, rewards, next_states


def q_targets(net: Mlp, rewards: torch.Tensor, next_states: torch.Tensor, gamma: float) -> torch.Tensor:
    """r + gamma * max_a' Q(s', a'), constants for the gradient"""
    with torch.no_grad():
        return rewards + gamma * net(next_states).max(dim=1).values


def td_loss(net: Mlp, states: torch.Tensor, actions: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    predicted = net(states).gather(1, actions).squeeze(1)
    return F.mse_loss(predicted, targets)


def dqn_train_step(agent: DqnAgent, batch: Sequence[Transition]) -> float:
    """One gradient step on the mean squared TD error. Returns the loss before the update."""
    if not agent.training_enabled:
        raise TrainingDisabled("this DQN agent is frozen")
    if len(batch) == 0:
        raise DomainError("empty training batch")

    states, actions, rewards, next_states = batch_tensors(agent, batch)
    targets = q_targets(agent.net, rewards, next_states, agent.config.gamma)

    loss = td_loss(agent.net, states, actions, targets)
    agent.optimizer.zero_grad()
    loss.backward()
    agent.optimizer.step()

    value = float(loss.item())
    logger.debug(f"dqn loss {value}")
    return value
