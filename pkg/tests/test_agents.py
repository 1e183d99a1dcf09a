import numpy as np
import pytest
import torch

from ralab.core.mcs import McsIndex
from ralab.core.state import RSS_BINS, Transition, normalize_state
from ralab.errors import ConfigError, IoFailure, TrainingDisabled, VersionMismatch
from ralab.agents.agent import AgentConfig, AgentKind
from ralab.agents.checkpoint import load_agent, read_checkpoint, save_agent
from ralab.agents.dqn import (DqnAgent, Mlp, ReplayBuffer, batch_tensors, dqn_train_step, mlp_forward,
                              q_targets, td_loss)
from ralab.agents.factory import make_agent
from ralab.agents.policy import EpsilonSchedule, eps_greedy, greedy_action
from ralab.agents.q_learning import QLearningAgent, QTable, q_update, state_row

GREEDY = EpsilonSchedule(start=0.0, end=0.0, decay_steps=0)


def _transition(state=-50, action=3, reward=0.5, next_state=-50):
    return Transition(state=state, action=McsIndex(action), reward=reward, next_state=next_state)


def test_epsilon_schedule_decays_linearly():
    schedule = EpsilonSchedule(start=1.0, end=0.05, decay_steps=5000)
    assert schedule.value(0) == 1.0
    assert schedule.value(2500) == pytest.approx(0.525)
    assert schedule.value(5000) == 0.05
    assert schedule.value(10**6) == 0.05
    with pytest.raises(ValueError):
        EpsilonSchedule(start=0.1, end=0.5)


def test_greedy_action_argmax_and_ties():
    assert greedy_action(np.array([0, 0, 0.9, 0, 0, 0, 0, 0])) == McsIndex.MCS2
    assert greedy_action(np.zeros(8)) == McsIndex.MCS0
    assert greedy_action(np.array([0, 1, 0, 1, 0, 0, 0, 0])) == McsIndex.MCS1


def test_greedy_action_is_shift_invariant():
    rng = np.random.default_rng(0)
    for _ in range(100):
        values = rng.normal(size=8)
        assert greedy_action(values) == greedy_action(values + rng.normal() * 10)


def test_eps_greedy_exploration_replays_rng():
    rng = np.random.default_rng(42)
    actions = [eps_greedy(np.zeros(8), 1.0, rng) for _ in range(20)]

    replay = np.random.default_rng(42)
    expected = []
    for _ in range(20):
        replay.random()
        expected.append(int(replay.integers(0, 8)))
    assert actions == expected


def test_q_update_examples():
    table = QTable(alpha=1.0, gamma=0.0)
    table.values[state_row(-50), 3] = 0.7
    q_update(table, _transition(reward=0.5))
    assert table.values[state_row(-50), 3] == 0.5

    table = QTable(alpha=0.5, gamma=0.9)
    table.values[state_row(-40), :] = [0, 1, 0, 0, 0, 0, 0, 0]
    q_update(table, _transition(state=-50, action=2, reward=0.0, next_state=-40))
    assert table.values[state_row(-50), 2] == pytest.approx(0.45)


def test_q_update_with_zero_rate_is_identity():
    table = QTable(alpha=0.0, gamma=0.9, values=np.random.default_rng(0).random((76, 8)))
    before = table.values.copy()
    q_update(table, _transition())
    assert np.array_equal(table.values, before)


def test_q_learning_decide_is_greedy_at_zero_epsilon():
    agent = QLearningAgent(AgentConfig(epsilon=GREEDY), np.random.default_rng(0))
    agent.table.values[state_row(-61)] = [0, 0, 0.9, 0, 0, 0, 0, 0]
    assert agent.decide(-61.0) == McsIndex.MCS2
    assert agent.decide(-59.5) == McsIndex.MCS0
    assert agent.greedy(-60.5) == McsIndex.MCS2


def test_mlp_forward_zero_weights():
    net = Mlp((1, 24, 24, 8))
    with torch.no_grad():
        for p in net.parameters():
            p.zero_()
    assert np.array_equal(mlp_forward(net, 0.3), np.zeros(8))


def test_mlp_forward_single_linear_layer():
    net = Mlp((1, 8))
    with torch.no_grad():
        net.layers[0].weight.copy_(torch.arange(8, dtype=torch.float64).reshape(8, 1))
        net.layers[0].bias.zero_()
    assert np.array_equal(mlp_forward(net, 0.5), np.arange(8) * 0.5)


def test_mlp_forward_matches_matrix_arithmetic():
    net = Mlp((1, 4, 8), rng=np.random.default_rng(3))
    w1, b1 = net.layers[0].weight.detach().numpy(), net.layers[0].bias.detach().numpy()
    w2, b2 = net.layers[1].weight.detach().numpy(), net.layers[1].bias.detach().numpy()
    x = np.array([0.4])
    expected = w2 @ np.maximum(w1 @ x + b1, 0.0) + b2
    assert mlp_forward(net, 0.4) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_mlp_seeded_initialization_is_reproducible():
    first = Mlp((1, 24, 24, 8), rng=np.random.default_rng(9))
    second = Mlp((1, 24, 24, 8), rng=np.random.default_rng(9))
    for a, b in zip(first.parameters(), second.parameters()):
        assert torch.equal(a, b)


def test_replay_buffer_capacity_and_sampling():
    buffer = ReplayBuffer(capacity=5)
    for k in range(8):
        buffer.push(_transition(state=-90 + k))
    assert len(buffer) == 5
    sample = buffer.sample(5, np.random.default_rng(0))
    assert sorted(t.state for t in sample) == [-87, -86, -85, -84, -83]
    with pytest.raises(ValueError):
        buffer.sample(6, np.random.default_rng(0))


def test_dqn_train_step_zero_loss_leaves_parameters():
    agent = DqnAgent(AgentConfig(kind="dqn"), np.random.default_rng(0))
    with torch.no_grad():
        for p in agent.net.parameters():
            p.zero_()
    loss = dqn_train_step(agent, [_transition(reward=0.0)])
    assert loss == 0.0
    assert all(torch.count_nonzero(p) == 0 for p in agent.net.parameters())


def test_dqn_target_is_reward_when_gamma_is_zero():
    agent = DqnAgent(AgentConfig(kind="dqn", gamma=0.0), np.random.default_rng(1))
    batch = [_transition(reward=0.8)]
    _, _, rewards, next_states = batch_tensors(agent, batch)
    assert q_targets(agent.net, rewards, next_states, 0.0).tolist() == [0.8]

    predicted = agent.action_values(-50)[3]
    assert dqn_train_step(agent, batch) == pytest.approx((predicted - 0.8) ** 2)


def test_dqn_gradients_match_finite_differences():
    h = 1e-5
    for seed in range(10):
        rng = np.random.default_rng(seed)
        agent = DqnAgent(AgentConfig(kind="dqn", hidden=(4,)), rng)
        batch = [_transition(state=int(rng.integers(-95, -19)), action=int(rng.integers(0, 8)),
                             reward=float(rng.random()), next_state=int(rng.integers(-95, -19)))
                 for _ in range(6)]
        states, actions, rewards, next_states = batch_tensors(agent, batch)
        targets = q_targets(agent.net, rewards, next_states, 0.9)

        agent.net.zero_grad()
        td_loss(agent.net, states, actions, targets).backward()

        max_error = 0.0
        for param in agent.net.parameters():
            analytic = param.grad.detach().clone().reshape(-1)
            flat = param.data.reshape(-1)
            for i in range(flat.numel()):
                original = flat[i].item()
                with torch.no_grad():
                    flat[i] = original + h
                    plus = td_loss(agent.net, states, actions, targets).item()
                    flat[i] = original - h
                    minus = td_loss(agent.net, states, actions, targets).item()
                    flat[i] = original
                numeric = (plus - minus) / (2 * h)
                a = analytic[i].item()
                max_error = max(max_error, abs(a - numeric) / max(abs(a), abs(numeric), 1e-6))
        assert max_error < 1e-4


def test_dqn_loss_decreases_on_fixed_batch():
    agent = DqnAgent(AgentConfig(kind="dqn", gamma=0.0, lr=1e-3), np.random.default_rng(7))
    batch = [_transition(state=s, action=a, reward=r, next_state=s)
             for s, a, r in [(-90, 0, 0.1), (-70, 3, 0.4), (-50, 7, 1.0), (-30, 6, 0.9)]]
    first = dqn_train_step(agent, batch)
    for _ in range(99):
        last = dqn_train_step(agent, batch)
    assert last < first


def test_frozen_dqn_refuses_training():
    agent = DqnAgent(AgentConfig(kind="dqn_frozen"), np.random.default_rng(0), training_enabled=False)
    assert agent.kind == AgentKind.DQN_FROZEN
    with pytest.raises(TrainingDisabled):
        agent.train(_transition())
    with pytest.raises(TrainingDisabled):
        dqn_train_step(agent, [_transition()])


def test_dqn_trains_once_buffer_holds_a_batch():
    agent = DqnAgent(AgentConfig(kind="dqn", batch_size=4), np.random.default_rng(0))
    losses = [agent.train(_transition(state=-60 + k)) for k in range(6)]
    assert losses[:3] == [None, None, None]
    assert all(isinstance(loss, float) for loss in losses[3:])


def test_dqn_state_input_modes():
    rng = np.random.default_rng(0)
    assert DqnAgent(AgentConfig(kind="dqn"), rng).encode(-55.7) == normalize_state(-56)
    assert DqnAgent(AgentConfig(kind="dqn", state_input="rss"), rng).encode(-55.7) == normalize_state(-55.7)


def _greedy_policy(agent):
    return [agent.greedy(state) for state in RSS_BINS]


def test_checkpoint_round_trip_q_learning(tmp_path):
    agent = QLearningAgent(AgentConfig(), np.random.default_rng(0))
    agent.table.values[:] = np.random.default_rng(1).random((76, 8))
    path = save_agent(agent, tmp_path / "q.pt")

    loaded = load_agent(path, np.random.default_rng(2))
    assert isinstance(loaded, QLearningAgent)
    assert np.array_equal(loaded.table.values, agent.table.values)
    assert _greedy_policy(loaded) == _greedy_policy(agent)


def test_checkpoint_round_trip_dqn(tmp_path):
    agent = DqnAgent(AgentConfig(kind="dqn", batch_size=2), np.random.default_rng(0))
    for k in range(5):
        agent.train(_transition(state=-80 + 10 * k, action=k, reward=0.1 * k))
    path = save_agent(agent, tmp_path / "nested" / "dqn.pt")

    loaded = load_agent(path, np.random.default_rng(3))
    assert loaded.training_enabled
    assert len(loaded.replay) == 5
    assert _greedy_policy(loaded) == _greedy_policy(agent)

    frozen = load_agent(path, np.random.default_rng(3), training_enabled=False)
    assert frozen.kind == AgentKind.DQN_FROZEN
    assert _greedy_policy(frozen) == _greedy_policy(agent)


def test_checkpoint_with_empty_replay(tmp_path):
    agent = DqnAgent(AgentConfig(kind="dqn"), np.random.default_rng(0))
    loaded = load_agent(save_agent(agent, tmp_path / "empty.pt"), np.random.default_rng(0))
    assert len(loaded.replay) == 0


def test_checkpoint_errors(tmp_path):
    with pytest.raises(IoFailure):
        load_agent(tmp_path / "missing.pt", np.random.default_rng(0))

    corrupted = tmp_path / "corrupted.pt"
    corrupted.write_bytes(b"\x00not a checkpoint")
    with pytest.raises((IoFailure, VersionMismatch)):
        load_agent(corrupted, np.random.default_rng(0))

    foreign = tmp_path / "foreign.pt"
    torch.save({"format": "ralab-agent", "version": 99}, foreign)
    with pytest.raises(VersionMismatch):
        read_checkpoint(foreign)

    other = tmp_path / "other.pt"
    torch.save({"weights": torch.zeros(3)}, other)
    with pytest.raises(VersionMismatch):
        read_checkpoint(other)


def test_make_agent_kinds(tmp_path):
    rng = np.random.default_rng(0)
    assert isinstance(make_agent(AgentConfig(kind="q_learning"), rng), QLearningAgent)
    assert make_agent(AgentConfig(kind="dqn"), rng).training_enabled
    assert not make_agent(AgentConfig(kind="dqn_frozen"), rng).training_enabled

    path = save_agent(QLearningAgent(AgentConfig(), rng), tmp_path / "q.pt")
    with pytest.raises(ConfigError) as excinfo:
        make_agent(AgentConfig(kind="dqn", checkpoint=path), rng)
    assert excinfo.value.key == "agent.checkpoint"


def test_frozen_checkpointed_decisions_are_deterministic(tmp_path):
    trained = DqnAgent(AgentConfig(kind="dqn"), np.random.default_rng(5))
    path = save_agent(trained, tmp_path / "dqn.pt")
    config = AgentConfig(kind="dqn_frozen", checkpoint=path)
    first = make_agent(config, np.random.default_rng(1))
    second = make_agent(config, np.random.default_rng(2))
    assert [first.decide(s) for s in RSS_BINS] == [second.decide(s) for s in RSS_BINS]
