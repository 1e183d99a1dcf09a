import numpy as np
import pytest

from ralab.core.mcs import McsIndex
from ralab.core.reward import FrameStats
from ralab.core.state import LinkObservation
from ralab.errors import BackendUnavailable
from ralab.linksim.link_simulator import LinkSimulator
from ralab.linksim.rss_trace import RssTrace, TraceConfig
from ralab.linksim.sim_clock import SimClock
from ralab.parsers.fixtures import render_state_file
from ralab.backends.env_backend import (BackendConfig, EnvBackendKind, EnvConfig, FreshFileBackend,
                                        StaleFileBackend)
from ralab.backends.latency import LatencyConfig, LatencyModel, LatencySpec
from ralab.backends.rate_adaptation_env import RateAdaptationEnv
from ralab.backends.step import StageTimings, step_environment

MEASURED_LATENCY = LatencyConfig(set_action=15.105, get_reward=0.246, get_state=0.299)


def test_set_action_injected_latency(make_env_backend, clock):
    backend = make_env_backend(latency=LatencyConfig(set_action=15.105))
    assert backend.set_action(McsIndex.MCS3)
    assert clock.now_ns() == 15_105_000
    assert backend.simulator.mcs == McsIndex.MCS3


def test_second_set_action_overrides_first(make_env_backend):
    backend = make_env_backend()
    backend.set_action(McsIndex.MCS2)
    backend.set_action(McsIndex.MCS6)
    assert backend.simulator.mcs == McsIndex.MCS6


def test_in_memory_state_and_counters(make_env_backend, clock):
    backend = make_env_backend(level=-50.0)
    assert backend.get_state() == LinkObservation(rss_dbm=-50.0)
    clock.wait_ns(60_000_000)
    assert backend.get_reward_stats().attempts == 60


@pytest.mark.parametrize("kind", [EnvBackendKind.FRESH_FILE, EnvBackendKind.EXTERNAL_COMMAND])
def test_file_backends_match_in_memory(make_env_backend, kind):
    in_memory = make_env_backend(EnvBackendKind.IN_MEMORY, level=-70.0)
    # a second, identical history on its own simulator and clock
    clock = SimClock("virtual")
    config = EnvConfig(backend=BackendConfig(kind=kind, spawn_overhead_ms=0.0))
    simulator = LinkSimulator(in_memory.simulator.model, RssTrace(TraceConfig(level=-70.0)),
                              rng=np.random.default_rng(1))
    backend = FreshFileBackend(simulator, clock, config, LatencyModel(LatencyConfig(), np.random.default_rng(2)),
                               np.random.default_rng(3), use_command=kind == EnvBackendKind.EXTERNAL_COMMAND)
    try:
        for mcs in (McsIndex.MCS1, McsIndex.MCS5, McsIndex.MCS4):
            in_memory.set_action(mcs)
            backend.set_action(mcs)
            in_memory.clock.wait_ns(50_000_000)
            clock.wait_ns(50_000_000)
            assert backend.get_reward_stats() == in_memory.get_reward_stats()
            assert backend.get_state() == in_memory.get_state()
    finally:
        backend.close()


def test_fresh_file_parses_rendered_state(make_env_backend):
    backend = make_env_backend(EnvBackendKind.FRESH_FILE, level=-55.4)
    assert backend.get_state() == LinkObservation(rss_dbm=-56.0)


def test_fresh_file_reads_counters_from_file(make_env_backend, clock):
    backend = make_env_backend(EnvBackendKind.FRESH_FILE)
    backend.set_action(McsIndex.MCS0)
    clock.wait_ns(180_000_000)
    stats = backend.get_reward_stats()
    assert (backend.stats_path.read_text()) == f"{stats.successes},{stats.attempts}\n"
    assert stats.attempts == 180


def test_counters_are_monotone(make_env_backend, clock):
    backend = make_env_backend(EnvBackendKind.FRESH_FILE)
    previous = FrameStats(0, 0)
    for k in range(20):
        backend.set_action(McsIndex(k % 8))
        clock.wait_ns(7_000_000)
        stats = backend.get_reward_stats()
        assert stats.successes >= previous.successes and stats.attempts >= previous.attempts
        previous = stats


def test_missing_workdir_is_unavailable(make_env_backend, tmp_path):
    backend = make_env_backend(EnvBackendKind.FRESH_FILE)
    for path in backend.workdir.iterdir():
        path.unlink()
    backend.workdir.rmdir()
    with pytest.raises(BackendUnavailable):
        backend.get_state()


def test_stale_file_serves_pre_change_rss(link_model, tmp_path):
    clock = SimClock("virtual")
    trace = RssTrace(TraceConfig(kind="step", levels=(-40.0, -80.0), dwell_s=0.13))
    simulator = LinkSimulator(link_model, trace, np.random.default_rng(0))
    config = EnvConfig(table_period_ms=100.0, backend=BackendConfig(kind="stale_file", workdir=tmp_path))
    backend = StaleFileBackend(simulator, clock, config, LatencyModel(LatencyConfig(), np.random.default_rng(1)),
                               np.random.default_rng(2))

    # last refresh at 100 ms, RSS changed at 130 ms
    clock.wait_until(140_000_000)
    assert backend.get_state() == LinkObservation(rss_dbm=-40.0)
    assert simulator.snapshot(clock.now_ns()).rss == -80.0

    clock.wait_until(200_000_000)
    assert backend.get_state() == LinkObservation(rss_dbm=-80.0)


def test_stale_file_step_waits_for_refresh(make_env_backend, clock):
    backend = make_env_backend(EnvBackendKind.STALE_FILE)
    result = step_environment(backend, McsIndex.MCS2, clock)
    assert clock.now_ns() == 100_000_000
    assert result.timings.reward_wait == 100_000_000
    assert result.timings.total == 100_000_000
    assert 0.0 <= result.fsr <= 1.0


def test_stale_file_with_external_access_charges_spawns(make_env_backend, clock):
    backend = make_env_backend(EnvBackendKind.STALE_FILE, external_access=True, spawn_overhead_ms=5.0)
    result = step_environment(backend, McsIndex.MCS2, clock)
    assert result.timings.get_reward == 10_000_000
    assert result.timings.get_state == 5_000_000
    assert result.timings.total >= 100_000_000


def test_in_memory_step_is_the_query_period(make_env_backend, clock):
    backend = make_env_backend()
    result = step_environment(backend, McsIndex.MCS4, clock)
    assert result.timings == StageTimings(reward_wait=50_000_000)
    assert result.timings.total == 50_000_000


def test_in_memory_step_with_injected_latencies(make_env_backend, clock):
    backend = make_env_backend(latency=MEASURED_LATENCY)
    result = step_environment(backend, McsIndex.MCS7, clock)
    assert result.timings.set_action == 15_105_000
    assert result.timings.get_reward == 246_000
    assert result.timings.get_state == 299_000
    assert result.timings.total == 65_650_000
    assert 0.0 <= result.reward <= 1.0


def test_sampled_latency_is_seeded_and_non_negative():
    config = LatencyConfig(set_action=LatencySpec(kind="normal", ms=0.1, std_ms=1.0),
                           get_state=LatencySpec(kind="uniform", low_ms=1.0, high_ms=2.0))
    first = LatencyModel(config, np.random.default_rng(4))
    second = LatencyModel(config, np.random.default_rng(4))
    samples = [first.sample_ns("set_action") for _ in range(200)]
    assert samples == [second.sample_ns("set_action") for _ in range(200)]
    assert min(samples) == 0
    assert all(1_000_000 <= first.sample_ns("get_state") <= 2_000_000 for _ in range(100))
    assert first.sample_ns("get_reward") == 0


def test_latency_spec_rejects_inverted_range():
    with pytest.raises(ValueError):
        LatencySpec(kind="uniform", low_ms=2.0, high_ms=1.0)


def test_stage_timings_reject_negative_durations():
    with pytest.raises(ValueError):
        StageTimings(decide=-1)
    timings = StageTimings(set_action=3, get_state=4).with_agent(decide=1, train=2)
    assert timings.total == 10
    assert list(timings.as_dict()) == ["decide", "train", "set_action", "reward_wait", "get_reward", "get_state"]


def test_gymnasium_env_step(make_env_backend, clock):
    env = RateAdaptationEnv(make_env_backend(latency=MEASURED_LATENCY, level=-45.0), clock)
    observation, info = env.reset(seed=0)
    assert observation.tolist() == [-45.0]
    assert env.observation_space.contains(observation)

    observation, reward, terminated, truncated, info = env.step(7)
    assert observation.tolist() == [-45.0]
    assert 0.0 <= reward <= 1.0
    assert not terminated and not truncated
    assert info["timings"].total == 65_650_000
    assert info["observation"] == LinkObservation(rss_dbm=-45.0)

    with pytest.raises(ValueError):
        env.step(8)


def test_state_file_written_by_backend_parses_like_fixture(make_env_backend):
    backend = make_env_backend(EnvBackendKind.FRESH_FILE, level=-61.0)
    backend.get_state()
    text = backend.state_path.read_text()
    assert text.splitlines()[2].split()[3] == "-61."
    assert len(text) == len(render_state_file(LinkObservation(rss_dbm=-61.0), np.random.default_rng(0)))
