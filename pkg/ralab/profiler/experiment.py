"""The rate adaptation loop, instrumented stage by stage.

Each step decides an MCS for the current state, deploys it through the
environment, waits out the reward query period, reads the reward and the
next state, and trains the agent on the resulting transition.
"""
import sys
from typing import Any, Callable

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from ralab.core.mcs import McsIndex
from ralab.core.state import Transition
from ralab.linksim.link_model import LinkModel
from ralab.linksim.link_simulator import LinkSimulator
from ralab.linksim.rss_trace import RssTrace, TraceConfig
from ralab.linksim.sim_clock import ClockMode, SimClock
from ralab.backends.env_backend import BackendConfig, EnvConfig, make_backend
from ralab.backends.latency import LatencyModel
from ralab.backends.rate_adaptation_env import RateAdaptationEnv
from ralab.backends.step import AGENT_STAGES, ENV_STAGES, STAGES
from ralab.agents.agent import Agent, AgentConfig
from ralab.agents.factory import make_agent
from ralab.errors import ConfigError
from ralab.profiler.stats import TimingSummary, summarize
from ralab.profiler.timing import time_stage
from ralab.utils.step_record import StepRecord
from ralab.ralab_config import get_ralab_config

StepCallback = Callable[[StepRecord], None]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: str = Field(default="custom", description="Name echoed into reports")
    backend: BackendConfig = BackendConfig()
    agent: AgentConfig = AgentConfig()
    link: LinkModel = LinkModel()
    trace: TraceConfig = TraceConfig()
    reward_query_period_ms: float = Field(default=50.0, gt=0.0)
    table_period_ms: float = Field(default=100.0, gt=0.0)
    steps: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)
    clock: ClockMode = "virtual"
    initial_mcs: McsIndex = McsIndex.MCS0

    def env_config(self) -> EnvConfig:
        return EnvConfig(reward_query_period_ms=self.reward_query_period_ms,
                         table_period_ms=self.table_period_ms, backend=self.backend)


class Experiment:
    """Every component of one run, wired to one clock and one seed"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        link_seq, agent_seq, latency_seq, decor_seq = np.random.SeedSequence(config.seed).spawn(4)

        self.clock = SimClock(config.clock)
        self.simulator = LinkSimulator(config.link, RssTrace(config.trace),
                                       rng=np.random.default_rng(link_seq),
                                       initial_mcs=config.initial_mcs,
                                       start_ns=self.clock.now_ns())
        latency = LatencyModel(config.backend.latency, np.random.default_rng(latency_seq))
        backend = make_backend(config.env_config(), self.simulator, self.clock, latency,
                               np.random.default_rng(decor_seq))
        self.env = RateAdaptationEnv(backend, self.clock)
        self.records: list[StepRecord] = []
        self.loop_ns = 0
        try:
            self.agent: Agent = make_agent(config.agent, np.random.default_rng(agent_seq))
        except Exception:
            self.env.close()
            raise

    def run(self, steps: int | None = None, on_step: StepCallback | None = None,
            instrumented: bool = True) -> list[StepRecord]:
        """Drive the loop for `steps` steps. Records already taken are kept in
        `self.records` when a step raises.

        An uninstrumented run times no stage and records zero durations; only
        `loop_ns`, the clock time of the whole loop, is measured.
        """
        steps = self.config.steps if steps is None else steps
        self.records = []
        self.env.instrumented = instrumented

        _, info = self.env.reset(seed=self.config.seed)
        state = info["observation"].rss_dbm
        loop_start = self.clock.now_ns()

        for step in range(steps):
            if instrumented:
                action, decide_ns = time_stage(self.clock, lambda: self.agent.decide(state))
            else:
                action, decide_ns = self.agent.decide(state), 0
            _, reward, _, _, info = self.env.step(action)
            next_state = info["observation"].rss_dbm

            loss, train_ns = None, 0
            if self.agent.training_enabled:
                transition = Transition(state=state, action=action, reward=reward, next_state=next_state)
                if instrumented:
                    loss, train_ns = time_stage(self.clock, lambda: self.agent.train(transition))
                else:
                    loss = self.agent.train(transition)

            record = StepRecord.from_step(step=step, rss=state, action=int(action), fsr=info["fsr"],
                                          reward=reward, loss=loss,
                                          timings=info["timings"].with_agent(decide_ns, train_ns))
            self.records.append(record)
            logger.debug(f"step {step}: rss={state} mcs={int(action)} reward={reward:.4f}")
            if on_step is not None:
                on_step(record)
            state = next_state

        self.loop_ns = self.clock.now_ns() - loop_start
        return self.records

    def close(self) -> None:
        self.env.close()


class RunReport(BaseModel):
    config: dict[str, Any]
    valid: bool = True
    error: str | None = None
    steps_requested: int
    steps_completed: int
    stages: dict[str, TimingSummary] = Field(default_factory=dict)
    total: TimingSummary | None = None
    environment_mean_ns: float | None = None
    agent_mean_ns: float | None = None


def summarize_records(records: list[StepRecord]) -> tuple[dict[str, TimingSummary], TimingSummary]:
    columns = {stage: np.array([getattr(r, f"{stage}_ns") for r in records], dtype=np.int64)
               for stage in STAGES}
    stages = {stage: summarize(values) for stage, values in columns.items()}
    total = summarize(sum(columns.values()))
    return stages, total


def build_report(config: ExperimentConfig, records: list[StepRecord], error: str | None = None) -> RunReport:
    report = RunReport(config=config.model_dump(mode="json"), valid=error is None, error=error,
                       steps_requested=config.steps, steps_completed=len(records))
    if not records:
        return report

    report.stages, report.total = summarize_records(records)
    report.environment_mean_ns = sum(report.stages[s].mean for s in ENV_STAGES)
    report.agent_mean_ns = sum(report.stages[s].mean for s in AGENT_STAGES)
    return report


def run_profile(config: ExperimentConfig, on_step: StepCallback | None = None) -> RunReport:
    """Run one scenario and summarize its stage timings.

    A run aborted by an error still yields a report, marked invalid and
    summarizing the steps completed before the failure. A scenario whose
    backend or agent cannot be built is reported with no step at all;
    configuration errors propagate.
    """
    if get_ralab_config().LOG_INFO:
        logger.info(f"run {config.scenario!r}: {config.backend.kind.value} backend, "
                    f"{config.agent.kind.value} agent, {config.steps} steps, {config.clock} clock")

    experiment = None
    error = None
    try:
        experiment = Experiment(config)
        experiment.run(on_step=on_step)
    except ConfigError:
        raise
    except Exception as e:
        logger.opt(exception=sys.exc_info()).error(f"run {config.scenario!r} aborted")
        error = f"{type(e).__name__}: {e}"
    finally:
        if experiment is not None:
            experiment.close()

    report = build_report(config, experiment.records if experiment is not None else [], error)
    if get_ralab_config().LOG_INFO and report.total is not None:
        logger.info(f"run {config.scenario!r} finished {report.steps_completed} steps, "
                    f"mean step {report.total.mean / 1e6:.3f} ms")
    return report
