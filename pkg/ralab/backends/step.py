from collections import namedtuple
from dataclasses import dataclass, fields, replace

from ralab.core.mcs import McsIndex
from ralab.core.reward import RewardValue, compute_fsr, compute_reward
from ralab.linksim.sim_clock import SimClock
from ralab.profiler.timing import Stopwatch
from ralab.backends.env_backend import EnvBackend

STAGES = ("decide", "train", "set_action", "reward_wait", "get_reward", "get_state")
ENV_STAGES = ("set_action", "reward_wait", "get_reward", "get_state")
AGENT_STAGES = ("decide", "train")


@dataclass(frozen=True, slots=True)
class StageTimings:
    """Duration of each stage of one loop step, in ns"""
    decide: int = 0
    train: int = 0
    set_action: int = 0
    reward_wait: int = 0
    get_reward: int = 0
    get_state: int = 0

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"negative duration for stage {f.name}")

    @property
    def total(self) -> int:
        return sum(getattr(self, stage) for stage in STAGES)

    def with_agent(self, decide: int, train: int) -> "StageTimings":
        return replace(self, decide=decide, train=train)

    def as_dict(self) -> dict[str, int]:
        return {stage: getattr(self, stage) for stage in STAGES}


EnvStepResult = namedtuple(typename="EnvStepResult", field_names=["reward", "observation",
                                                                  "timings", "fsr"])


def step_environment(backend: EnvBackend, mcs: McsIndex, clock: SimClock,
                     instrumented: bool = True) -> EnvStepResult:
    """Environment half of one loop step.

    snapshot counters -> set_action -> wait the reward query period (and any
    table refresh) -> get_reward_stats -> FSR and reward over the window ->
    get_state. The start-of-window snapshot and the reward arithmetic are
    accounted to get_reward. Uninstrumented steps skip the stopwatch and report
    zero timings.
    """
    if not instrumented:
        before = backend.snapshot_stats()
        backend.set_action(mcs)
        backend.wait_for_reward()
        fsr = compute_fsr(before, backend.get_reward_stats())
        reward = compute_reward(fsr, mcs)
        return EnvStepResult(reward=reward, observation=backend.get_state(), timings=StageTimings(), fsr=fsr)

    watch = Stopwatch(clock)

    before = backend.snapshot_stats()
    snapshot_ns = watch.lap()

    backend.set_action(mcs)
    set_action_ns = watch.lap()

    backend.wait_for_reward()
    wait_ns = watch.lap()

    after = backend.get_reward_stats()
    fsr = compute_fsr(before, after)
    reward: RewardValue = compute_reward(fsr, mcs)
    get_reward_ns = snapshot_ns + watch.lap()

    observation = backend.get_state()
    get_state_ns = watch.lap()

    timings = StageTimings(set_action=set_action_ns, reward_wait=wait_ns,
                           get_reward=get_reward_ns, get_state=get_state_ns)
    return EnvStepResult(reward=reward, observation=observation, timings=timings, fsr=fsr)
