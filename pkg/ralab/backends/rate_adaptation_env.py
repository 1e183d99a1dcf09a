"""Rate adaptation as a gymnasium environment.

Actions are the eight MCS indices, the observation is the RSS in dBm. A step
deploys the action through an environment backend and returns the reward of
the observation window; per-stage timings travel in `info`.
"""
from typing import Any, Optional

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from ralab.core.mcs import N_MCS, McsIndex
from ralab.core.state import RSS_MAX_DBM, RSS_MIN_DBM, LinkObservation
from ralab.linksim.sim_clock import SimClock
from ralab.backends.env_backend import EnvBackend
from ralab.backends.step import step_environment


class RateAdaptationEnv(gym.Env):
    metadata = {"render_modes": []}

    def __init__(self, backend: EnvBackend, clock: SimClock, instrumented: bool = True):
        self.backend = backend
        self.clock = clock
        self.instrumented = instrumented

        self.action_space = spaces.Discrete(N_MCS)
        self.observation_space = spaces.Box(low=RSS_MIN_DBM, high=RSS_MAX_DBM, shape=(1,), dtype=np.float64)

        self.observation: LinkObservation | None = None
        self.lastaction: McsIndex | None = None

    def reset(self, *, seed: Optional[int] = None,
              options: Optional[dict] = None) -> tuple[np.ndarray, dict[str, Any]]:
        """Query the initial state. The query is not timed."""
        super().reset(seed=seed)
        self.observation = self.backend.get_state()
        self.lastaction = None
        return self._encode(self.observation), {"observation": self.observation}

    def step(self, action: int) -> tuple[np.ndarray, float, bool, bool, dict[str, Any]]:
        if not self.action_space.contains(int(action)):
            raise ValueError(f"action {action} not in [0, {N_MCS})")

        mcs = McsIndex(int(action))
        result = step_environment(self.backend, mcs, self.clock, self.instrumented)

        self.observation = result.observation
        self.lastaction = mcs
        info = {"observation": result.observation, "timings": result.timings, "fsr": result.fsr}

        # the link never terminates; runs are cut by step count
        return self._encode(result.observation), float(result.reward), False, False, info

    def close(self) -> None:
        self.backend.close()
        super().close()

    @staticmethod
    def _encode(observation: LinkObservation) -> np.ndarray:
        return np.array([observation.rss_dbm], dtype=np.float64)
