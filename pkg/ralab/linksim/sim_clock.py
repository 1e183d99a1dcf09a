"""Monotonic clocks in integer nanoseconds.

A virtual clock moves only when someone waits on it, which makes every
duration measured against it exact and reproducible. A real clock reads the
host monotonic counter and sleeps for waits.
"""
import time
from typing import Literal

from loguru import logger

ClockMode = Literal["virtual", "real"]


class SimClock:

    def __init__(self, mode: ClockMode = "virtual"):
        if mode not in ("virtual", "real"):
            raise ValueError(f"unknown clock mode {mode!r}")
        self.mode = mode
        self._virtual_ns = 0
        self._origin_ns = time.perf_counter_ns()
        logger.debug(f"SimClock created in {mode} mode")

    @property
    def virtual(self) -> bool:
        return self.mode == "virtual"

    def now_ns(self) -> int:
        if self.virtual:
            return self._virtual_ns
        return time.perf_counter_ns() - self._origin_ns

    def wait_ns(self, duration_ns: int) -> None:
        if duration_ns < 0:
            raise ValueError(f"cannot wait a negative duration ({duration_ns} ns)")

        if self.virtual:
            self._virtual_ns += duration_ns
        elif duration_ns:
            time.sleep(duration_ns / 1e9)

    def wait_until(self, t_ns: int) -> None:
        """Block until the clock reads at least `t_ns`. No-op if already past."""
        if self.virtual:
            self._virtual_ns = max(self._virtual_ns, t_ns)
            return

        remaining = t_ns - self.now_ns()
        while remaining > 0:
            time.sleep(remaining / 1e9)
            remaining = t_ns - self.now_ns()
