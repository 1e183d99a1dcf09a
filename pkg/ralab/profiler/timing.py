from typing import Callable, TypeVar

from ralab.linksim.sim_clock import SimClock

_T = TypeVar("_T")


def time_stage(clock: SimClock, operation: Callable[[], _T]) -> tuple[_T, int]:
    """Run `operation` and return its result with the elapsed clock time in ns.

    On a virtual clock only explicit waits inside the operation count.
    """
    start = clock.now_ns()
    result = operation()
    return result, clock.now_ns() - start


class Stopwatch:
    """Consecutive laps on one clock. Laps partition the elapsed time exactly."""

    def __init__(self, clock: SimClock):
        self.clock = clock
        self.start_ns = clock.now_ns()
        self._last_ns = self.start_ns

    def lap(self) -> int:
        now = self.clock.now_ns()
        elapsed = now - self._last_ns
        self._last_ns = now
        return elapsed

    def elapsed(self) -> int:
        return self.clock.now_ns() - self.start_ns
