from collections import namedtuple

import numpy as np
from loguru import logger

from ralab.core.mcs import McsIndex
from ralab.core.reward import ZERO_STATS, FrameStats
from ralab.linksim.link_model import LinkModel, send_frames
from ralab.linksim.rss_trace import NS_PER_S, RssTrace

LinkSnapshot = namedtuple(typename="LinkSnapshot", field_names=["t_ns", "stats", "rss"])


class LinkSimulator:
    """One simulated station. The link is advanced lazily: every interaction
    first brings it up to the requested time with `sync_to`.

    A window between two syncs sends frames with the MCS and the RSS current
    at the start of the window, then moves the RSS trace across the window.
    """

    def __init__(self, model: LinkModel, trace: RssTrace,
                 rng: np.random.Generator, initial_mcs: McsIndex = McsIndex.MCS0,
                 start_ns: int = 0):
        self.model = model
        self.trace = trace
        self.rng = rng
        self.mcs = McsIndex(initial_mcs)
        self.stats: FrameStats = ZERO_STATS
        self.start_ns = start_ns
        self.synced_ns = start_ns

    @property
    def rss(self) -> float:
        return self.trace.rss

    def sync_to(self, t_ns: int) -> None:
        dt_ns = t_ns - self.synced_ns
        if dt_ns <= 0:
            return

        # attempts are due on the whole elapsed time, so short windows carry over
        due = round(self.model.attempts_rate * (t_ns - self.start_ns) / NS_PER_S)
        delta = send_frames(self.model, self.mcs, self.trace.rss, due - self.stats.attempts, self.rng)
        self.stats = self.stats + delta
        self.trace.advance_ns(dt_ns)
        self.synced_ns = t_ns

    def set_mcs(self, mcs: McsIndex, t_ns: int) -> None:
        """Frames sent from `t_ns` onwards use `mcs`"""
        self.sync_to(t_ns)
        if mcs != self.mcs:
            logger.debug(f"MCS {int(self.mcs)} -> {int(mcs)} at {t_ns} ns")
        self.mcs = McsIndex(mcs)

    def snapshot(self, t_ns: int) -> LinkSnapshot:
        self.sync_to(t_ns)
        return LinkSnapshot(t_ns=self.synced_ns, stats=self.stats, rss=self.trace.rss)
