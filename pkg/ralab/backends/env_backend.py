"""Environment side of the rate adaptation loop.

Four ways of deploying an MCS and reading back frame counters and RSS:

    in_memory         reads the simulator's live variables
    fresh_file        renders both stat files at query time, reads and parses them
    stale_file        reads a table refreshed once every `table_period_ms`
    external_command  like fresh_file, but every read spawns a child process

A stale_file backend can also read its table through the external command
(`external_access`).
"""
import abc
import enum
import shutil
import subprocess
import tempfile
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ralab.core.mcs import McsIndex
from ralab.core.reward import FrameStats
from ralab.core.state import LinkObservation
from ralab.errors import BackendUnavailable
from ralab.linksim.link_simulator import LinkSimulator
from ralab.linksim.sim_clock import SimClock
from ralab.parsers.fixtures import render_reward_file, render_state_file
from ralab.parsers.strategies import ParserStrategy, parse_reward, parse_state
from ralab.backends.latency import NS_PER_MS, LatencyConfig, LatencyModel
from ralab.ralab_config import get_ralab_config

STATS_FILE_NAME = "frame_stats"
STATE_FILE_NAME = "wireless"


class EnvBackendKind(str, enum.Enum):
    IN_MEMORY = "in_memory"
    FRESH_FILE = "fresh_file"
    STALE_FILE = "stale_file"
    EXTERNAL_COMMAND = "external_command"


class BackendConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: EnvBackendKind = EnvBackendKind.IN_MEMORY
    workdir: Path | None = Field(default=None, description="Where file-backed kinds keep their files. "
                                                            "A temporary directory when unset")
    external_access: bool = Field(default=False, description="stale_file: read the table with the external command")
    command: tuple[str, ...] = Field(default=("cat",), description="Prints the file given as last argument")
    spawn_overhead_ms: float = Field(default=5.0, ge=0.0,
                                     description="Cost charged per spawned read on the virtual clock")
    state_parser: ParserStrategy = ParserStrategy.PATTERN
    reward_parser: ParserStrategy = ParserStrategy.SPLIT
    latency: LatencyConfig = LatencyConfig()

    @model_validator(mode="after")
    def _check_command(self) -> "BackendConfig":
        if not self.command:
            raise ValueError("command must name a program")
        return self


class EnvConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    reward_query_period_ms: float = Field(default=50.0, gt=0.0)
    table_period_ms: float = Field(default=100.0, gt=0.0)
    backend: BackendConfig = BackendConfig()


class _DirectReader:

    def read(self, path: Path) -> str:
        try:
            with open(path, encoding="ascii", newline="") as handle:
                return handle.read()
        except OSError as e:
            raise BackendUnavailable(f"cannot read {path}: {e}") from e


class _CommandReader:
    """One short-lived child process per read"""

    def __init__(self, command: tuple[str, ...], clock: SimClock, overhead_ns: int):
        self.command = command
        self.clock = clock
        self.overhead_ns = overhead_ns

    def read(self, path: Path) -> str:
        try:
            completed = subprocess.run([*self.command, str(path)], capture_output=True,
                                       text=True, check=True)
        except (OSError, subprocess.CalledProcessError) as e:
            raise BackendUnavailable(f"{' '.join(self.command)} {path} failed: {e}") from e

        # the host charges the real clock by itself
        if self.clock.virtual:
            self.clock.wait_ns(self.overhead_ns)
        return completed.stdout


class EnvBackend(abc.ABC):
    """Deploys actions on a simulated link and queries it.

    Every query may be delayed by an injected latency, which elapses before the
    data is read. An action takes effect the instant `set_action` is called;
    its injected latency elapses afterwards.
    """

    kind: EnvBackendKind

    def __init__(self, simulator: LinkSimulator, clock: SimClock,
                 config: EnvConfig, latency: LatencyModel):
        self.simulator = simulator
        self.clock = clock
        self.config = config
        self.latency = latency
        self.reward_query_period_ns = round(config.reward_query_period_ms * NS_PER_MS)

    def set_action(self, mcs: McsIndex) -> bool:
        self._check_available()
        now = self.clock.now_ns()
        self._refresh(now)
        self.simulator.set_mcs(mcs, now)
        self.clock.wait_ns(self.latency.sample_ns("set_action"))
        return True

    def snapshot_stats(self) -> FrameStats:
        """Counters at the start of an observation window, without injected latency"""
        self._check_available()
        self._refresh(self.clock.now_ns())
        return self._read_stats()

    def wait_for_reward(self) -> None:
        self.clock.wait_ns(self.reward_query_period_ns)

    def get_reward_stats(self) -> FrameStats:
        self._check_available()
        self.clock.wait_ns(self.latency.sample_ns("get_reward"))
        self._refresh(self.clock.now_ns())
        return self._read_stats()

    def get_state(self) -> LinkObservation:
        self._check_available()
        self.clock.wait_ns(self.latency.sample_ns("get_state"))
        self._refresh(self.clock.now_ns())
        return self._read_state()

    def close(self) -> None:
        pass

    def _check_available(self) -> None:
        pass

    def _refresh(self, now_ns: int) -> None:
        """Bring published data up to `now_ns`"""

    @abc.abstractmethod
    def _read_stats(self) -> FrameStats:
        ...

    @abc.abstractmethod
    def _read_state(self) -> LinkObservation:
        ...


class InMemoryBackend(EnvBackend):
    kind = EnvBackendKind.IN_MEMORY

    def _read_stats(self) -> FrameStats:
        return self.simulator.snapshot(self.clock.now_ns()).stats

    def _read_state(self) -> LinkObservation:
        return LinkObservation(rss_dbm=self.simulator.snapshot(self.clock.now_ns()).rss)


class FreshFileBackend(EnvBackend):
    """Both files are rendered from the live simulator when read"""
    kind = EnvBackendKind.FRESH_FILE

    def __init__(self, simulator: LinkSimulator, clock: SimClock, config: EnvConfig,
                 latency: LatencyModel, decor_rng: np.random.Generator, use_command: bool = False):
        super().__init__(simulator, clock, config, latency)
        backend = config.backend
        self.decor_rng = decor_rng

        self._owns_workdir = backend.workdir is None
        if self._owns_workdir:
            self.workdir = Path(tempfile.mkdtemp(prefix="ralab-"))
        else:
            self.workdir = Path(backend.workdir)
        self._check_available()

        self.stats_path = self.workdir / STATS_FILE_NAME
        self.state_path = self.workdir / STATE_FILE_NAME

        if use_command:
            self.reader = _CommandReader(backend.command, clock,
                                         round(backend.spawn_overhead_ms * NS_PER_MS))
        else:
            self.reader = _DirectReader()

        if get_ralab_config().LOG_INFO:
            logger.info(f"{self.kind.value} backend writing to {self.workdir}")

    def close(self) -> None:
        if self._owns_workdir:
            shutil.rmtree(self.workdir, ignore_errors=True)

    def _check_available(self) -> None:
        if not self.workdir.is_dir():
            raise BackendUnavailable(f"workdir {self.workdir} does not exist")

    def _write(self, path: Path, text: str) -> None:
        try:
            path.write_text(text, encoding="ascii")
        except OSError as e:
            raise BackendUnavailable(f"cannot write {path}: {e}") from e

    def _render_stats(self, stats: FrameStats) -> None:
        self._write(self.stats_path, render_reward_file(stats))

    def _render_state(self, rss: float) -> None:
        self._write(self.state_path, render_state_file(LinkObservation(rss_dbm=rss), self.decor_rng))

    def _parse_stats(self) -> FrameStats:
        return parse_reward(self.reader.read(self.stats_path), self.config.backend.reward_parser)

    def _parse_state(self) -> LinkObservation:
        return LinkObservation(rss_dbm=parse_state(self.reader.read(self.state_path),
                                                   self.config.backend.state_parser))

    def _read_stats(self) -> FrameStats:
        self._render_stats(self.simulator.snapshot(self.clock.now_ns()).stats)
        return self._parse_stats()

    def _read_state(self) -> LinkObservation:
        self._render_state(self.simulator.snapshot(self.clock.now_ns()).rss)
        return self._parse_state()


class ExternalCommandBackend(FreshFileBackend):
    kind = EnvBackendKind.EXTERNAL_COMMAND

    def __init__(self, simulator: LinkSimulator, clock: SimClock, config: EnvConfig,
                 latency: LatencyModel, decor_rng: np.random.Generator):
        super().__init__(simulator, clock, config, latency, decor_rng, use_command=True)


class StaleFileBackend(FreshFileBackend):
    """Files refreshed only on ticks of `table_period_ms`; reads see the last tick.

    A tick at time T publishes all traffic up to T, so post-action statistics
    are first visible at the first tick at or after the end of the observation
    window, and `wait_for_reward` blocks until then.
    """
    kind = EnvBackendKind.STALE_FILE

    def __init__(self, simulator: LinkSimulator, clock: SimClock, config: EnvConfig,
                 latency: LatencyModel, decor_rng: np.random.Generator):
        super().__init__(simulator, clock, config, latency, decor_rng,
                         use_command=config.backend.external_access)
        self.table_period_ns = round(config.table_period_ms * NS_PER_MS)
        self.last_tick_ns = -1
        self._refresh(clock.now_ns())

    def _refresh(self, now_ns: int) -> None:
        tick = now_ns // self.table_period_ns * self.table_period_ns
        if tick <= self.last_tick_ns:
            return

        # intermediate ticks are overwritten unread, only the latest matters
        snap = self.simulator.snapshot(tick)
        self._render_stats(snap.stats)
        self._render_state(snap.rss)
        self.last_tick_ns = tick
        logger.debug(f"table refreshed at {tick} ns: {snap.stats}")

    def wait_for_reward(self) -> None:
        super().wait_for_reward()
        now = self.clock.now_ns()
        next_tick = -(-now // self.table_period_ns) * self.table_period_ns
        self.clock.wait_until(next_tick)

    def _read_stats(self) -> FrameStats:
        return self._parse_stats()

    def _read_state(self) -> LinkObservation:
        return self._parse_state()


def make_backend(config: EnvConfig, simulator: LinkSimulator, clock: SimClock,
                 latency: LatencyModel, decor_rng: np.random.Generator) -> EnvBackend:
    match config.backend.kind:
        case EnvBackendKind.IN_MEMORY:
            return InMemoryBackend(simulator, clock, config, latency)
        case EnvBackendKind.FRESH_FILE:
            return FreshFileBackend(simulator, clock, config, latency, decor_rng)
        case EnvBackendKind.STALE_FILE:
            return StaleFileBackend(simulator, clock, config, latency, decor_rng)
        case EnvBackendKind.EXTERNAL_COMMAND:
            return ExternalCommandBackend(simulator, clock, config, latency, decor_rng)
    raise ValueError(f"unknown backend kind {config.backend.kind}")
