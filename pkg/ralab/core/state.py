"""Link observations, the RSS state grid and RL transitions

"""
import math
from dataclasses import dataclass

from ralab.core.mcs import McsIndex
from ralab.errors import DomainError

RSS_MIN_DBM = -95
RSS_MAX_DBM = -20

# one bin per integer dBm, -95 ... -20
RSS_BINS = tuple(range(RSS_MIN_DBM, RSS_MAX_DBM + 1))
N_STATES = len(RSS_BINS)


def clamp_rss(rss_dbm: float) -> float:
    return min(max(rss_dbm, RSS_MIN_DBM), RSS_MAX_DBM)


@dataclass(frozen=True, slots=True)
class LinkObservation:
    """RSS in dBm, clamped to [-95, -20] on ingestion"""
    rss_dbm: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.rss_dbm):
            raise DomainError(f"non-finite RSS {self.rss_dbm}")
        object.__setattr__(self, "rss_dbm", clamp_rss(float(self.rss_dbm)))


def discretize_rss(obs: LinkObservation) -> int:
    """The state bin of an observation: floor to integer dBm, clamped to the grid."""
    return int(clamp_rss(math.floor(obs.rss_dbm)))


def state_index(state: int) -> int:
    """Row of a state bin in a tabular value store"""
    return state - RSS_MIN_DBM


def normalize_state(state: float) -> float:
    """Affine map of the state range [-95, -20] onto [0, 1]"""
    return (state - RSS_MIN_DBM) / (RSS_MAX_DBM - RSS_MIN_DBM)


@dataclass(frozen=True, slots=True)
class Transition:
    """One RL experience tuple.

    States are bins of the RSS grid, or raw RSS values inside the grid range
    for agents that read the unbinned signal.
    """
    state: float
    action: McsIndex
    reward: float
    next_state: float

    def __post_init__(self) -> None:
        for name in ("state", "next_state"):
            value = getattr(self, name)
            if not RSS_MIN_DBM <= value <= RSS_MAX_DBM:
                raise DomainError(f"{name}={value} outside the state grid")
        if not 0.0 <= self.reward <= 1.0:
            raise DomainError(f"reward={self.reward} outside [0, 1]")
