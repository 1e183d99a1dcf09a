"""802.11n single-stream MCS indices and their theoretical throughputs
(20 MHz channel, 800 ns guard interval)

"""
import enum

from pydantic import BaseModel, ConfigDict, model_validator


class McsIndex(enum.IntEnum):
    """The eight 802.11n rates. The action space of every agent.

    """

    MCS0 = 0
    MCS1 = 1
    MCS2 = 2
    MCS3 = 3
    MCS4 = 4
    MCS5 = 5
    MCS6 = 6
    MCS7 = 7


N_MCS = len(McsIndex)


class McsTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    # Mbit/s
    rates: tuple[float, ...] = (6.5, 13.0, 19.5, 26.0, 39.0, 52.0, 58.5, 65.0)

    @model_validator(mode="after")
    def _check_rates(self) -> "McsTable":
        if len(self.rates) != N_MCS:
            raise ValueError(f"expected {N_MCS} rates, got {len(self.rates)}")
        if any(b <= a for a, b in zip(self.rates, self.rates[1:])):
            raise ValueError("rates must be strictly increasing")
        return self

    @property
    def max_rate(self) -> float:
        return self.rates[-1]


MCS_TABLE = McsTable()

_RATES = MCS_TABLE.rates


def theoretical_rate(mcs: McsIndex) -> float:
    """Theoretical throughput of `mcs` in Mbit/s"""
    return _RATES[mcs]
