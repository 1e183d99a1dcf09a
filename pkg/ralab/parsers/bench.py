"""Parser micro-benchmark.

Each strategy parses `calls` inputs per repeat; the fastest repeat is kept
and divided by `calls`. Building the corpus, compiling patterns and loading
modules happen before the timed region.
"""
import itertools
import time
import timeit
from typing import Callable, Literal

from pydantic import BaseModel, ConfigDict, Field

from ralab.linksim.sim_clock import SimClock
from ralab.parsers.fixtures import valid_reward_corpus, valid_state_corpus
from ralab.parsers.strategies import ParserStrategy, parse_reward, parse_state

Scenario = Literal["state", "reward"]

SCENARIOS: tuple[Scenario, ...] = ("state", "reward")

_PARSE = {"state": parse_state, "reward": parse_reward}


class BenchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    calls: int = Field(default=10_000, ge=1)
    repeats: int = Field(default=5, ge=1)
    corpus_size: int = Field(default=64, ge=1)


class BenchRow(BaseModel):
    scenario: Scenario
    strategy: ParserStrategy
    avg_ns: float
    calls: int
    repeats: int
    repeat_totals_ns: list[int]


class ParseBenchReport(BaseModel):
    rows: list[BenchRow]

    def row(self, scenario: Scenario, strategy: ParserStrategy) -> BenchRow:
        for row in self.rows:
            if row.scenario == scenario and row.strategy == ParserStrategy(strategy):
                return row
        raise KeyError((scenario, strategy))


def build_corpus(size: int, seed: int) -> dict[Scenario, list[str]]:
    return {
        "state": [text for text, _ in valid_state_corpus(size, seed)],
        "reward": [text for text, _ in valid_reward_corpus(size, seed + 1)],
    }


def _drain(parse: Callable, texts: list[str], strategy: ParserStrategy) -> None:
    for text in texts:
        parse(text, strategy)


def _charged_drain(parse: Callable, texts: list[str], strategy: ParserStrategy, clock: SimClock) -> None:
    # virtual clock: one nanosecond per character read
    for text in texts:
        parse(text, strategy)
        clock.wait_ns(len(text))


def bench_parsers(corpus: dict[Scenario, list[str]], calls: int = 10_000, repeats: int = 5,
                  timer: Callable[[], int] = time.perf_counter_ns,
                  clock: SimClock | None = None) -> ParseBenchReport:
    """Average parse time per call for every strategy and scenario.

    `timer` returns integer nanoseconds. With a virtual `clock` the timer is
    the clock itself and each call is charged its input length.
    """
    if calls < 1 or repeats < 1:
        raise ValueError(f"calls and repeats must be >= 1, got calls={calls} repeats={repeats}")

    if clock is not None and clock.virtual:
        timer = clock.now_ns

    rows = []
    for scenario in SCENARIOS:
        texts = list(itertools.islice(itertools.cycle(corpus[scenario]), calls))
        parse = _PARSE[scenario]
        for strategy in ParserStrategy:
            if clock is not None and clock.virtual:
                stmt = lambda: _charged_drain(parse, texts, strategy, clock)
            else:
                stmt = lambda: _drain(parse, texts, strategy)

            totals = timeit.Timer(stmt=stmt, timer=timer).repeat(repeat=repeats, number=1)
            totals = [int(t) for t in totals]

            # a repeat faster than the clock resolution still costs a tick
            best = max(min(totals), 1)
            rows.append(BenchRow(scenario=scenario, strategy=strategy, avg_ns=best / calls,
                                 calls=calls, repeats=repeats, repeat_totals_ns=totals))
    return ParseBenchReport(rows=rows)
