"""The four subcommands. Each takes validated configs and returns the files it wrote."""
from pathlib import Path

import pandas as pd
from loguru import logger

from ralab.core.mcs import McsIndex
from ralab.core.state import RSS_BINS
from ralab.errors import RunFailed
from ralab.linksim.link_model import expected_rewards, oracle_best_mcs
from ralab.linksim.sim_clock import SimClock
from ralab.parsers.bench import bench_parsers, build_corpus
from ralab.agents.checkpoint import save_agent
from ralab.profiler.experiment import Experiment, run_profile
from ralab.profiler.export import (bench_csv, bench_table, comparison_table, step_log_csv,
                                   write_bytes, write_report)
from ralab.profiler.torchboard import TensorboardSink
from ralab.cli.run_config import RunConfig
from ralab.ralab_config import get_ralab_config

ORACLE_COLUMNS = ("rss", "best_mcs", "expected_reward", *(f"reward_mcs{int(m)}" for m in McsIndex))


def cmd_run(config: RunConfig) -> list[Path]:
    """Run the loop and write one CSV row per step"""
    written = []
    experiment = Experiment(config)
    sink = None
    try:
        if config.tensorboard_dir is not None:
            sink = TensorboardSink(config.tensorboard_dir / config.scenario, comment=config.scenario)
        if get_ralab_config().LOG_INFO:
            logger.info(f"run {config.scenario!r}: {config.steps} steps")
        records = experiment.run(on_step=sink.add_step if sink is not None else None)
    finally:
        experiment.close()
        if sink is not None:
            sink.close()

    written.append(write_bytes(config.out / f"{config.scenario}_steps.csv", step_log_csv(records)))
    if config.agent.save_checkpoint is not None:
        written.append(save_agent(experiment.agent, config.agent.save_checkpoint))
    return written


def cmd_profile(configs: list[RunConfig]) -> list[Path]:
    """Profile every scenario; several scenarios also get a side-by-side comparison.

    A scenario that aborted before its first step has nothing to report and
    is only named in the RunFailed error.
    """
    written = []
    reports = {}
    for config in configs:
        sink = None
        if config.tensorboard_dir is not None:
            sink = TensorboardSink(config.tensorboard_dir / config.scenario, comment=config.scenario)
        try:
            report = run_profile(config, on_step=sink.add_step if sink is not None else None)
        finally:
            if sink is not None:
                sink.close()

        reports[config.scenario] = report
        if report.steps_completed > 0:
            written.extend(write_report(report, config.out, f"{config.scenario}_report", config.formats))

    measured = {name: report for name, report in reports.items() if report.steps_completed > 0}
    if len(measured) > 1:
        table = comparison_table(measured)
        written.append(write_bytes(configs[0].out / "comparison.txt", table.encode("utf-8")))
        print(table, end="")

    failed = [name for name, report in reports.items() if not report.valid]
    if failed:
        raise RunFailed(f"scenarios {failed} aborted: "
                        + "; ".join(reports[name].error for name in failed))
    return written


def cmd_bench_parse(config: RunConfig) -> list[Path]:
    bench = config.bench
    corpus = build_corpus(bench.corpus_size, config.seed)
    report = bench_parsers(corpus, calls=bench.calls, repeats=bench.repeats, clock=SimClock(config.clock))

    table = bench_table(report)
    print(table, end="")
    return [write_bytes(config.out / "bench_parse.csv", bench_csv(report)),
            write_bytes(config.out / "bench_parse.txt", table.encode("utf-8"))]


def oracle_frame(config: RunConfig) -> pd.DataFrame:
    """Best MCS and expected rewards of the link model on every state bin"""
    rows = []
    for rss in RSS_BINS:
        rewards = expected_rewards(config.link, rss)
        best = oracle_best_mcs(config.link, rss)
        rows.append([rss, int(best), rewards[best], *rewards])
    return pd.DataFrame(rows, columns=list(ORACLE_COLUMNS))


def cmd_oracle(config: RunConfig) -> list[Path]:
    frame = oracle_frame(config)
    data = frame.to_csv(index=False, lineterminator="\n").encode("utf-8")
    logger.debug(f"oracle best mcs per bin: {frame['best_mcs'].tolist()}")
    return [write_bytes(config.out / "oracle.csv", data)]
