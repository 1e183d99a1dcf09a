"""Report writers.

CSV and JSON layouts are stable; the text tables are for people.
All durations are written in integer-derived nanoseconds except in the
text tables, which show milliseconds.
"""
from pathlib import Path
from typing import Any, Iterable, Literal

import pandas as pd
from loguru import logger
from pydantic import BaseModel

from ralab.backends.step import STAGES
from ralab.errors import EmptyInput, IoFailure
from ralab.parsers.bench import ParseBenchReport
from ralab.profiler.experiment import RunReport
from ralab.profiler.stats import TimingSummary
from ralab.utils.step_record import STEP_LOG_COLUMNS, StepRecord
from ralab.ralab_config import get_ralab_config

ReportFormat = Literal["csv", "json", "table"]

REPORT_CSV_COLUMNS = ("stage", "n", "mean_ns", "min_ns", "q1_ns", "median_ns", "q3_ns",
                      "whisker_lo_ns", "whisker_hi_ns", "max_ns")
BENCH_CSV_COLUMNS = ("scenario", "strategy", "avg_ns", "calls", "repeats")

_SUMMARY_FIELDS = ("n", "mean", "min", "q1", "median", "q3", "whisker_low", "whisker_high", "max")

FILE_SUFFIX = {"csv": ".csv", "json": ".json", "table": ".txt"}


class _RunInfo(BaseModel):
    scenario: str
    valid: bool
    error: str | None
    steps_requested: int
    steps_completed: int


class _Totals(TimingSummary):
    environment_mean: float
    agent_mean: float


class _ReportDocument(BaseModel):
    config: dict[str, Any]
    stages: dict[str, TimingSummary]
    totals: _Totals
    run: _RunInfo


def _require_samples(report: RunReport) -> None:
    if not report.stages or report.total is None:
        raise EmptyInput(f"report of {report.config.get('scenario')!r} holds no completed step")


def _summary_rows(report: RunReport) -> list[dict[str, Any]]:
    rows = []
    for stage, summary in [*report.stages.items(), ("total", report.total)]:
        values = [getattr(summary, name) for name in _SUMMARY_FIELDS]
        rows.append(dict(zip(REPORT_CSV_COLUMNS, [stage, *values])))
    return rows


def report_frame(report: RunReport) -> pd.DataFrame:
    _require_samples(report)
    return pd.DataFrame(_summary_rows(report), columns=list(REPORT_CSV_COLUMNS))


def report_table(report: RunReport) -> str:
    """Per-stage box-plot statistics in ms, then the environment/agent split"""
    frame = report_frame(report).set_index("stage")
    ms = frame.drop(columns=["n"]) / 1e6
    ms.columns = [column.removesuffix("_ns") + "_ms" for column in ms.columns]
    ms.insert(0, "n", frame["n"])

    scenario = report.config.get("scenario", "")
    lines = [f"scenario: {scenario}   valid: {str(report.valid).lower()}   "
             f"steps: {report.steps_completed}/{report.steps_requested}"]
    if report.error:
        lines.append(f"error: {report.error}")
    lines.append(ms.to_string(float_format=lambda v: f"{v:.3f}"))
    lines.append("")
    lines.append(_split_table({scenario: report}))
    return "\n".join(lines) + "\n"


def _split_table(reports: dict[str, RunReport]) -> str:
    columns = {}
    for name, report in reports.items():
        _require_samples(report)
        columns[name] = [report.environment_mean_ns / 1e6, report.agent_mean_ns / 1e6,
                         report.total.mean / 1e6]
    frame = pd.DataFrame(columns, index=["Environment", "Agent", "Total"])
    frame.index.name = "mean ms"
    return frame.to_string(float_format=lambda v: f"{v:.3f}")


def comparison_table(reports: dict[str, RunReport]) -> str:
    """Mean time of every stage, then the environment/agent split, one column per scenario"""
    columns = {}
    for name, report in reports.items():
        _require_samples(report)
        columns[name] = [report.stages[stage].mean / 1e6 for stage in STAGES]
    frame = pd.DataFrame(columns, index=list(STAGES))
    frame.index.name = "mean ms"
    return frame.to_string(float_format=lambda v: f"{v:.3f}") + "\n\n" + _split_table(reports) + "\n"


def export_report(report: RunReport, fmt: ReportFormat) -> bytes:
    _require_samples(report)
    match fmt:
        case "csv":
            return report_frame(report).to_csv(index=False, lineterminator="\n").encode("utf-8")
        case "json":
            document = _ReportDocument(
                config=report.config,
                stages=report.stages,
                totals=_Totals(**report.total.model_dump(), environment_mean=report.environment_mean_ns,
                               agent_mean=report.agent_mean_ns),
                run=_RunInfo(scenario=report.config.get("scenario", ""), valid=report.valid,
                             error=report.error, steps_requested=report.steps_requested,
                             steps_completed=report.steps_completed))
            return (document.model_dump_json(indent=2) + "\n").encode("utf-8")
        case "table":
            return report_table(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def step_log_csv(records: Iterable[StepRecord]) -> bytes:
    frame = pd.DataFrame([record.log_row() for record in records], columns=list(STEP_LOG_COLUMNS))
    return frame.to_csv(index=False, lineterminator="\n").encode("utf-8")


def bench_frame(report: ParseBenchReport) -> pd.DataFrame:
    return pd.DataFrame([{"scenario": row.scenario, "strategy": row.strategy.value, "avg_ns": row.avg_ns,
                          "calls": row.calls, "repeats": row.repeats} for row in report.rows],
                        columns=list(BENCH_CSV_COLUMNS))


def bench_csv(report: ParseBenchReport) -> bytes:
    return bench_frame(report).to_csv(index=False, lineterminator="\n").encode("utf-8")


def bench_table(report: ParseBenchReport) -> str:
    """Average parse time in microseconds, strategies by row and files by column"""
    frame = bench_frame(report).pivot(index="strategy", columns="scenario", values="avg_ns") / 1e3
    frame = frame[[scenario for scenario in ("reward", "state") if scenario in frame.columns]]
    frame.columns = [f"{scenario}_us" for scenario in frame.columns]
    return frame.to_string(float_format=lambda v: f"{v:.3f}") + "\n"


def write_bytes(path: Path, data: bytes) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e

    if get_ralab_config().LOG_INFO:
        logger.info(f"wrote {path}")
    return path


def write_report(report: RunReport, out_dir: Path, stem: str, formats: Iterable[ReportFormat]) -> list[Path]:
    return [write_bytes(Path(out_dir) / f"{stem}{FILE_SUFFIX[fmt]}", export_report(report, fmt))
            for fmt in formats]
