"""Optional tensorboard event files for a run.

Reward, loss and the stage durations of every step are written as scalars
under `log_dir`. Event files carry wall time, so they are not part of the
byte-identical outputs.
"""
from pathlib import Path

from loguru import logger
from torch.utils.tensorboard import SummaryWriter

from ralab.backends.step import STAGES
from ralab.utils.step_record import StepRecord
from ralab.ralab_config import get_ralab_config


class TensorboardSink:

    def __init__(self, log_dir: Path, comment: str = "", flush_secs: int = 120):
        self.log_dir = Path(log_dir)
        self.summary_writer = SummaryWriter(log_dir=str(self.log_dir), comment=comment,
                                            flush_secs=flush_secs)
        if get_ralab_config().LOG_INFO:
            logger.info(f"writing tensorboard events to {self.log_dir}")

    def add_step(self, record: StepRecord) -> None:
        self.summary_writer.add_scalar("reward", record.reward, global_step=record.step)
        self.summary_writer.add_scalar("fsr", record.fsr, global_step=record.step)
        self.summary_writer.add_scalar("action", record.action, global_step=record.step)
        if record.loss is not None:
            self.summary_writer.add_scalar("loss", record.loss, global_step=record.step)

        durations_ms = {stage: getattr(record, f"{stage}_ns") / 1e6 for stage in STAGES}
        self.summary_writer.add_scalars("stage_ms", durations_ms, global_step=record.step)

    def add_text(self, tag: str, text: str) -> None:
        self.summary_writer.add_text(tag, text)

    def close(self) -> None:
        self.summary_writer.close()
