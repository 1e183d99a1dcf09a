"""Box-plot statistics of stage durations.

Quartiles interpolate linearly between the closest ranks (numpy's default
"linear" percentile method). Whiskers reach the furthest sample within
1.5 x IQR beyond q1 and q3 and never retreat inside the box.
"""
from typing import Sequence

import numpy as np
from pydantic import BaseModel

from ralab.errors import EmptyInput

WHISKER_IQR = 1.5


class TimingSummary(BaseModel):
    n: int
    mean: float
    min: float
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    max: float


def summarize(samples: Sequence[int] | np.ndarray, whis: float = WHISKER_IQR) -> TimingSummary:
    x = np.asarray(samples)
    if x.size == 0:
        raise EmptyInput("cannot summarize zero samples")

    q1, median, q3 = np.percentile(x, [25, 50, 75], method="linear")
    iqr = q3 - q1

    inside_high = x[x <= q3 + whis * iqr]
    whisker_high = max(float(inside_high.max()), float(q3)) if inside_high.size else float(q3)
    inside_low = x[x >= q1 - whis * iqr]
    whisker_low = min(float(inside_low.min()), float(q1)) if inside_low.size else float(q1)

    # integer durations: an exact integer sum divided once
    if np.issubdtype(x.dtype, np.integer):
        mean = int(x.sum(dtype=np.int64)) / x.size
    else:
        mean = float(np.mean(x))

    return TimingSummary(n=int(x.size), mean=mean, min=float(x.min()), q1=float(q1),
                         median=float(median), q3=float(q3), whisker_low=whisker_low,
                         whisker_high=whisker_high, max=float(x.max()))
