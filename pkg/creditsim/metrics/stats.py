import math
from typing import Sequence

import numpy as np
from metrics.ledger import UsageLedger
from pydantic import BaseModel, ConfigDict
from scipy import stats
from workloads.ledger import WorkLedger

CONFIDENCE = 0.95
STUDENT_T_LIMIT = 30


class StatSummary(BaseModel):
    """Mean with the half-width of its 95% confidence interval."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mean: float
    half_width: float
    count: int

    @classmethod
    def single(cls, value: float) -> "StatSummary":
        return cls(mean=float(value), half_width=0.0, count=1)


def summarize(samples: Sequence[float]) -> StatSummary:
    """Summarize samples as mean and 95% confidence half-width.

    Student-t quantiles are used below 30 samples, normal quantiles from there on.

    Arguments:
        samples (Sequence[float]): At least two observations.

    Raises:
        ValueError: If fewer than two samples are given.

    Returns:
        StatSummary: The summary.
    """
    values = np.asarray(samples, dtype=float)
    n = values.size
    if n < 2:
        raise ValueError(f"At least 2 samples are needed for a confidence interval, got {n}.")
    mean = float(values.mean())
    deviation = float(values.std(ddof=1))
    quantile = (1 + CONFIDENCE) / 2
    if n < STUDENT_T_LIMIT:
        critical = float(stats.t.ppf(quantile, n - 1))
    else:
        critical = float(stats.norm.ppf(quantile))
    return StatSummary(mean=mean, half_width=critical * deviation / math.sqrt(n), count=n)


def summarize_any(samples: Sequence[float]) -> StatSummary:
    """summarize for n >= 2, a zero-width summary for a single value."""
    if len(samples) == 1:
        return StatSummary.single(samples[0])
    return summarize(samples)


def cpu_share(ledger: UsageLedger, vm: int, horizon: int) -> float:
    """Scheduled time of vm as a fraction of one PCPU over horizon µs."""
    ledger.check_vm(vm)
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}.")
    return ledger.scheduled[vm] / horizon


def idle_share(ledger: UsageLedger, horizon: int) -> float:
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}.")
    return sum(ledger.idle) / horizon


def work_rate(work: WorkLedger, vm: int, horizon: int) -> float:
    """Work units per µs of measured time."""
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}.")
    return work.units[vm] / horizon


def percent_of_baseline(work: WorkLedger, vm: int, baseline_rate: float, horizon: int) -> float:
    """Work rate of vm as a percentage of a solo run's work rate.

    Raises:
        ValueError: If the baseline rate is zero.
    """
    if baseline_rate <= 0:
        raise ValueError("percent_of_baseline needs a positive baseline rate.")
    return 100.0 * work_rate(work, vm, horizon) / baseline_rate


def charge_bias(ledger: UsageLedger, vm: int, quantum: int = 100) -> int:
    """Charged time minus scheduled time in µs; negative when the VM was undercharged."""
    ledger.check_vm(vm)
    return ledger.charged[vm] * quantum - ledger.scheduled[vm]
