from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator
from simcore.units import Duration, Flag, OptionalDuration, Percent


class Variant(str, Enum):
    CREDIT = "credit"
    EXACT = "exact"
    POISSON = "poisson"
    BERNOULLI = "bernoulli"
    UNIFORM = "uniform"


class Mode(str, Enum):
    WC = "wc"
    NWC = "nwc"


class SchedulerConfig(BaseModel):
    """Parameters of the credit scheduler and of its charging variants."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    variant: Variant = Variant.CREDIT
    mode: Mode = Mode.WC
    cap: Percent | None = None
    fast_tick: Duration = 10_000
    reschedule_tick: Duration = 30_000
    debit: Annotated[int, Field(gt=0)] = 100
    max_credits: Annotated[int, Field(gt=0)] = 300
    quantum: Duration = 100
    boost: Flag = True
    switch_cost: Duration = 0

    poisson_mean: Duration = 10_000
    poisson_max: Duration = 30_000
    poisson_rate_matched: Flag = True
    bernoulli_slot: Duration = 1_000
    bernoulli_p: Annotated[float, Field(gt=0.0, le=1.0)] = 0.1
    slot_phase: OptionalDuration = None
    uniform_quantum: Duration = 1_000

    @model_validator(mode="after")
    def check_consistency(self) -> "SchedulerConfig":
        if self.mode is Mode.NWC and self.cap is None:
            raise ValueError("cap required in nwc mode")
        if self.mode is Mode.WC and self.cap is not None:
            raise ValueError("cap only applies in nwc mode")
        if self.cap is not None and not 0 < self.cap <= 100:
            raise ValueError(f"cap must be in (0, 100], got {self.cap}")
        for name in ("fast_tick", "reschedule_tick", "quantum", "poisson_mean", "poisson_max",
                     "bernoulli_slot", "uniform_quantum"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.reschedule_tick % self.fast_tick:
            raise ValueError("reschedule_tick must be a multiple of fast_tick")
        if self.fast_tick % self.uniform_quantum:
            raise ValueError("fast_tick must be a multiple of uniform_quantum")
        if self.switch_cost < 0:
            raise ValueError("switch_cost must not be negative")
        if self.slot_phase is not None and not 0 <= self.slot_phase < self.bernoulli_slot:
            raise ValueError("slot_phase must be in [0, bernoulli_slot)")
        return self

    @property
    def refills_per_period(self) -> int:
        return self.reschedule_tick // self.fast_tick

    @property
    def period_credits(self) -> int:
        """Credits worth one reschedule period of one PCPU (300 by default)."""
        return self.debit * self.refills_per_period
