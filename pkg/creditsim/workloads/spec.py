import re
from enum import Enum
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator
from simcore.rng import Rng
from simcore.units import Duration, OptionalDuration, parse_duration


class WorkloadKind(str, Enum):
    CPU_HOG = "cpu-hog"
    USER_ATTACKER = "user-attacker"
    KERNEL_ATTACKER = "kernel-attacker"
    WORKLOOP_ATTACKER = "workloop-attacker"
    PINGER = "pinger"
    PONGER = "ponger"


ATTACKER_KINDS = {
    WorkloadKind.USER_ATTACKER,
    WorkloadKind.KERNEL_ATTACKER,
    WorkloadKind.WORKLOOP_ATTACKER,
}


class JitterKind(str, Enum):
    NONE = "none"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    LATE = "late"


JITTER_RE = re.compile(r"^\s*(none|uniform|gaussian|late)\s*(?:\(\s*([^)]*?)\s*\))?\s*$")


def parse_jitter(value: Any) -> Any:
    """Accept "none", "uniform(50us)", "gaussian(20us)" or "late(250us)"."""
    if not isinstance(value, str):
        return value
    match = JITTER_RE.match(value.lower())
    if match is None:
        raise ValueError(f"invalid jitter {value!r}, expected none, uniform(w), gaussian(s) or late(w)")
    kind, width = match.groups()
    if kind == "none":
        if width:
            raise ValueError("jitter none takes no width")
        return {"kind": kind, "width": 0}
    if not width:
        raise ValueError(f"jitter {kind} needs a width, e.g. {kind}(50us)")
    return {"kind": kind, "width": parse_duration(width)}


class JitterSpec(BaseModel):
    """Timing noise in µs.

    uniform(w) draws from (-w, w), gaussian(s) from N(0, s), late(w) from [0, w); every
    draw is truncated toward zero to whole µs.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: JitterKind = JitterKind.NONE
    width: Annotated[int, Field(ge=0)] = 0

    def draw(self, rng: Rng) -> int:
        if self.kind is JitterKind.NONE or self.width == 0:
            return 0
        if self.kind is JitterKind.UNIFORM:
            return int(rng.uniform(-self.width, self.width))
        if self.kind is JitterKind.GAUSSIAN:
            return int(rng.normal(self.width))
        return int(rng.uniform(0, self.width))

    def delay(self, rng: Rng) -> int:
        """A non-negative draw, for latencies."""
        return abs(self.draw(rng))

    def __str__(self) -> str:
        if self.kind is JitterKind.NONE:
            return "none"
        return f"{self.kind.value}({self.width}us)"


Jitter = Annotated[JitterSpec, BeforeValidator(parse_jitter)]

KIND_DEFAULTS: dict[WorkloadKind, dict[str, Any]] = {
    WorkloadKind.USER_ATTACKER: {},
    WorkloadKind.KERNEL_ATTACKER: {
        "spin": 8_000,
        "sleep_request": 1_500,
        "jitter": {"kind": "uniform", "width": 500},
    },
    WorkloadKind.WORKLOOP_ATTACKER: {},
}


class WorkloadSpec(BaseModel):
    """Parameters of a guest program. Fields that do not apply to the kind are ignored."""

    model_config = ConfigDict(extra="forbid")

    kind: WorkloadKind = WorkloadKind.CPU_HOG
    spin: Duration = 9_000
    sleep_request: OptionalDuration = 500
    period: Duration = 10_000
    guest_tick: Duration = 1_000
    guest_phase: Duration = 0
    start: Duration = 0
    jitter: Jitter = JitterSpec()
    wake_jitter: Jitter = JitterSpec()
    check_granularity: Annotated[int, Field(ge=1)] = 10_000
    iteration_ns: Annotated[float, Field(gt=0)] = 1_000.0
    message_cost: Duration = 10
    ping_interval: Duration = 1_000
    peer: str | None = None

    @model_validator(mode="before")
    @classmethod
    def apply_kind_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        try:
            kind = WorkloadKind(data.get("kind", WorkloadKind.CPU_HOG))
        except ValueError:
            return data
        return {**KIND_DEFAULTS.get(kind, {}), **data}

    @model_validator(mode="after")
    def check_timing(self) -> "WorkloadSpec":
        if self.guest_tick <= 0:
            raise ValueError("guest_tick must be positive")
        if not 0 <= self.guest_phase < self.guest_tick:
            raise ValueError("guest_phase must be in [0, guest_tick)")
        for name in ("spin", "period", "start", "message_cost", "ping_interval"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must not be negative")
        if self.sleep_request is not None and self.sleep_request < 0:
            raise ValueError("sleep_request must not be negative")
        return self

    @property
    def is_attacker(self) -> bool:
        return self.kind in ATTACKER_KINDS

    @property
    def effective_sleep_request(self) -> int:
        """Sleep request, with `auto` aiming the wake at the end of the period."""
        if self.sleep_request is not None:
            return self.sleep_request
        margin = self.guest_tick // 10
        return max(self.period - self.spin - margin, margin)

    @property
    def overruns_period(self) -> bool:
        return self.is_attacker and self.spin + self.effective_sleep_request > self.period

    @property
    def overshoot_limit(self) -> int:
        """Upper bound of the work-loop spin overshoot in µs."""
        return int(self.check_granularity * self.iteration_ns / 1_000)
