"""Value parsers shared by the configuration models. Durations are integer µs."""

import re
from decimal import Decimal, InvalidOperation
from typing import Annotated, Any

from pydantic import BeforeValidator

DURATION_UNITS = {"us": 1, "µs": 1, "ms": 1_000, "s": 1_000_000}
DURATION_RE = re.compile(r"^\s*([0-9]*\.?[0-9]+)\s*(us|µs|ms|s)?\s*$")
TRUE_WORDS = {"true", "yes", "on", "1"}
FALSE_WORDS = {"false", "no", "off", "0"}


def parse_duration(value: Any) -> Any:
    """Convert "9.8ms", "500us", "60s" or a bare number of µs to integer µs.

    Values of other types are returned unchanged for pydantic to reject.
    """
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return int(round(value))
    if not isinstance(value, str):
        return value
    match = DURATION_RE.match(value)
    if match is None:
        raise ValueError(f"invalid duration {value!r}, expected e.g. 10ms, 500us or 60s")
    number, unit = match.groups()
    try:
        micros = Decimal(number) * DURATION_UNITS[unit or "us"]
    except InvalidOperation as e:
        raise ValueError(f"invalid duration {value!r}") from e
    if micros != micros.to_integral_value():
        raise ValueError(f"duration {value!r} is not a whole number of microseconds")
    return int(micros)


def parse_percent(value: Any) -> Any:
    if isinstance(value, str):
        stripped = value.strip()
        if stripped.endswith("%"):
            stripped = stripped[:-1]
        return stripped
    return value


def parse_bool(value: Any) -> Any:
    if isinstance(value, str):
        word = value.strip().lower()
        if word in TRUE_WORDS:
            return True
        if word in FALSE_WORDS:
            return False
    return value


def parse_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def parse_optional(value: Any) -> Any:
    if isinstance(value, str) and value.strip().lower() in {"none", "auto", "random", ""}:
        return None
    return value


def format_duration(micros: int) -> str:
    if micros % 1_000_000 == 0 and micros:
        return f"{micros // 1_000_000}s"
    if micros % 1_000 == 0 and micros:
        return f"{micros // 1_000}ms"
    return f"{micros}us"


Duration = Annotated[int, BeforeValidator(parse_duration)]
OptionalDuration = Annotated[int | None, BeforeValidator(parse_duration), BeforeValidator(parse_optional)]
Percent = Annotated[float, BeforeValidator(parse_percent)]
Flag = Annotated[bool, BeforeValidator(parse_bool)]
