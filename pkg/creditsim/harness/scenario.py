"""Scenario files: a line-oriented `key = value` format with dotted keys.

    name = table2
    pcpus = 2
    hogs = 5
    variants = credit, exact, poisson, bernoulli, uniform

    [scheduler]
    mode = wc

    [vm.attacker]
    kind = user-attacker
    spin = 9ms

`[section]` headers prefix the keys that follow them, `#` starts a comment. See
docs/scenario_format.md for every key.
"""

import os
from typing import Annotated, Any, NamedTuple

from config import get_default_seed, get_presets
from logger import Logger
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator
from scheduler.settings import Mode, SchedulerConfig, Variant
from simcore.units import Duration, Percent, parse_list
from workloads.spec import WorkloadKind, WorkloadSpec

logger = Logger(__name__)

SWEEP_SUFFIX = "-sweep"


class Diagnostic(NamedTuple):
    line: int
    field: str
    message: str

    def __str__(self) -> str:
        location = f"line {self.line}: " if self.line else ""
        return f"{location}{self.field}: {self.message}" if self.field else f"{location}{self.message}"


class ScenarioError(ValueError):
    """A scenario could not be parsed or is inconsistent.

    Arguments:
        diagnostics (list[Diagnostic]): One entry per problem found.
        source (str): File name or preset the scenario came from.
    """

    def __init__(self, diagnostics: list[Diagnostic], source: str = "<scenario>"):
        self.diagnostics = diagnostics
        self.source = source
        super().__init__(str(self))

    @classmethod
    def single(cls, message: str, source: str = "<scenario>", line: int = 0, field: str = "") -> "ScenarioError":
        return cls([Diagnostic(line, field, message)], source)

    def __str__(self) -> str:
        return "\n".join(f"{self.source}: {diagnostic}" for diagnostic in self.diagnostics)


class VmSpec(WorkloadSpec):
    name: str
    pcpu: Annotated[int, Field(ge=0)] = 0
    cap: Percent | None = None

    @property
    def role(self) -> str:
        if self.is_attacker:
            return "attacker"
        if self.kind is WorkloadKind.CPU_HOG:
            return "victim"
        return "io"


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    param: str
    values: Annotated[list[str], BeforeValidator(parse_list)]


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    description: str = ""
    pcpus: Annotated[int, Field(ge=1)] = 1
    vms: list[VmSpec] = []
    hogs: Annotated[int, Field(ge=0)] = 0
    scheduler: SchedulerConfig = SchedulerConfig()
    variants: Annotated[list[Variant], BeforeValidator(parse_list)] = []
    horizon: Duration = 60_000_000
    warmup: Duration = 300_000
    seed: Annotated[int, Field(ge=0)] | None = None
    replicas: Annotated[int, Field(ge=1)] = 20
    sweep: SweepSpec | None = None

    @model_validator(mode="after")
    def check_layout(self) -> "Scenario":
        if self.warmup < 0:
            raise ValueError("warmup must not be negative")
        if self.horizon <= self.warmup:
            raise ValueError(f"horizon ({self.horizon}us) must exceed warmup ({self.warmup}us)")
        vms = self.all_vms
        if not vms:
            raise ValueError("a scenario needs at least one VM (vm.<name>.* keys or hogs)")
        names = [vm.name for vm in vms]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"duplicate VM names: {', '.join(duplicates)}")
        by_name = {vm.name: vm for vm in vms}
        for vm in vms:
            if vm.pcpu >= self.pcpus:
                raise ValueError(f"VM {vm.name} is assigned to PCPU {vm.pcpu}, only {self.pcpus} exist")
            if vm.cap is not None and self.scheduler.mode is not Mode.NWC:
                raise ValueError(f"VM {vm.name} sets a cap, which only applies in nwc mode")
            if vm.kind is WorkloadKind.PINGER:
                peer = by_name.get(vm.peer or "")
                if peer is None or peer.kind is not WorkloadKind.PONGER:
                    raise ValueError(f"pinger {vm.name} needs a peer naming a ponger VM")
                if peer.peer is None:
                    peer.peer = vm.name
        for vm in vms:
            if vm.kind is WorkloadKind.PONGER and vm.peer is None:
                raise ValueError(f"ponger {vm.name} has no pinger")
        return self

    @property
    def all_vms(self) -> list[VmSpec]:
        """Named VMs followed by the generated CPU hogs, placed round-robin."""
        generated = [
            VmSpec(name=f"victim{i}", kind=WorkloadKind.CPU_HOG, pcpu=(len(self.vms) + i - 1) % self.pcpus)
            for i in range(1, self.hogs + 1)
        ]
        return list(self.vms) + generated

    @property
    def variant_list(self) -> list[Variant]:
        return list(self.variants) or [self.scheduler.variant]

    @property
    def resolved_seed(self) -> int:
        return self.seed if self.seed is not None else get_default_seed()

    def scheduler_for(self, variant: Variant) -> SchedulerConfig:
        return self.scheduler.model_copy(update={"variant": variant})

    def with_updates(self, **updates: Any) -> "Scenario":
        """Copy with top-level fields replaced and re-validated."""
        return validate_data({**self.model_dump(), **updates}, source=self.name)


class RawValue(NamedTuple):
    value: str
    line: int


def parse_lines(text: str, source: str = "<scenario>") -> dict[str, RawValue]:
    """Split scenario text into dotted keys with the line they were set on."""
    values: dict[str, RawValue] = {}
    errors: list[Diagnostic] = []
    section = ""
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                errors.append(Diagnostic(number, "", f"malformed section header {raw_line.strip()!r}"))
                continue
            section = line[1:-1].strip() + "."
            continue
        if "=" not in line:
            errors.append(Diagnostic(number, "", f"expected 'key = value', got {raw_line.strip()!r}"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            errors.append(Diagnostic(number, "", "missing key before '='"))
            continue
        key = section + key
        if key in values:
            errors.append(Diagnostic(number, key, f"set twice (first on line {values[key].line})"))
            continue
        values[key] = RawValue(value, number)
    if errors:
        raise ScenarioError(errors, source)
    return values


def to_data(values: dict[str, RawValue], source: str = "<scenario>") -> tuple[dict[str, Any], dict[str, int]]:
    """Nest dotted keys into model data and map pydantic locations back to lines."""
    data: dict[str, Any] = {}
    vms: dict[str, dict[str, Any]] = {}
    lines: dict[str, int] = {}
    errors: list[Diagnostic] = []
    for key, (value, line) in values.items():
        parts = key.split(".")
        if parts[0] == "vm":
            if len(parts) != 3 or not parts[1] or not parts[2]:
                errors.append(Diagnostic(line, key, "VM keys look like vm.<name>.<field>"))
                continue
            _, name, field = parts
            vm = vms.setdefault(name, {"name": name})
            vm[field] = value
            lines.setdefault(f"vm.{name}", line)
        elif len(parts) == 1:
            data[key] = value
        elif len(parts) == 2 and parts[0] in ("scheduler", "sweep"):
            data.setdefault(parts[0], {})[parts[1]] = value
            lines.setdefault(parts[0], line)
        else:
            errors.append(Diagnostic(line, key, "unknown key"))
            continue
        lines[key] = line
    if errors:
        raise ScenarioError(errors, source)
    if vms:
        data["vms"] = list(vms.values())
    return data, lines


def _location(loc: tuple, data: dict[str, Any]) -> str:
    parts = [str(part) for part in loc]
    if len(parts) >= 2 and parts[0] == "vms" and parts[1].isdigit():
        index = int(parts[1])
        vms = data.get("vms", [])
        name = vms[index]["name"] if index < len(vms) and isinstance(vms[index], dict) else parts[1]
        return ".".join(["vm", name, *parts[2:]])
    return ".".join(parts)


def _line_for(field: str, lines: dict[str, int]) -> int:
    while field:
        if field in lines:
            return lines[field]
        field = field.rpartition(".")[0]
    return 0


def validate_data(data: dict[str, Any], source: str = "<scenario>", lines: dict[str, int] | None = None) -> Scenario:
    lines = lines or {}
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        diagnostics = []
        for error in e.errors():
            # Drop the union/validator branch names pydantic appends to locations.
            loc = tuple(part for part in error["loc"] if not str(part).startswith("function-"))
            field = _location(loc, data)
            message = error["msg"].removeprefix("Value error, ")
            diagnostics.append(Diagnostic(_line_for(field, lines), field, message))
        raise ScenarioError(diagnostics, source) from e


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    data, lines = to_data(parse_lines(text, source), source)
    scenario = validate_data(data, source, lines)
    for vm in scenario.all_vms:
        if vm.overruns_period:
            logger.warning(
                "%s: %s spins %sus and sleeps %sus, longer than its %sus period.",
                source, vm.name, vm.spin, vm.effective_sleep_request, vm.period,
            )
    return scenario


def resolve_path(path_or_name: str) -> str:
    if os.path.isfile(path_or_name):
        return path_or_name
    presets = get_presets()
    for name in (path_or_name, path_or_name.removesuffix(SWEEP_SUFFIX)):
        if name in presets:
            return presets[name]
    raise ScenarioError.single(f"no scenario file or preset named {path_or_name!r}", path_or_name)


def load_scenario(path: str) -> Scenario:
    """Load a scenario file, or a built-in preset by name.

    Arguments:
        path (str): Path to a scenario file or the name of a preset.

    Raises:
        ScenarioError: If the file is missing, malformed or inconsistent.

    Returns:
        Scenario: The validated scenario with defaults applied.
    """
    resolved = resolve_path(path)
    try:
        with open(resolved, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ScenarioError.single(f"cannot read scenario: {e}", resolved) from e
    logger.debug("Loading scenario from %s.", resolved)
    return parse_scenario(text, source=os.path.basename(resolved))


def set_param(scenario: Scenario, path: str, value: str | int | float) -> Scenario:
    """Copy of scenario with the numeric field at a dotted path replaced.

    Paths look like `horizon`, `hogs`, `scheduler.cap` or `vm.attacker.spin`.

    Raises:
        ScenarioError: If the path does not exist or the field is not numeric.
    """
    data = scenario.model_dump()
    parts = path.split(".")
    target: Any = data
    if parts[0] == "vm":
        if len(parts) != 3:
            raise ScenarioError.single("VM paths look like vm.<name>.<field>", scenario.name, field=path)
        target = next((vm for vm in data["vms"] if vm["name"] == parts[1]), None)
        if target is None:
            raise ScenarioError.single(f"no VM named {parts[1]!r}", scenario.name, field=path)
        parts = parts[2:]
    for part in parts[:-1]:
        target = target.get(part) if isinstance(target, dict) else None
    field = parts[-1]
    if not isinstance(target, dict) or field not in target:
        raise ScenarioError.single("no such field", scenario.name, field=path)
    current = target[field]
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise ScenarioError.single("not a numeric field", scenario.name, field=path)
    target[field] = value
    return validate_data(data, source=scenario.name)
