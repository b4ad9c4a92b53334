import csv
import io
import os
from typing import Literal, Sequence

from logger import Logger
from metrics.stats import StatSummary
from pydantic import BaseModel, ConfigDict, TypeAdapter

logger = Logger(__name__)

Format = Literal["csv", "json"]

CSV_COLUMNS = [
    "scenario-id",
    "scheduler",
    "vm-id",
    "role",
    "share",
    "pct-baseline",
    "charge-bias-µs",
    "debits",
    "ci-half-width",
]


class VmReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vm: str
    role: str
    kind: str
    pcpu: int
    share: StatSummary
    pct_baseline: StatSummary | None = None
    charge_bias_us: StatSummary
    debits: StatSummary
    boost_wakes: StatSummary
    run_length_us: StatSummary | None = None
    within_tolerance: float | None = None
    latency_us: StatSummary | None = None


class SamplerStats(BaseModel):
    model_config = ConfigDict(extra="forbid")

    samples: StatSummary
    idle_samples: StatSummary


class SchedulerReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scheduler: str
    mode: str
    idle_share: StatSummary
    vms: list[VmReport]
    sampler: SamplerStats
    events: dict[str, float]
    digests: list[str]

    def vm(self, name: str) -> VmReport:
        for report in self.vms:
            if report.vm == name:
                return report
        raise KeyError(f"No VM named {name} in the {self.scheduler} report.")


class Report(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: str
    point: str | None = None
    seed: int
    replicas: int
    pcpus: int
    horizon_us: int
    warmup_us: int
    schedulers: list[SchedulerReport]

    @property
    def scenario_id(self) -> str:
        return f"{self.scenario}[{self.point}]" if self.point else self.scenario

    def scheduler(self, name: str) -> SchedulerReport:
        for report in self.schedulers:
            if report.scheduler == name:
                return report
        raise KeyError(f"No scheduler {name} in report {self.scenario_id}.")


ReportList = TypeAdapter(list[Report])


def _number(value: float | None, digits: int) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def csv_rows(report: Report) -> list[list[str]]:
    rows = []
    for group in report.schedulers:
        for vm in group.vms:
            rows.append([
                report.scenario_id,
                group.scheduler,
                vm.vm,
                vm.role,
                _number(vm.share.mean, 6),
                _number(vm.pct_baseline.mean if vm.pct_baseline else None, 3),
                _number(vm.charge_bias_us.mean, 1),
                _number(vm.debits.mean, 1),
                _number(vm.share.half_width, 6),
            ])
        rows.append([
            report.scenario_id,
            group.scheduler,
            "idle",
            "idle",
            _number(group.idle_share.mean, 6),
            "",
            "",
            "",
            _number(group.idle_share.half_width, 6),
        ])
    return rows


def render(reports: Report | Sequence[Report], fmt: Format) -> str:
    """Serialize one report, or the reports of a sweep, as CSV or JSON text."""
    many = not isinstance(reports, Report)
    if fmt == "json":
        if many:
            return ReportList.dump_json(list(reports), indent=2).decode() + "\n"
        return reports.model_dump_json(indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"Unknown report format {fmt!r}, use csv or json.")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in (reports if many else [reports]):
        writer.writerows(csv_rows(report))
    return buffer.getvalue()


def emit(reports: Report | Sequence[Report], fmt: Format, path: str | None = None) -> str:
    """Write the report to path, or just return the text when path is None.

    Raises:
        OSError: If the file cannot be written; the message names the path.
    """
    text = render(reports, fmt)
    if path is None:
        return text
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OSError(f"Cannot write report to {path}: {e}") from e
    logger.info("Report written to %s.", path)
    return text


def load_reports(path: str) -> list[Report]:
    """Read a JSON file written by emit, holding one report or a list of them."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_reports(text)


def parse_reports(text: str) -> list[Report]:
    if text.lstrip().startswith("["):
        return ReportList.validate_json(text)
    return [Report.model_validate_json(text)]
