from typing import NamedTuple


class Span(NamedTuple):
    pcpu: int
    vm: int | None
    start: int
    end: int


class UsageLedger:
    """Scheduled time, idle time and charges, counted only inside the measurement window.

    The window opens with `start` (end of warm-up) and closes with `stop` (horizon). The
    scheduler splits open runs at both instants, so spans passed to `add_run` never cross
    a window boundary.

    Arguments:
        vms (int): Number of VMs.
        pcpus (int): Number of PCPUs.
        record_spans (bool): Keep every run span, measured or not, for inspection.
    """

    def __init__(self, vms: int, pcpus: int, record_spans: bool = False):
        self.scheduled = [0] * vms
        self.charged = [0] * vms
        self.debits = [0] * vms
        self.boost_wakes = [0] * vms
        self.idle = [0] * pcpus
        self.samples = 0
        self.idle_samples = 0
        self.measuring = False
        self.origin = 0
        self.end = 0
        self.record_spans = record_spans
        self.spans: list[Span] = []

    @property
    def vms(self) -> int:
        return len(self.scheduled)

    @property
    def pcpus(self) -> int:
        return len(self.idle)

    @property
    def window(self) -> int:
        return self.end - self.origin

    def start(self, now: int) -> None:
        self.measuring = True
        self.origin = now
        self.end = now

    def stop(self, now: int) -> None:
        self.measuring = False
        self.end = now

    def clip(self, start: int, end: int) -> int:
        """Length of [start, end) inside the open window."""
        if not self.measuring:
            return 0
        return max(0, end - max(start, self.origin))

    def add_run(self, pcpu: int, vm: int | None, start: int, end: int) -> None:
        if self.record_spans and end > start:
            self.spans.append(Span(pcpu, vm, start, end))
        span = self.clip(start, end)
        if vm is None:
            self.idle[pcpu] += span
        else:
            self.scheduled[vm] += span

    def add_charge(self, vm: int, credits: int) -> None:
        if self.measuring:
            self.charged[vm] += credits
            self.debits[vm] += 1

    def add_sample(self, vm: int | None) -> None:
        if self.measuring:
            self.samples += 1
            if vm is None:
                self.idle_samples += 1

    def add_boost_wake(self, vm: int) -> None:
        if self.measuring:
            self.boost_wakes[vm] += 1

    def check_vm(self, vm: int) -> None:
        if not 0 <= vm < self.vms:
            raise KeyError(f"Unknown VM id {vm}, the ledger has {self.vms} VMs.")
