from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Iterator


class Priority(IntEnum):
    """Lower value is served first."""

    BOOST = 0
    UNDER = 1
    OVER = 2
    BLOCKED = 3


@dataclass(slots=True, eq=False)
class VCpu:
    id: int
    name: str
    pcpu: int
    share: Fraction = Fraction(0)
    refill: int = 0
    credits: int = 0
    prio: Priority = Priority.BLOCKED
    remainder: int = 0
    last_dispatch_at: int = 0

    @property
    def runnable(self) -> bool:
        return self.prio is not Priority.BLOCKED

    def credit_priority(self) -> Priority:
        return Priority.UNDER if self.credits > 0 else Priority.OVER

    def __repr__(self) -> str:
        return f"VCpu({self.name}, credits={self.credits}, {self.prio.name})"


class RunQueue:
    """Runnable VCPUs of one PCPU, ordered by priority band, FIFO inside a band.

    The running VCPU is not kept in its queue.
    """

    def __init__(self, pcpu: int):
        self.pcpu = pcpu
        self._entries: list[VCpu] = []

    def insert(self, vcpu: VCpu) -> None:
        """Append at the tail of the VCPU's band."""
        if not vcpu.runnable:
            raise ValueError(f"{vcpu.name} is blocked and cannot be queued.")
        index = len(self._entries)
        while index > 0 and self._entries[index - 1].prio > vcpu.prio:
            index -= 1
        self._entries.insert(index, vcpu)

    def remove(self, vcpu: VCpu) -> None:
        self._entries.remove(vcpu)

    def head(self) -> VCpu | None:
        return self._entries[0] if self._entries else None

    def rebanded(self) -> None:
        """Restore band order after priorities changed, keeping queue order inside bands."""
        entries = self._entries
        self._entries = []
        for vcpu in entries:
            self.insert(vcpu)

    def is_ordered(self) -> bool:
        return all(a.prio <= b.prio for a, b in zip(self._entries, self._entries[1:]))

    def __iter__(self) -> Iterator[VCpu]:
        return iter(list(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, vcpu: object) -> bool:
        return vcpu in self._entries


@dataclass(slots=True, eq=False)
class Pcpu:
    id: int
    queue: RunQueue
    vcpus: list[VCpu] = field(default_factory=list)
    running: VCpu | None = None
    since: int = 0
    charge_mark: int = 0
