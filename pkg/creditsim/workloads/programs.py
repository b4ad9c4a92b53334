"""Guest programs. A program is asked for its next action whenever its VCPU is
dispatched and whenever the timer of its last RunFor fires."""

from typing import ClassVar, NamedTuple

from simcore.rng import Rng
from workloads.spec import WorkloadKind, WorkloadSpec


class RunFor(NamedTuple):
    duration: int


class SleepUntil(NamedTuple):
    """Block the VCPU. `at` of None waits for a message; `notify` names a VM to message."""

    at: int | None
    notify: str | None = None


Action = RunFor | SleepUntil | None


def ceil_to_tick(t: int, tick: int, phase: int = 0) -> int:
    """First boundary of the guest tick grid at or after t."""
    return phase + -(-(t - phase) // tick) * tick


class Workload:
    kind: ClassVar[WorkloadKind]

    def __init__(self, name: str, spec: WorkloadSpec, rng: Rng):
        self.name = name
        self.spec = spec
        self.rng = rng

    @classmethod
    def all(cls) -> list[type["Workload"]]:
        found = []
        for subclass in cls.__subclasses__():
            if "kind" in subclass.__dict__:
                found.append(subclass)
            found.extend(subclass.all())
        return found

    @classmethod
    def create(cls, name: str, spec: WorkloadSpec, rng: Rng) -> "Workload":
        for workload in cls.all():
            if workload.kind is spec.kind:
                return workload(name, spec, rng)
        raise ValueError(f"Unknown workload kind {spec.kind}.")

    @property
    def starts_blocked(self) -> bool:
        return False

    def step(self, now: int) -> Action:
        """Next action at dispatch or when the running program's timer fires."""
        return None

    def on_message(self, now: int) -> None:
        """A peer sent this VM a message; the VCPU is being woken."""

    def on_switch_out(self, now: int) -> None:
        """The VCPU lost its PCPU, by preemption or by blocking."""

    def reset_statistics(self) -> None:
        """Forget what was recorded during warm-up."""


class CpuHog(Workload):
    """Always runnable, never blocks."""

    kind = WorkloadKind.CPU_HOG


class UserAttacker(Workload):
    """Spins for `spin` by its own clock, then sleeps until the guest tick after
    `sleep_request` has elapsed.

    The spin is measured from the dispatch that follows each wake, so the attacker keeps
    its phase by observing when it gets the CPU. A spin interrupted by preemption keeps
    its deadline; a VCPU re-dispatched after its deadline sleeps at once.
    """

    kind = WorkloadKind.USER_ATTACKER

    def __init__(self, name: str, spec: WorkloadSpec, rng: Rng):
        super().__init__(name, spec, rng)
        self.deadline: int | None = None
        self.spin_started = 0
        self.run_lengths: list[int] = []

    def spin_length(self) -> int:
        return max(0, self.spec.spin + self.spec.jitter.draw(self.rng))

    def step(self, now: int) -> Action:
        if self.deadline is None:
            self.spin_started = now
            self.deadline = now + self.spin_length()
        if now < self.deadline:
            return RunFor(self.deadline - now)
        return self.sleep(now)

    def sleep(self, now: int) -> SleepUntil:
        self.run_lengths.append(now - self.spin_started)
        self.deadline = None
        spec = self.spec
        wake = ceil_to_tick(now + spec.effective_sleep_request, spec.guest_tick, spec.guest_phase)
        return SleepUntil(wake + spec.wake_jitter.delay(self.rng))

    def reset_statistics(self) -> None:
        self.run_lengths.clear()


class KernelAttacker(UserAttacker):
    """The in-guest-kernel variant; it differs only in its defaults."""

    kind = WorkloadKind.KERNEL_ATTACKER


class WorkLoopAttacker(UserAttacker):
    """Reads the clock only every `check_granularity` loop iterations, so the spin ends
    up to one check interval late."""

    kind = WorkloadKind.WORKLOOP_ATTACKER

    def spin_length(self) -> int:
        overshoot = self.spec.overshoot_limit
        late = self.rng.integer(0, overshoot) if overshoot > 0 else 0
        return super().spin_length() + late


class MessageWorkload(Workload):
    """Handling a message costs `message_cost` of CPU time. A handler that is preempted
    resumes with what is left when it is dispatched again."""

    def __init__(self, name: str, spec: WorkloadSpec, rng: Rng):
        super().__init__(name, spec, rng)
        self.remaining: int | None = None
        self.resumed_at: int | None = None

    def handle(self, now: int) -> RunFor | None:
        """Keep working on the current message; None once it is done."""
        if self.remaining is None:
            self.remaining = self.spec.message_cost
        elif self.resumed_at is not None:
            self.remaining -= max(0, now - self.resumed_at)
        self.resumed_at = now
        if self.remaining > 0:
            return RunFor(self.remaining)
        self.remaining = None
        return None

    def on_switch_out(self, now: int) -> None:
        if self.remaining is not None and self.resumed_at is not None:
            self.remaining -= max(0, now - self.resumed_at)
        self.resumed_at = None


class Pinger(MessageWorkload):
    """Sends a message to its peer every `ping_interval` and waits for the reply.

    A round trip runs from the moment the message is due until the reply has been
    processed. Waiting for a PCPU before the message can leave counts, so does the
    peer's handling and this VM's own. Sending itself costs nothing.
    """

    kind = WorkloadKind.PINGER

    def __init__(self, name: str, spec: WorkloadSpec, rng: Rng):
        super().__init__(name, spec, rng)
        self.phase = "send"
        self.due_at = spec.start
        self.round_trips: list[int] = []

    def step(self, now: int) -> Action:
        if self.phase == "send":
            self.phase = "wait"
            return SleepUntil(None, notify=self.spec.peer)
        busy = self.handle(now)
        if busy is not None:
            return busy
        self.round_trips.append(now - self.due_at)
        self.phase = "send"
        self.due_at = now + self.spec.ping_interval
        return SleepUntil(self.due_at)

    def on_message(self, now: int) -> None:
        self.phase = "receive"

    def reset_statistics(self) -> None:
        self.round_trips.clear()


class Ponger(MessageWorkload):
    """Replies to every message from its peer."""

    kind = WorkloadKind.PONGER

    @property
    def starts_blocked(self) -> bool:
        return True

    def step(self, now: int) -> Action:
        busy = self.handle(now)
        if busy is not None:
            return busy
        return SleepUntil(None, notify=self.spec.peer)
