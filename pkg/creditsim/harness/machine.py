"""One replica of one scheduler variant: the simulator, the scheduler and the guest
programs wired together."""

from typing import NamedTuple

from harness.scenario import Scenario
from logger import Logger
from metrics.ledger import UsageLedger
from scheduler.credit import CreditScheduler
from scheduler.settings import Variant
from scheduler.vcpu import Pcpu, VCpu
from simcore.engine import Event, EventKind, Simulator
from workloads.ledger import WorkLedger
from workloads.programs import Action, RunFor, SleepUntil, Workload

logger = Logger(__name__)


class ReplicaResult(NamedTuple):
    variant: Variant
    replica: int
    ledger: UsageLedger
    work: WorkLedger
    run_lengths: list[list[int]]
    round_trips: list[list[int]]
    events: dict[str, int]
    digest: str


class Machine:
    """Arguments:
    scenario (Scenario): What to simulate.
    variant (Variant): Scheduler variant of this run.
    replica (int): Replica index, mixed into the seed.
    record_spans (bool): Keep every run span in the usage ledger.
    """

    def __init__(self, scenario: Scenario, variant: Variant, replica: int = 0, record_spans: bool = False):
        self.scenario = scenario
        self.variant = variant
        self.replica = replica
        self.config = scenario.scheduler_for(variant)
        self.vms = scenario.all_vms
        count = len(self.vms)

        self.sim = Simulator(scenario.resolved_seed, replica)
        self.ledger = UsageLedger(count, scenario.pcpus, record_spans)
        self.work = WorkLedger(count)
        self.scheduler = CreditScheduler(self.config, self.sim, self.ledger, scenario.pcpus)
        self.vcpus = [self.scheduler.add_vcpu(vm.name, vm.pcpu, vm.cap) for vm in self.vms]
        self.workloads = [
            Workload.create(vm.name, vm, self.sim.rng.child(2, index)) for index, vm in enumerate(self.vms)
        ]
        self.by_name = {vm.name: index for index, vm in enumerate(self.vms)}

        self.timers: list[Event | None] = [None] * count
        self.pending: list[SleepUntil | None] = [None] * count
        self.work_from: list[int | None] = [None] * count

        self.scheduler.listener = self.on_switch
        self.sim.on(EventKind.WORKLOAD_TIMER, self.on_timer)
        self.sim.on(EventKind.VCPU_WAKE, self.on_wake)
        self.sim.on(EventKind.VCPU_YIELD, self.on_yield)

    def run(self) -> ReplicaResult:
        self.scheduler.start(0)
        for index, (vm, workload) in enumerate(zip(self.vms, self.workloads)):
            if not workload.starts_blocked:
                self.sim.schedule(vm.start, EventKind.VCPU_WAKE, index)

        warmup, horizon = self.scenario.warmup, self.scenario.horizon
        self.sim.run_until(warmup)
        self.checkpoint(warmup)
        self.ledger.start(warmup)
        for workload in self.workloads:
            workload.reset_statistics()
        self.sim.run_until(horizon)
        self.checkpoint(horizon)
        self.ledger.stop(horizon)

        return ReplicaResult(
            variant=self.variant,
            replica=self.replica,
            ledger=self.ledger,
            work=self.work,
            run_lengths=[list(getattr(w, "run_lengths", [])) for w in self.workloads],
            round_trips=[list(getattr(w, "round_trips", [])) for w in self.workloads],
            events={kind.value: self.sim.counts[kind] for kind in EventKind},
            digest=self.sim.trace_digest(),
        )

    def checkpoint(self, now: int) -> None:
        self.scheduler.checkpoint(now)
        for index, start in enumerate(self.work_from):
            if start is not None:
                self._accrue(index, now)
                self.work_from[index] = max(start, now)

    def _accrue(self, index: int, now: int) -> None:
        start = self.work_from[index]
        if start is not None and now > start:
            self.work.accrue_work(index, self.ledger.clip(start, now))

    # Scheduler callbacks.

    def on_switch(self, pcpu: Pcpu, previous: VCpu | None, chosen: VCpu | None, now: int) -> None:
        if previous is not None:
            index = previous.id
            self.workloads[index].on_switch_out(now)
            self.sim.cancel(self.timers[index])
            self.timers[index] = None
            self._accrue(index, now)
            self.work_from[index] = None
        if chosen is not None:
            index = chosen.id
            start = now + self.config.switch_cost
            self.work_from[index] = start
            pending = self.pending[index]
            if pending is not None:
                self.timers[index] = self.sim.schedule(start, EventKind.VCPU_YIELD, index)
            else:
                self._apply(index, self.workloads[index].step(start), start, dispatching=True)

    def _apply(self, index: int, action: Action, now: int, dispatching: bool) -> None:
        if action is None:
            return
        if isinstance(action, RunFor):
            self.timers[index] = self.sim.schedule(now + action.duration, EventKind.WORKLOAD_TIMER, index)
        elif dispatching:
            # The scheduler is mid-switch; the VCPU blocks once the switch has completed.
            self.pending[index] = action
            self.timers[index] = self.sim.schedule(now, EventKind.VCPU_YIELD, index)
        else:
            self._sleep(index, action, now)

    def _sleep(self, index: int, action: SleepUntil, now: int) -> None:
        self.pending[index] = None
        self.scheduler.on_block(self.vcpus[index], now)
        if action.at is not None:
            self.sim.schedule(max(action.at, now), EventKind.VCPU_WAKE, index)
        if action.notify is not None:
            peer = self.by_name[action.notify]
            self.workloads[peer].on_message(now)
            self.sim.schedule(now, EventKind.VCPU_WAKE, peer)

    def _is_running(self, index: int) -> bool:
        vcpu = self.vcpus[index]
        return self.scheduler.pcpus[vcpu.pcpu].running is vcpu

    # Event handlers.

    def on_timer(self, event: Event) -> None:
        index = event.target
        self.timers[index] = None
        if not self._is_running(index):
            logger.debug("Stale workload timer for %s at %d.", self.vms[index].name, event.at)
            return
        self._apply(index, self.workloads[index].step(event.at), event.at, dispatching=False)

    def on_yield(self, event: Event) -> None:
        index = event.target
        self.timers[index] = None
        action = self.pending[index]
        if action is None or not self._is_running(index):
            return
        self._sleep(index, action, event.at)

    def on_wake(self, event: Event) -> None:
        self.scheduler.on_wake(self.vcpus[event.target], event.at)
