"""Credit scheduler: per-PCPU run queues of single-VCPU VMs, credit refill every
reschedule tick, BOOST on wake and the WC/NWC dispatch rules."""

import math
from fractions import Fraction
from typing import Callable

from logger import Logger
from metrics.ledger import UsageLedger
from scheduler.policies import ChargePolicy, UniformPolicy
from scheduler.settings import Mode, SchedulerConfig
from scheduler.vcpu import Pcpu, Priority, RunQueue, VCpu
from simcore.engine import Event, EventKind, Simulator

logger = Logger(__name__)

SwitchListener = Callable[[Pcpu, VCpu | None, VCpu | None, int], None]


class CreditScheduler:
    """Arguments:
    config (SchedulerConfig): Scheduler parameters, including the charging variant.
    sim (Simulator): Simulation the scheduler arms its ticks on.
    ledger (UsageLedger): Receives run spans, idle spans and charges.
    pcpus (int): Number of PCPUs.
    """

    def __init__(self, config: SchedulerConfig, sim: Simulator, ledger: UsageLedger, pcpus: int):
        if pcpus < 1:
            raise ValueError(f"At least one PCPU is needed, got {pcpus}.")
        self.config = config
        self.sim = sim
        self.ledger = ledger
        self.pcpus = [Pcpu(i, RunQueue(i)) for i in range(pcpus)]
        self.vcpus: list[VCpu] = []
        self.caps: list[float | None] = []
        self.listener: SwitchListener | None = None
        self.origin = 0
        self.started = False
        self.policy = ChargePolicy.create(self)

    def add_vcpu(self, name: str, pcpu: int, cap: float | None = None) -> VCpu:
        if self.started:
            raise ValueError("VCPUs must be added before the scheduler starts.")
        if not 0 <= pcpu < len(self.pcpus):
            raise ValueError(f"{name}: PCPU {pcpu} does not exist.")
        vcpu = VCpu(id=len(self.vcpus), name=name, pcpu=pcpu)
        self.vcpus.append(vcpu)
        self.caps.append(cap)
        self.pcpus[pcpu].vcpus.append(vcpu)
        return vcpu

    def start(self, now: int = 0) -> None:
        """Compute entitlements, hand out the first period's credits and arm the ticks."""
        for vcpu, cap in zip(self.vcpus, self.caps):
            if self.config.mode is Mode.NWC:
                vcpu.share = Fraction(str(cap if cap is not None else self.config.cap)) / 100
            else:
                vcpu.share = Fraction(1, len(self.pcpus[vcpu.pcpu].vcpus))
            vcpu.refill = math.floor(self.config.period_credits * vcpu.share + Fraction(1, 2))
            vcpu.credits = min(vcpu.refill, self.config.max_credits)
        for pcpu in self.pcpus:
            pcpu.since = pcpu.charge_mark = now

        self.origin = now
        self.started = True
        self.sim.on(EventKind.DEBIT_TICK, self.on_debit_tick)
        self.sim.on(EventKind.RESCHEDULE_TICK, self.on_reschedule_tick)
        self.sim.schedule(now + self.config.fast_tick, EventKind.DEBIT_TICK)
        self.policy.start(now)
        logger.debug(
            "Scheduler %s/%s started with %d VCPUs on %d PCPUs.",
            self.config.variant.value, self.config.mode.value, len(self.vcpus), len(self.pcpus),
        )

    # Events.

    def on_debit_tick(self, event: Event) -> None:
        now = event.at
        following = now + self.config.fast_tick
        self.sim.schedule(following, EventKind.DEBIT_TICK)
        if (following - self.origin) % self.config.reschedule_tick == 0:
            self.sim.schedule(following, EventKind.RESCHEDULE_TICK)
        for pcpu in self.pcpus:
            self.policy.on_tick(pcpu, now)

    def on_reschedule_tick(self, event: Event) -> None:
        self.refill_credits(event.at)

    # Charging.

    def charge_sample(self, pcpu: Pcpu, credits: int) -> None:
        """Debit the VCPU running on pcpu, if any, for one sample."""
        vcpu = pcpu.running
        self.ledger.add_sample(vcpu.id if vcpu is not None else None)
        if vcpu is not None:
            self._charge(vcpu, credits)

    def _charge(self, vcpu: VCpu, credits: int) -> None:
        vcpu.credits -= credits
        self.ledger.add_charge(vcpu.id, credits)
        # Charged VCPUs leave BOOST. The running VCPU is not queued, so no requeue.
        vcpu.prio = vcpu.credit_priority()

    def debit_sample(self, pcpu: Pcpu, now: int) -> None:
        self.charge_sample(pcpu, self.policy.debit)
        self.preempt_check(pcpu, now)

    def charge_exact(self, pcpu: Pcpu, now: int) -> None:
        vcpu = pcpu.running
        if vcpu is not None:
            elapsed = now - pcpu.charge_mark + vcpu.remainder
            credits, vcpu.remainder = divmod(elapsed, self.config.quantum)
            if credits:
                self._charge(vcpu, credits)
        pcpu.charge_mark = now

    def uniform_check(self, pcpu: Pcpu, now: int) -> None:
        if isinstance(self.policy, UniformPolicy):
            self.policy.check(pcpu, now)

    def refill_credits(self, now: int) -> None:
        """Hand out one period of credits, then rotate every PCPU round-robin."""
        for pcpu in self.pcpus:
            self.policy.account(pcpu, now)
            for vcpu in pcpu.vcpus:
                vcpu.credits = min(vcpu.credits + vcpu.refill, self.config.max_credits)
                if vcpu.prio in (Priority.UNDER, Priority.OVER):
                    vcpu.prio = vcpu.credit_priority()
            pcpu.queue.rebanded()
            self._reschedule(pcpu, now)

    # Dispatching.

    def pick_next(self, pcpu: Pcpu, now: int) -> VCpu | None:
        head = pcpu.queue.head()
        if head is None:
            return None
        if self.config.mode is Mode.NWC and head.prio is Priority.OVER:
            return None
        return head

    def preempt_check(self, pcpu: Pcpu, now: int) -> None:
        running = pcpu.running
        if running is None:
            return
        if self.config.mode is Mode.NWC and running.prio is Priority.OVER:
            self._reschedule(pcpu, now)
            return
        head = pcpu.queue.head()
        if head is not None and head.prio < running.prio:
            self._reschedule(pcpu, now)

    def _reschedule(self, pcpu: Pcpu, now: int) -> None:
        """Put the running VCPU, if still runnable, back at the tail of its band and
        dispatch the best candidate."""
        self.policy.account(pcpu, now)
        previous = pcpu.running
        if previous is not None and previous.runnable:
            pcpu.queue.insert(previous)
        chosen = self.pick_next(pcpu, now)
        if chosen is not None:
            pcpu.queue.remove(chosen)
        if chosen is previous:
            return
        self._switch(pcpu, previous, chosen, now)

    def _switch(self, pcpu: Pcpu, previous: VCpu | None, chosen: VCpu | None, now: int) -> None:
        self.ledger.add_run(pcpu.id, previous.id if previous is not None else None, pcpu.since, now)
        pcpu.running = chosen
        pcpu.since = now
        pcpu.charge_mark = now
        if chosen is not None:
            chosen.last_dispatch_at = now
        if self.listener is not None:
            self.listener(pcpu, previous, chosen, now)

    def on_wake(self, vcpu: VCpu, now: int) -> bool:
        """Make vcpu runnable. Returns True if it entered BOOST."""
        if vcpu.runnable:
            logger.debug("Spurious wake of %s at %d.", vcpu.name, now)
            return False
        pcpu = self.pcpus[vcpu.pcpu]
        self.policy.account(pcpu, now)
        if vcpu.credits > 0:
            vcpu.prio = Priority.BOOST if self.config.boost else Priority.UNDER
        else:
            vcpu.prio = Priority.OVER
        boosted = vcpu.prio is Priority.BOOST
        if boosted:
            self.ledger.add_boost_wake(vcpu.id)
        pcpu.queue.insert(vcpu)
        running = pcpu.running
        if running is None or vcpu.prio < running.prio:
            self._reschedule(pcpu, now)
        return boosted

    def on_block(self, vcpu: VCpu, now: int) -> None:
        if not vcpu.runnable:
            raise self.sim.fail(f"{vcpu.name} blocked at t={now} while already BLOCKED.")
        pcpu = self.pcpus[vcpu.pcpu]
        self.policy.account(pcpu, now)
        if pcpu.running is vcpu:
            vcpu.prio = Priority.BLOCKED
            self._reschedule(pcpu, now)
        else:
            pcpu.queue.remove(vcpu)
            vcpu.prio = Priority.BLOCKED

    def on_yield(self, vcpu: VCpu, now: int) -> None:
        pcpu = self.pcpus[vcpu.pcpu]
        if pcpu.running is not vcpu:
            return
        self.policy.account(pcpu, now)
        self._reschedule(pcpu, now)

    def checkpoint(self, now: int) -> None:
        """Bring every charge and span up to `now` without changing the schedule."""
        for pcpu in self.pcpus:
            self.policy.account(pcpu, now)
            running = pcpu.running
            self.ledger.add_run(pcpu.id, running.id if running is not None else None, pcpu.since, now)
            pcpu.since = now
