"""How each scheduler variant measures CPU usage.

Every variant shares the credit machinery in `scheduler.credit`; a policy only decides
when the running VCPU is charged and how much. Policies register themselves by
subclassing `ChargePolicy` and setting `variant`.
"""

from typing import TYPE_CHECKING, ClassVar, NamedTuple

from scheduler.settings import Variant
from scheduler.vcpu import Pcpu
from simcore.engine import Event, EventKind
from simcore.rng import sample_geometric_slots, sample_trunc_exp, truncated_exp_mean

if TYPE_CHECKING:
    from scheduler.credit import CreditScheduler


class ChargePolicy:
    variant: ClassVar[Variant]

    def __init__(self, scheduler: "CreditScheduler"):
        self.scheduler = scheduler
        self.config = scheduler.config
        self.debit = self.config.debit

    @classmethod
    def all(cls) -> list[type["ChargePolicy"]]:
        found = []
        for subclass in cls.__subclasses__():
            if "variant" in subclass.__dict__:
                found.append(subclass)
            found.extend(subclass.all())
        return found

    @classmethod
    def create(cls, scheduler: "CreditScheduler") -> "ChargePolicy":
        for policy in cls.all():
            if policy.variant is scheduler.config.variant:
                return policy(scheduler)
        raise ValueError(f"No charge policy for variant {scheduler.config.variant}.")

    def start(self, now: int) -> None:
        """Arm the policy's own events."""

    def account(self, pcpu: Pcpu, now: int) -> None:
        """Bring the charges of pcpu up to date; runs before every scheduling decision."""

    def on_tick(self, pcpu: Pcpu, now: int) -> None:
        self.scheduler.preempt_check(pcpu, now)


class CreditPolicy(ChargePolicy):
    """Unmodified scheduler: the VCPU running at the fast tick pays for the whole tick."""

    variant = Variant.CREDIT

    def on_tick(self, pcpu: Pcpu, now: int) -> None:
        self.scheduler.debit_sample(pcpu, now)


class ExactPolicy(ChargePolicy):
    """Charges measured run time at every dispatch boundary."""

    variant = Variant.EXACT

    def account(self, pcpu: Pcpu, now: int) -> None:
        self.scheduler.charge_exact(pcpu, now)

    def on_tick(self, pcpu: Pcpu, now: int) -> None:
        self.scheduler.charge_exact(pcpu, now)
        self.scheduler.preempt_check(pcpu, now)


class SamplingPolicy(ChargePolicy):
    """Random sample instants drawn per PCPU on their own event."""

    def __init__(self, scheduler: "CreditScheduler"):
        super().__init__(scheduler)
        self.rngs = [scheduler.sim.rng.child(1, pcpu.id) for pcpu in scheduler.pcpus]

    def start(self, now: int) -> None:
        self.scheduler.sim.on(EventKind.SAMPLE_ARRIVAL, self.on_sample)
        for pcpu in self.scheduler.pcpus:
            self.scheduler.sim.schedule(self.first_sample_at(pcpu, now), EventKind.SAMPLE_ARRIVAL, pcpu.id)

    def first_sample_at(self, pcpu: Pcpu, now: int) -> int:
        return now + self.next_interval(pcpu)

    def next_interval(self, pcpu: Pcpu) -> int:
        raise NotImplementedError

    def on_sample(self, event: Event) -> None:
        pcpu = self.scheduler.pcpus[event.target]
        self.scheduler.debit_sample(pcpu, event.at)
        self.scheduler.sim.schedule(event.at + self.next_interval(pcpu), EventKind.SAMPLE_ARRIVAL, pcpu.id)


class PoissonPolicy(SamplingPolicy):
    """Exponential inter-sample times, truncated at poisson_max.

    With rate matching the debit per sample is scaled by the truncated mean, so the
    expected charge is one credit per quantum of run time.
    """

    variant = Variant.POISSON

    def __init__(self, scheduler: "CreditScheduler"):
        super().__init__(scheduler)
        if self.config.poisson_rate_matched:
            mean = truncated_exp_mean(self.config.poisson_mean, self.config.poisson_max)
            self.debit = int(round(self.config.debit * mean / self.config.fast_tick))

    def next_interval(self, pcpu: Pcpu) -> int:
        return sample_trunc_exp(self.rngs[pcpu.id], self.config.poisson_mean, self.config.poisson_max)


class BernoulliPolicy(SamplingPolicy):
    """Each slot boundary is a sample with probability p; the gap is drawn geometrically."""

    variant = Variant.BERNOULLI

    def __init__(self, scheduler: "CreditScheduler"):
        super().__init__(scheduler)
        slot = self.config.bernoulli_slot
        self.phases = [
            self.config.slot_phase if self.config.slot_phase is not None else rng.integer(0, slot)
            for rng in self.rngs
        ]

    def first_sample_at(self, pcpu: Pcpu, now: int) -> int:
        slot = self.config.bernoulli_slot
        first_boundary = now + (self.phases[pcpu.id] or slot)
        return first_boundary + self.next_interval(pcpu) - slot

    def next_interval(self, pcpu: Pcpu) -> int:
        slots = sample_geometric_slots(self.rngs[pcpu.id], self.config.bernoulli_p)
        return slots * self.config.bernoulli_slot


class Window(NamedTuple):
    start: int
    offset: int
    charged: bool


class UniformPolicy(ChargePolicy):
    """One sample per fast-tick window at a uniformly drawn, quantized offset.

    A sample at instant x charges the VCPU that runs during [x, x + 1µs). It is
    evaluated lazily: the first accounting point strictly after x charges the VCPU
    still running, which has held the PCPU since the previous accounting point at or
    before x. A VCPU that blocks exactly at x is not charged; one dispatched at x is,
    whatever the order of the events at x.
    """

    variant = Variant.UNIFORM

    def __init__(self, scheduler: "CreditScheduler"):
        super().__init__(scheduler)
        self.rngs = [scheduler.sim.rng.child(1, pcpu.id) for pcpu in scheduler.pcpus]
        self.windows: list[Window] = []
        self.slots = self.config.fast_tick // self.config.uniform_quantum

    def draw_offset(self, pcpu: Pcpu) -> int:
        return self.rngs[pcpu.id].integer(0, self.slots) * self.config.uniform_quantum

    def start(self, now: int) -> None:
        self.windows = [Window(now, self.draw_offset(pcpu), False) for pcpu in self.scheduler.pcpus]
        self.scheduler.sim.on(EventKind.UNIFORM_WINDOW_START, self.on_window_start)
        self.scheduler.sim.schedule(now + self.config.fast_tick, EventKind.UNIFORM_WINDOW_START)

    def account(self, pcpu: Pcpu, now: int) -> None:
        self.scheduler.uniform_check(pcpu, now)

    def check(self, pcpu: Pcpu, now: int) -> bool:
        """Charge the running VCPU once the window's sample instant has passed."""
        window = self.windows[pcpu.id]
        if window.charged or now <= window.start + window.offset:
            return False
        self.windows[pcpu.id] = window._replace(charged=True)
        self.scheduler.charge_sample(pcpu, self.debit)
        return True

    def on_window_start(self, event: Event) -> None:
        now = event.at
        self.scheduler.sim.schedule(now + self.config.fast_tick, EventKind.UNIFORM_WINDOW_START)
        for pcpu in self.scheduler.pcpus:
            charged = self.check(pcpu, now)
            self.windows[pcpu.id] = Window(now, self.draw_offset(pcpu), False)
            if charged:
                self.scheduler.preempt_check(pcpu, now)
