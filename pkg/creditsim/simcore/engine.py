"""Discrete-event core: a virtual clock in integer microseconds and a queue of events
ordered by (time, insertion sequence)."""

import hashlib
import heapq
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from config import EVENT_LOG_TAIL
from simcore.rng import Rng


class EventKind(str, Enum):
    DEBIT_TICK = "debit-tick"
    RESCHEDULE_TICK = "reschedule-tick"
    SAMPLE_ARRIVAL = "sample-arrival"
    UNIFORM_WINDOW_START = "uniform-window-start"
    VCPU_WAKE = "vcpu-wake"
    VCPU_YIELD = "vcpu-yield"
    WORKLOAD_TIMER = "workload-timer"


@dataclass(order=True, slots=True)
class Event:
    at: int
    seq: int
    kind: EventKind = field(compare=False)
    target: int | None = field(default=None, compare=False)
    cancelled: bool = field(default=False, compare=False)

    def describe(self) -> str:
        target = "-" if self.target is None else self.target
        return f"t={self.at} seq={self.seq} {self.kind.value} target={target}"


class SimulationError(RuntimeError):
    """A logic error detected while simulating.

    Arguments:
        message (str): What went wrong.
        events (list[str] | None): The most recently dispatched events, oldest first.
    """

    def __init__(self, message: str, events: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.events = list(events or [])
        self.context: dict[str, str] = {}

    def __str__(self) -> str:
        lines = [self.message]
        if self.context:
            lines.append(", ".join(f"{key}={value}" for key, value in self.context.items()))
        if self.events:
            lines.append("last events:")
            lines.extend(f"  {event}" for event in self.events)
        return "\n".join(lines)


class EventQueue:
    """Min-heap of events. Events at the same instant come out in the order they were
    scheduled."""

    def __init__(self):
        self._heap: list[Event] = []
        self._seq = itertools.count()
        self.now = 0

    def schedule(self, at: int, kind: EventKind, target: int | None = None) -> Event:
        if at < self.now:
            raise SimulationError(
                f"Cannot schedule {kind.value} at t={at}, the clock is already at t={self.now}."
            )
        event = Event(at, next(self._seq), kind, target)
        heapq.heappush(self._heap, event)
        return event

    def _drop_cancelled(self) -> None:
        while self._heap and self._heap[0].cancelled:
            heapq.heappop(self._heap)

    def peek_time(self) -> int | None:
        self._drop_cancelled()
        return self._heap[0].at if self._heap else None

    def pop(self) -> Event | None:
        self._drop_cancelled()
        if not self._heap:
            return None
        return heapq.heappop(self._heap)

    def __len__(self) -> int:
        return sum(1 for event in self._heap if not event.cancelled)


Handler = Callable[[Event], None]


class Simulator:
    """Owns the clock, the event queue and the root random stream of one replica.

    Handlers are registered per event kind with `on`. Every dispatched event is folded
    into a SHA-256 trace digest, which two runs with the same seed must reproduce.

    Arguments:
        seed (int): Scenario seed.
        replica (int): Replica index, mixed into the random stream.
    """

    def __init__(self, seed: int = 0, replica: int = 0):
        self.queue = EventQueue()
        self.rng = Rng(seed, replica)
        self.handlers: dict[EventKind, Handler] = {}
        self.counts: Counter[EventKind] = Counter()
        self.log: deque[str] = deque(maxlen=EVENT_LOG_TAIL)
        self._digest = hashlib.sha256()

    @property
    def now(self) -> int:
        return self.queue.now

    def on(self, kind: EventKind, handler: Handler) -> None:
        self.handlers[kind] = handler

    def schedule(self, at: int, kind: EventKind, target: int | None = None) -> Event:
        try:
            return self.queue.schedule(at, kind, target)
        except SimulationError as e:
            e.events = list(self.log)
            raise

    def cancel(self, event: Event | None) -> None:
        if event is not None:
            event.cancelled = True

    def fail(self, message: str) -> SimulationError:
        """Build a SimulationError carrying the recent event log."""
        return SimulationError(message, list(self.log))

    def run_until(self, t_end: int) -> None:
        """Dispatch every event with time <= t_end in (time, sequence) order, then leave
        the clock at t_end."""
        if t_end < self.now:
            raise self.fail(f"Cannot run until t={t_end}, the clock is already at t={self.now}.")

        queue = self.queue
        while True:
            at = queue.peek_time()
            if at is None or at > t_end:
                break
            event = queue.pop()
            queue.now = event.at
            description = event.describe()
            self.log.append(description)
            self._digest.update(description.encode())
            self.counts[event.kind] += 1

            handler = self.handlers.get(event.kind)
            if handler is None:
                raise self.fail(f"No handler registered for {event.kind.value}.")
            try:
                handler(event)
            except SimulationError as e:
                if not e.events:
                    e.events = list(self.log)
                raise
        queue.now = t_end

    def trace_digest(self) -> str:
        return self._digest.hexdigest()
