import pytest
from scheduler.credit import CreditScheduler
from scheduler.vcpu import Priority
from simcore.engine import SimulationError


def test_initial_credits_follow_entitlement(bare_scheduler):
    wc = bare_scheduler([["a", "b"]])
    assert [vcpu.refill for vcpu in wc.vcpus] == [150, 150]
    assert [vcpu.credits for vcpu in wc.vcpus] == [150, 150]

    nwc = bare_scheduler([["a"]], mode="nwc", cap=33)
    assert nwc.vcpus[0].refill == 99


def test_refill_rounds_half_up(bare_scheduler):
    scheduler = bare_scheduler([["a", "b", "c", "d", "e", "f", "g", "h"]])
    # 300 / 8 = 37.5
    assert scheduler.vcpus[0].refill == 38


def test_wake_boosts_and_dispatches_on_idle_pcpu(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a = scheduler.vcpus[0]
    assert scheduler.on_wake(a, 0) is True
    assert a.prio is Priority.BOOST
    assert scheduler.pcpus[0].running is a
    assert scheduler.ledger.boost_wakes[a.id] == 1
    assert scheduler.on_wake(a, 0) is False


def test_wake_without_credit_or_boost(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], boost=False)
    a, b = scheduler.vcpus
    assert scheduler.on_wake(a, 0) is False
    assert a.prio is Priority.UNDER

    b.credits = 0
    scheduler.on_wake(b, 0)
    assert b.prio is Priority.OVER
    assert scheduler.pcpus[0].running is a


def test_boosted_wake_preempts_charged_vcpu(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.sim.run_until(10_000)
    assert a.prio is Priority.UNDER
    assert a.credits == 50

    scheduler.on_wake(b, 12_000)
    pcpu = scheduler.pcpus[0]
    assert pcpu.running is b
    assert list(pcpu.queue) == [a]


def test_equal_priority_wake_does_not_preempt(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    assert scheduler.pcpus[0].running is a
    assert b in scheduler.pcpus[0].queue


def test_running_vcpu_is_never_queued(bare_scheduler):
    scheduler = bare_scheduler([["a", "b", "c"]])
    for vcpu in scheduler.vcpus:
        scheduler.on_wake(vcpu, 0)
    scheduler.sim.run_until(200_000)
    pcpu = scheduler.pcpus[0]
    assert pcpu.running is not None
    assert pcpu.running not in pcpu.queue
    assert pcpu.queue.is_ordered()


def test_block_dispatches_next_and_double_block_fails(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    scheduler.on_block(a, 3_000)
    assert a.prio is Priority.BLOCKED
    assert scheduler.pcpus[0].running is b
    with pytest.raises(SimulationError, match="already BLOCKED"):
        scheduler.on_block(a, 4_000)


def test_block_of_queued_vcpu_leaves_running_alone(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    scheduler.on_block(b, 1_000)
    assert scheduler.pcpus[0].running is a
    assert len(scheduler.pcpus[0].queue) == 0


def test_credit_tick_charges_running_vcpu(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a = scheduler.vcpus[0]
    scheduler.on_wake(a, 0)
    scheduler.sim.run_until(30_000)
    scheduler.checkpoint(30_000)
    ledger = scheduler.ledger
    assert ledger.charged[a.id] == 300
    assert ledger.debits[a.id] == 3
    # 150 - 300 + 150 at the refill
    assert a.credits == 0
    assert a.prio is Priority.OVER
    assert ledger.scheduled[a.id] == 30_000


def test_refill_clamps_and_rebands(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], boost=False)
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    a.credits = 290
    b.credits = -100
    b.prio = Priority.OVER
    scheduler.pcpus[0].queue.rebanded()
    scheduler.refill_credits(30_000)
    assert a.credits == 300
    assert b.credits == 50
    assert b.prio is Priority.UNDER


def test_refill_rotates_equal_priorities(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], boost=False)
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    scheduler.refill_credits(30_000)
    pcpu = scheduler.pcpus[0]
    assert pcpu.running is b
    assert list(pcpu.queue) == [a]


def test_nwc_idles_when_only_over_vcpus_remain(bare_scheduler):
    scheduler = bare_scheduler([["a"]], mode="nwc", cap=50)
    a = scheduler.vcpus[0]
    scheduler.on_wake(a, 0)
    scheduler.sim.run_until(20_000)
    # 150 credits, two debits of 100
    assert a.prio is Priority.OVER
    assert scheduler.pcpus[0].running is None
    assert a in scheduler.pcpus[0].queue

    scheduler.sim.run_until(30_000)
    assert a.credits == 100
    assert scheduler.pcpus[0].running is a


def test_wc_keeps_running_over_vcpu(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a = scheduler.vcpus[0]
    scheduler.on_wake(a, 0)
    scheduler.sim.run_until(20_000)
    assert a.prio is Priority.OVER
    assert scheduler.pcpus[0].running is a


def test_yield_requeues_behind_same_band(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], boost=False)
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    scheduler.on_yield(a, 500)
    assert scheduler.pcpus[0].running is b
    scheduler.on_yield(a, 600)
    assert scheduler.pcpus[0].running is b


def test_pcpus_are_independent(bare_scheduler):
    scheduler = bare_scheduler([["a"], ["b"]])
    a, b = scheduler.vcpus
    scheduler.on_wake(a, 0)
    scheduler.on_wake(b, 0)
    assert scheduler.pcpus[0].running is a
    assert scheduler.pcpus[1].running is b
    assert a.refill == b.refill == 300


def test_vcpus_are_added_before_start(bare_scheduler):
    scheduler = bare_scheduler([["a"]])
    with pytest.raises(ValueError):
        scheduler.add_vcpu("late", 0)
    assert isinstance(scheduler, CreditScheduler)


def test_switch_listener_sees_every_switch(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]])
    a, b = scheduler.vcpus
    switches = []
    scheduler.listener = lambda pcpu, old, new, now: switches.append(
        (old.name if old else None, new.name if new else None, now)
    )
    scheduler.on_wake(a, 0)
    scheduler.on_block(a, 5_000)
    assert switches == [(None, "a", 0), ("a", None, 5_000)]
