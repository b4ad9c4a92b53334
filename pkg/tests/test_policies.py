import numpy as np
import pytest
from scheduler.policies import (
    BernoulliPolicy,
    ChargePolicy,
    CreditPolicy,
    ExactPolicy,
    PoissonPolicy,
    UniformPolicy,
)
from scheduler.settings import Variant
from simcore.engine import EventKind


def test_every_variant_has_a_policy():
    assert {policy.variant for policy in ChargePolicy.all()} == set(Variant)


@pytest.mark.parametrize(
    "variant, expected",
    [
        ("credit", CreditPolicy),
        ("exact", ExactPolicy),
        ("poisson", PoissonPolicy),
        ("bernoulli", BernoulliPolicy),
        ("uniform", UniformPolicy),
    ],
)
def test_policy_is_chosen_by_variant(bare_scheduler, variant, expected):
    assert type(bare_scheduler([["a"]], variant=variant).policy) is expected


def test_poisson_debit_is_rate_matched(bare_scheduler):
    assert bare_scheduler([["a"]], variant="poisson").policy.debit == 95
    unmatched = bare_scheduler([["a"]], variant="poisson", poisson_rate_matched=False)
    assert unmatched.policy.debit == 100

def _run_in_windows(scheduler, windows: int, active_from: int, active_to: int) -> None:
    """VM a runs [active_from, active_to) of every 10 ms window; the PCPU idles otherwise."""
    a = scheduler.vcpus[0]
    for window in range(windows):
        start = window * 10_000
        scheduler.sim.run_until(start + active_from)
        scheduler.on_wake(a, start + active_from)
        scheduler.sim.run_until(start + active_to)
        scheduler.on_block(a, start + active_to)
    scheduler.sim.run_until(windows * 10_000)
    scheduler.checkpoint(windows * 10_000)


@pytest.mark.parametrize("variant", ["credit", "uniform"])
def test_sampled_variants_miss_a_vcpu_that_avoids_the_sample(bare_scheduler, monkeypatch, variant):
    monkeypatch.setattr(UniformPolicy, "draw_offset", lambda self, pcpu: 5_000)
    scheduler = bare_scheduler([["a", "b"]], variant=variant)
    _run_in_windows(scheduler, 10, 1_000, 4_000)
    ledger = scheduler.ledger
    assert ledger.scheduled[0] == 30_000
    assert ledger.idle == [70_000]
    assert ledger.charged == [0, 0]
    assert ledger.samples == ledger.idle_samples == 10


def test_uniform_charges_the_vcpu_running_at_the_offset(bare_scheduler, monkeypatch):
    monkeypatch.setattr(UniformPolicy, "draw_offset", lambda self, pcpu: 2_000)
    scheduler = bare_scheduler([["a", "b"]], variant="uniform")
    _run_in_windows(scheduler, 10, 1_000, 4_000)
    assert scheduler.ledger.charged == [1_000, 0]
    assert scheduler.ledger.debits == [10, 0]
    assert scheduler.ledger.idle_samples == 0


@pytest.mark.parametrize("offset", range(0, 10_000, 1_000))
def test_uniform_sample_charges_the_vcpu_running_just_after_it(bare_scheduler, monkeypatch, offset):
    # a wakes on every window boundary and blocks 9 ms later, so only the last slot is idle.
    monkeypatch.setattr(UniformPolicy, "draw_offset", lambda self, pcpu: offset)
    scheduler = bare_scheduler([["a", "b"]], variant="uniform")
    _run_in_windows(scheduler, 10, 0, 9_000)
    ledger = scheduler.ledger
    assert ledger.samples == 10
    if offset < 9_000:
        assert ledger.debits[0] == 10
        assert ledger.idle_samples == 0
    else:
        assert ledger.debits[0] == 0
        assert ledger.idle_samples == 10


def test_uniform_charges_nine_of_ten_offsets_for_a_nine_ms_run(bare_scheduler, monkeypatch):
    charged_offsets = []
    for offset in range(0, 10_000, 1_000):
        monkeypatch.setattr(UniformPolicy, "draw_offset", lambda self, pcpu, offset=offset: offset)
        scheduler = bare_scheduler([["a", "b"]], variant="uniform")
        _run_in_windows(scheduler, 1, 0, 9_000)
        if scheduler.ledger.debits[0]:
            charged_offsets.append(offset)
    assert charged_offsets == list(range(0, 9_000, 1_000))


def test_exact_charges_measured_time(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], variant="exact")
    _run_in_windows(scheduler, 10, 1_000, 4_050)
    a = scheduler.vcpus[0]
    assert scheduler.ledger.scheduled[a.id] == 30_500
    assert scheduler.ledger.charged[a.id] * 100 + a.remainder == 30_500
    assert a.remainder < 100



def test_exact_keeps_remainder_across_runs(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], variant="exact")
    a = scheduler.vcpus[0]
    scheduler.on_wake(a, 0)
    scheduler.sim.run_until(25_050)
    scheduler.on_block(a, 25_050)
    assert scheduler.ledger.charged[a.id] == 250
    assert a.remainder == 50


def test_bernoulli_first_sample_respects_phase(bare_scheduler, monkeypatch):
    monkeypatch.setattr(BernoulliPolicy, "next_interval", lambda self, pcpu: 3 * 1_000)
    scheduler = bare_scheduler([["a"]], variant="bernoulli", slot_phase=250)
    policy = scheduler.policy
    assert policy.phases == [250]
    assert policy.first_sample_at(scheduler.pcpus[0], 0) == 250 + 2 * 1_000

    zero = bare_scheduler([["a"]], variant="bernoulli", slot_phase=0).policy
    assert zero.first_sample_at(scheduler.pcpus[0], 0) == 3_000

def test_bernoulli_samples_land_on_slot_boundaries(bare_scheduler):
    scheduler = bare_scheduler([["a"], ["b"]], variant="bernoulli")
    phases = scheduler.policy.phases
    assert all(0 <= phase < 1_000 for phase in phases)
    times = []
    on_sample = scheduler.policy.on_sample

    def recording(event):
        times.append((event.target, event.at))
        on_sample(event)

    scheduler.sim.on(EventKind.SAMPLE_ARRIVAL, recording)
    scheduler.sim.run_until(200_000)
    assert {pcpu for pcpu, _ in times} == {0, 1}
    for pcpu, at in times:
        assert (at - phases[pcpu]) % 1_000 == 0



@pytest.mark.parametrize("variant", ["poisson", "bernoulli", "uniform"])
def test_sampled_charge_rate_matches_run_time(bare_scheduler, variant):
    scheduler = bare_scheduler([["a", "b"]], variant=variant)
    a = scheduler.vcpus[0]
    scheduler.on_wake(a, 0)
    scheduler.sim.run_until(60_000_000)
    charged = scheduler.ledger.charged[a.id]
    # One credit per 100 µs on average.
    assert charged == pytest.approx(600_000, rel=0.05)


def test_exact_carries_remainder_into_the_next_run(bare_scheduler):
    scheduler = bare_scheduler([["a", "b"]], variant="exact")
    a = scheduler.vcpus[0]
    scheduler.on_wake(a, 0)
    scheduler.on_block(a, 9_050)
    assert scheduler.ledger.charged[a.id] == 90
    assert a.remainder == 50
    scheduler.sim.run_until(12_000)
    scheduler.on_wake(a, 12_000)
    scheduler.on_block(a, 12_150)
    assert scheduler.ledger.charged[a.id] == 92
    assert a.remainder == 0


def _random_spans(seed: int, horizon: int = 100_000, grid: int = 500) -> list[tuple[int, int]]:
    """Disjoint run spans on a coarse grid, so some edges land exactly on sample instants."""
    rng = np.random.default_rng(seed)
    spans, at = [], 0
    while True:
        start = at + int(rng.integers(0, 8)) * grid
        end = min(start + int(rng.integers(1, 12)) * grid, horizon)
        if start >= horizon:
            return spans
        spans.append((start, end))
        at = end


def _drive(scheduler, spans: list[tuple[int, int]], horizon: int = 100_000) -> None:
    a = scheduler.vcpus[0]
    for start, end in spans:
        scheduler.sim.run_until(start)
        scheduler.on_wake(a, start)
        scheduler.sim.run_until(end)
        scheduler.on_block(a, end)
    scheduler.sim.run_until(horizon)
    scheduler.checkpoint(horizon)


def _runs_at(spans: list[tuple[int, int]], instant: int) -> bool:
    return any(start <= instant < end for start, end in spans)


@pytest.mark.parametrize("seed", range(6))
def test_credit_ticks_match_a_slot_walk(bare_scheduler, seed):
    spans = _random_spans(seed)
    scheduler = bare_scheduler([["a", "b"]], variant="credit")
    _drive(scheduler, spans)
    # A tick charges whoever ran up to it; a VCPU waking on the tick is not charged.
    hits = sum(_runs_at(spans, tick - 1) for tick in range(10_000, 100_001, 10_000))
    ledger = scheduler.ledger
    assert ledger.samples == 10
    assert ledger.debits == [hits, 0]
    assert ledger.charged == [100 * hits, 0]
    assert ledger.idle_samples == 10 - hits
    assert ledger.scheduled[0] == sum(end - start for start, end in spans)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("offset", [0, 2_500, 5_000, 9_500])
def test_uniform_samples_match_a_slot_walk(bare_scheduler, monkeypatch, seed, offset):
    monkeypatch.setattr(UniformPolicy, "draw_offset", lambda self, pcpu: offset)
    spans = _random_spans(seed)
    scheduler = bare_scheduler([["a", "b"]], variant="uniform")
    _drive(scheduler, spans)
    hits = sum(_runs_at(spans, start + offset) for start in range(0, 100_000, 10_000))
    ledger = scheduler.ledger
    assert ledger.samples == 10
    assert ledger.debits == [hits, 0]
    assert ledger.charged == [100 * hits, 0]
    assert ledger.idle_samples == 10 - hits


@pytest.mark.parametrize("seed", range(6))
def test_exact_charges_match_a_slot_walk(bare_scheduler, seed):
    spans = _random_spans(seed, grid=130)
    scheduler = bare_scheduler([["a", "b"]], variant="exact")
    _drive(scheduler, spans)
    ran = sum(end - start for start, end in spans)
    a = scheduler.vcpus[0]
    assert scheduler.ledger.charged == [ran // 100, 0]
    assert a.remainder == ran % 100
