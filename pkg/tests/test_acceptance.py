"""End-to-end runs of the presets at reduced horizons. Run with `pytest -m slow`."""

import statistics

import pytest
from harness.report import render
from harness.runner import run_scenario
from harness.scenario import set_param

pytestmark = pytest.mark.slow

DEFENSES = ["exact", "uniform", "poisson", "bernoulli"]


def shorten(scenario, horizon: str = "5s", replicas: int = 2, **updates):
    return scenario.with_updates(horizon=horizon, replicas=replicas, **updates)


def attacker_share(report, scheduler: str = "credit") -> float:
    return report.scheduler(scheduler).vm("attacker").share.mean


def test_ideal_attacker_takes_nearly_a_whole_pcpu(preset):
    scenario = shorten(preset("fig5"))
    report = run_scenario(set_param(scenario, "vm.attacker.spin", "9.8ms"))
    assert attacker_share(report) >= 0.96


def test_attack_collapses_once_the_spin_crosses_the_tick(preset):
    scenario = shorten(preset("fig5"))
    peak = attacker_share(run_scenario(set_param(scenario, "vm.attacker.spin", "9.8ms")))
    collapsed = attacker_share(run_scenario(set_param(scenario, "vm.attacker.spin", "10ms")))
    assert collapsed < 0.40
    assert collapsed < peak / 2


def test_share_does_not_depend_on_victim_count(preset):
    scenario = shorten(preset("fig3"))
    shares = [attacker_share(run_scenario(set_param(scenario, "hogs", hogs))) for hogs in range(1, 6)]
    assert all(0.87 <= share <= 0.93 for share in shares)
    assert max(shares) - min(shares) <= 0.03


def test_kernel_attacker_holds_its_share_as_victims_grow(preset):
    scenario = shorten(preset("kernel-fig"))
    shares = [attacker_share(run_scenario(set_param(scenario, "hogs", hogs))) for hogs in (1, 3, 5)]
    assert all(share == pytest.approx(0.80, abs=0.02) for share in shares)
    for fewer, more in zip(shares, shares[1:]):
        assert more <= fewer + 0.005


def test_coarse_clock_checks_cost_the_work_loop_its_share(preset):
    scenario = set_param(shorten(preset("fig4")), "vm.attacker.iteration_ns", 1_000.0)
    fine = attacker_share(run_scenario(set_param(scenario, "vm.attacker.check_granularity", 1)))
    coarse = attacker_share(run_scenario(set_param(scenario, "vm.attacker.check_granularity", 2_000)))
    assert fine >= 0.85
    assert coarse < fine - 0.1


def test_percent_of_baseline_does_not_depend_on_the_horizon(preset):
    scenario = preset("fig4")
    short = run_scenario(shorten(scenario, horizon="3s"))
    long = run_scenario(shorten(scenario, horizon="6s"))
    for before, after in zip(short.scheduler("credit").vms, long.scheduler("credit").vms):
        assert before.pct_baseline is not None
        assert after.pct_baseline.mean == pytest.approx(before.pct_baseline.mean, abs=3.0)


def test_caps_do_not_stop_the_attack(preset):
    report = run_scenario(shorten(preset("table1")))
    group = report.scheduler("credit")
    assert group.vm("attacker").share.mean >= 2 * 0.33
    for vm in group.vms:
        if vm.role == "victim":
            assert vm.share.mean <= 0.34


@pytest.mark.parametrize("name", ["table2", "table2-kernel"])
def test_defenses_restore_fair_share(preset, name):
    report = run_scenario(shorten(preset(name), horizon="30s"))
    assert attacker_share(report, "credit") >= 0.6
    for scheduler in DEFENSES:
        group = report.scheduler(scheduler)
        attacker = group.vm("attacker")
        assert attacker.share.mean == pytest.approx(1 / 3, abs=0.02)
        victims = [vm.pct_baseline.mean for vm in group.vms if vm.role == "victim"]
        assert statistics.mean(victims) == pytest.approx(attacker.pct_baseline.mean, abs=2.0)


def test_exact_charges_within_one_quantum(preset):
    report = run_scenario(shorten(preset("table3"), variants=["exact"]))
    for vm in report.scheduler("exact").vms:
        assert abs(vm.charge_bias_us.mean) < 100


@pytest.mark.parametrize("scheduler", ["poisson", "bernoulli", "uniform"])
def test_randomized_charging_is_unbiased(scenario_from_text, scheduler):
    scenario = scenario_from_text(
        f"name = bias\npcpus = 1\nhorizon = 5s\nreplicas = 100\nseed = 17\nvariants = {scheduler}\n"
        "[vm.attacker]\nkind = user-attacker\nspin = 9ms\n"
    )
    attacker = run_scenario(scenario, workers=4).scheduler(scheduler).vm("attacker")
    scheduled = attacker.share.mean * (scenario.horizon - scenario.warmup)
    assert abs(attacker.charge_bias_us.mean) <= 0.02 * scheduled


def test_grid_aligned_attacker_leaks_at_most_a_slot(preset):
    report = run_scenario(preset("leak-bound"), workers=4)
    for scheduler in ("bernoulli", "uniform"):
        assert attacker_share(report, scheduler) <= 1 / 3 + 0.10


@pytest.mark.parametrize("name", ["table5-relative", "table5-loaded"])
def test_boost_latency_is_preserved(preset, name):
    report = run_scenario(shorten(preset(name)))
    baseline = report.scheduler("credit").vm("ping").latency_us.mean
    for scheduler in DEFENSES:
        latency = report.scheduler(scheduler).vm("ping").latency_us.mean
        assert latency == pytest.approx(baseline, rel=0.10)


def test_boost_is_what_keeps_latency_low(preset):
    scenario = shorten(preset("boost-off"), horizon="10s")
    slow = run_scenario(scenario).scheduler("credit").vm("ping").latency_us
    boosted = scenario.with_updates(scheduler=scenario.scheduler.model_copy(update={"boost": True}))
    fast = run_scenario(boosted).scheduler("credit").vm("ping").latency_us
    assert slow is not None and slow.mean >= 1_000
    assert fast.mean < 50


def test_shares_are_conserved_on_every_run(preset):
    report = run_scenario(shorten(preset("table2"), horizon="2s"))
    for group in report.schedulers:
        total = sum(vm.share.mean for vm in group.vms) + group.idle_share.mean
        assert total == pytest.approx(2.0, abs=1e-9)


def test_table2_is_byte_identical_across_runs(preset):
    scenario = shorten(preset("table2"), horizon="2s")
    assert render(run_scenario(scenario, workers=1), "csv") == render(run_scenario(scenario, workers=4), "csv")
