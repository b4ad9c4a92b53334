from concurrent.futures import ThreadPoolExecutor, as_completed
from time import perf_counter
from typing import Callable, Sequence

from config import BASELINE_HORIZON, RUN_TOLERANCE, get_workers
from harness.machine import Machine, ReplicaResult
from harness.report import Report, SamplerStats, SchedulerReport, VmReport
from harness.scenario import Scenario, VmSpec, set_param
from logger import Logger
from metrics.stats import charge_bias, cpu_share, idle_share, percent_of_baseline, summarize_any, work_rate
from scheduler.settings import Mode, Variant
from simcore.engine import SimulationError
from tqdm import tqdm
from workloads.spec import WorkloadKind

logger = Logger(__name__)

ProgressCallback = Callable[[int, int], None]


def run_replica(scenario: Scenario, variant: Variant, replica: int, record_spans: bool = False) -> ReplicaResult:
    """Run one replica, attaching the run's identity to any SimulationError."""
    try:
        return Machine(scenario, variant, replica, record_spans).run()
    except SimulationError as e:
        e.context.update(scenario=scenario.name, scheduler=variant.value, replica=str(replica))
        raise


def has_baseline(vm: VmSpec) -> bool:
    return vm.kind is WorkloadKind.CPU_HOG or vm.is_attacker


def solo_baseline(scenario: Scenario, vm: VmSpec, variant: Variant) -> float | None:
    """Work rate of the VM's benchmark running alone on one PCPU.

    Attackers and hogs run the same CPU-bound benchmark, so both are compared to a solo
    CPU hog. I/O programs have no throughput baseline.
    """
    if not has_baseline(vm):
        return None
    solo = Scenario(
        name=f"{scenario.name}-baseline",
        pcpus=1,
        vms=[VmSpec(name="solo", kind=WorkloadKind.CPU_HOG)],
        scheduler=scenario.scheduler.model_copy(update={"mode": Mode.WC, "cap": None, "variant": variant}),
        horizon=min(scenario.horizon, scenario.warmup + BASELINE_HORIZON),
        warmup=scenario.warmup,
        seed=scenario.resolved_seed,
        replicas=1,
    )
    result = run_replica(solo, variant, 0)
    return work_rate(result.work, 0, result.ledger.window)


def _summarize_variant(scenario: Scenario, variant: Variant, results: list[ReplicaResult]) -> SchedulerReport:
    config = scenario.scheduler_for(variant)
    baseline = None
    vms = []
    for index, vm in enumerate(scenario.all_vms):
        window = [result.ledger.window for result in results]
        shares = [cpu_share(r.ledger, index, w) for r, w in zip(results, window)]
        pct = None
        if has_baseline(vm):
            if baseline is None:
                baseline = solo_baseline(scenario, vm, variant)
            pct = summarize_any([percent_of_baseline(r.work, index, baseline, w) for r, w in zip(results, window)])
        runs = [length for result in results for length in result.run_lengths[index]]
        trips = [trip for result in results for trip in result.round_trips[index]]
        within = None
        if runs:
            within = sum(1 for length in runs if abs(length - vm.spin) <= RUN_TOLERANCE) / len(runs)
        vms.append(
            VmReport(
                vm=vm.name,
                role=vm.role,
                kind=vm.kind.value,
                pcpu=vm.pcpu,
                share=summarize_any(shares),
                pct_baseline=pct,
                charge_bias_us=summarize_any([charge_bias(r.ledger, index, config.quantum) for r in results]),
                debits=summarize_any([r.ledger.debits[index] for r in results]),
                boost_wakes=summarize_any([r.ledger.boost_wakes[index] for r in results]),
                run_length_us=summarize_any(runs) if runs else None,
                within_tolerance=within,
                latency_us=summarize_any(trips) if trips else None,
            )
        )
    return SchedulerReport(
        scheduler=variant.value,
        mode=config.mode.value,
        idle_share=summarize_any([idle_share(r.ledger, r.ledger.window) for r in results]),
        vms=vms,
        sampler=SamplerStats(
            samples=summarize_any([r.ledger.samples for r in results]),
            idle_samples=summarize_any([r.ledger.idle_samples for r in results]),
        ),
        events={kind: sum(r.events[kind] for r in results) / len(results) for kind in results[0].events},
        digests=[result.digest for result in results],
    )


def run_scenario(
    scenario: Scenario,
    workers: int | None = None,
    progress: bool = False,
    on_replica: ProgressCallback | None = None,
    point: str | None = None,
) -> Report:
    """Run every replica of every scheduler variant of a scenario and aggregate them.

    Arguments:
        scenario (Scenario): The scenario.
        workers (int | None): Worker threads, SIM_WORKERS when not given.
        progress (bool): Show a tqdm progress bar.
        on_replica (ProgressCallback | None): Called with (done, total) after each replica.
        point (str | None): Sweep point label stored in the report.

    Raises:
        SimulationError: If a replica hits a logic error; the error names the replica.

    Returns:
        Report: Aggregated results, identical for identical inputs.
    """
    started = perf_counter()
    variants = scenario.variant_list
    jobs = [(variant, replica) for variant in variants for replica in range(scenario.replicas)]
    results: dict[tuple[Variant, int], ReplicaResult] = {}
    logger.info(
        "Running %s: %d scheduler(s) x %d replica(s) of %ss.",
        scenario.name, len(variants), scenario.replicas, scenario.horizon / 1_000_000,
    )

    with ThreadPoolExecutor(max_workers=workers or get_workers()) as executor:
        futures = {executor.submit(run_replica, scenario, variant, replica): (variant, replica) for variant, replica in jobs}
        bar = tqdm(total=len(jobs), desc=scenario.name, disable=not progress, leave=False)
        try:
            for done, future in enumerate(as_completed(futures), start=1):
                results[futures[future]] = future.result()
                bar.update(1)
                if on_replica is not None:
                    on_replica(done, len(jobs))
        finally:
            bar.close()

    groups = [
        _summarize_variant(scenario, variant, [results[(variant, replica)] for replica in range(scenario.replicas)])
        for variant in variants
    ]
    logger.info("%s simulated in %.2f seconds.", scenario.name, perf_counter() - started)
    return Report(
        scenario=scenario.name,
        point=point,
        seed=scenario.resolved_seed,
        replicas=scenario.replicas,
        pcpus=scenario.pcpus,
        horizon_us=scenario.horizon,
        warmup_us=scenario.warmup,
        schedulers=groups,
    )


def sweep(
    scenario: Scenario,
    param: str,
    values: Sequence[str | int | float],
    workers: int | None = None,
    progress: bool = False,
    on_point: ProgressCallback | None = None,
) -> list[Report]:
    """Run the scenario once per value of the numeric field at param.

    Raises:
        ScenarioError: If param does not name a numeric field or a value is invalid.
    """
    points = [(f"{param}={value}", set_param(scenario, param, value)) for value in values]
    reports = []
    for done, (label, swept) in enumerate(points, start=1):
        reports.append(run_scenario(swept, workers, progress, point=label))
        if on_point is not None:
            on_point(done, len(points))
    return reports


def run_defined(
    scenario: Scenario,
    workers: int | None = None,
    progress: bool = False,
    on_point: ProgressCallback | None = None,
) -> list[Report]:
    """Run a scenario the way its file asks: once per value of its [sweep] section, or once."""
    if scenario.sweep is None:
        reports = [run_scenario(scenario, workers, progress)]
        if on_point is not None:
            on_point(1, 1)
        return reports
    return sweep(scenario, scenario.sweep.param, scenario.sweep.values, workers, progress, on_point)
