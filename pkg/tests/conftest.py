import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "creditsim"))

from harness.scenario import Scenario, load_scenario, parse_scenario  # noqa: E402
from metrics.ledger import UsageLedger  # noqa: E402
from scheduler.credit import CreditScheduler  # noqa: E402
from scheduler.settings import SchedulerConfig  # noqa: E402
from simcore.engine import Simulator  # noqa: E402


@pytest.fixture
def scenario_from_text():
    def build(text: str) -> Scenario:
        return parse_scenario(text, source="test")

    return build


@pytest.fixture
def preset():
    def build(name: str, **updates) -> Scenario:
        scenario = load_scenario(name)
        return scenario.with_updates(**updates) if updates else scenario

    return build


@pytest.fixture
def bare_scheduler():
    """A started scheduler with no workloads attached; tests drive wakes and blocks by hand."""

    def build(names_by_pcpu: list[list[str]], **config) -> CreditScheduler:
        sim = Simulator(seed=1)
        names = [name for names in names_by_pcpu for name in names]
        ledger = UsageLedger(len(names), len(names_by_pcpu))
        ledger.start(0)
        scheduler = CreditScheduler(SchedulerConfig(**config), sim, ledger, len(names_by_pcpu))
        for pcpu, pcpu_names in enumerate(names_by_pcpu):
            for name in pcpu_names:
                scheduler.add_vcpu(name, pcpu)
        scheduler.start(0)
        return scheduler

    return build
