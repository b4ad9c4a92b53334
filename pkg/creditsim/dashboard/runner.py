import os
from time import perf_counter

import streamlit as st
from config import get_output_directory, get_presets, PRESETS_DIRECTORY
from dashboard.base_component import BaseComponent
from harness.report import Report, emit, render
from harness.runner import run_defined, run_scenario
from harness.scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from logger import Logger
from simcore.engine import SimulationError
from templates import Messages

logger = Logger(__name__)


class ScenarioRunner(BaseComponent):
    """Runs a scenario with a progress bar and offers the report for download."""

    def run(self, scenario: Scenario, key: str) -> Report | None:
        progress_bar = st.progress(0)
        started = perf_counter()

        def on_replica(done: int, total: int) -> None:
            progress_bar.progress(done / total, f"⏳ Replica {done} of {total}...")

        try:
            report = run_scenario(scenario, on_replica=on_replica)
        except SimulationError as e:
            st.error(f"{Messages.SIMULATION_FAILED}\n\n```\n{e}\n```")
            return None
        seconds = perf_counter() - started
        st.success(
            Messages.RUN_FINISHED.format(
                replicas=scenario.replicas, schedulers=len(scenario.variant_list), seconds=seconds
            ),
            icon="✅",
        )
        self.save_and_offer(scenario, report, key)
        self.show_report(report)
        return report

    def run_sweep(self, scenario: Scenario, key: str) -> list[Report] | None:
        """Every point of the scenario's [sweep] section, one table group per point."""
        progress_bar = st.progress(0)
        started = perf_counter()

        def on_point(done: int, total: int) -> None:
            progress_bar.progress(done / total, f"⏳ Point {done} of {total}...")

        try:
            reports = run_defined(scenario, on_point=on_point)
        except SimulationError as e:
            st.error(f"{Messages.SIMULATION_FAILED}\n\n```\n{e}\n```")
            return None
        st.success(
            Messages.SWEEP_FINISHED.format(
                points=len(reports), param=scenario.sweep.param, seconds=perf_counter() - started
            ),
            icon="✅",
        )
        self.save_and_offer(scenario, reports, key)
        for report in reports:
            self.show_report(report)
        return reports

    def save_and_offer(self, scenario: Scenario, reports: Report | list[Report], key: str) -> None:
        """Write the JSON report to the output directory and offer CSV and JSON downloads."""
        path = os.path.join(get_output_directory(), f"{scenario.name}.json")
        try:
            emit(reports, "json", path)
        except OSError as e:
            logger.warning("Report was not saved: %s", e)
        left, right = st.columns(2)
        with left:
            st.download_button("Download CSV", render(reports, "csv"), f"{scenario.name}.csv", "text/csv", key=f"{key}_csv", icon="📥")
        with right:
            st.download_button("Download JSON", render(reports, "json"), f"{scenario.name}.json", "application/json", key=f"{key}_json", icon="📥")


class PresetsUI(ScenarioRunner):
    def __init__(self):
        st.write(Messages.DASHBOARD_INFO)
        presets = get_presets()
        if not presets:
            st.warning(Messages.NO_PRESETS.format(directory=PRESETS_DIRECTORY))
            return
        name = self._create_widget("presets", "preset", tuple(presets))
        scenario = load_scenario(name)
        st.caption(scenario.description)
        try:
            scenario = self.overrides("presets", scenario)
        except ScenarioError as e:
            st.error(str(e))
            return
        if scenario.sweep is not None:
            st.info(Messages.PRESET_SWEEP.format(param=scenario.sweep.param, values=", ".join(scenario.sweep.values)))
        if st.button("Run", key="presets_run"):
            if scenario.sweep is not None:
                self.run_sweep(scenario, "presets")
            else:
                self.run(scenario, "presets")


class EditorUI(ScenarioRunner):
    def __init__(self):
        st.write(Messages.EDITOR_INFO)
        presets = get_presets()
        template = ""
        if presets:
            with open(next(iter(presets.values())), "r", encoding="utf-8") as f:
                template = f.read()
        text = st.text_area("Scenario", value=template, height=400, key="editor_text")
        try:
            scenario = parse_scenario(text, source="editor")
        except ScenarioError as e:
            for diagnostic in e.diagnostics:
                st.error(str(diagnostic))
            return
        st.info(f"Valid: {len(scenario.all_vms)} VM(s), schedulers {', '.join(v.value for v in scenario.variant_list)}.")
        if st.button("Run", key="editor_run"):
            self.run(scenario, "editor")
