from typing import Any

import streamlit as st
from harness.report import Report
from harness.scenario import Scenario
from simcore.units import format_duration


class BaseComponent:
    def _create_widget(self, prefix: str, field_name: str, value: int | bool | str | tuple) -> Any:
        """Create a widget for the given field.

        Arguments:
            prefix (str): The prefix for the key, keeps keys unique across components.
            field_name (str): The field name, used as the label.
            value (int | bool | str | tuple): The default value, its type picks the widget.

        Returns:
            Any: The value of the widget.
        """
        key = f"{prefix}_{field_name}"
        label = self.snake_to_human(field_name)
        if type(value) is str:
            return st.text_input(label=label, value=value, key=key)
        if type(value) is int:
            return st.number_input(label=label, value=value, min_value=0, key=key)
        if type(value) is bool:
            return st.checkbox(label=label, value=value, key=key)
        if type(value) is tuple:
            return st.selectbox(label=label, options=value, key=key)
        raise ValueError(f"Unsupported type of the value: {type(value)}")

    def snake_to_human(self, snake_str: str) -> str:
        return " ".join(word.capitalize() for word in snake_str.split("_"))

    def overrides(self, prefix: str, scenario: Scenario) -> Scenario:
        """Widgets for seed, replicas and horizon; returns the scenario with them applied."""
        left, middle, right = st.columns(3)
        with left:
            seed = self._create_widget(prefix, "seed", scenario.resolved_seed)
        with middle:
            replicas = self._create_widget(prefix, "replicas", scenario.replicas)
        with right:
            horizon = self._create_widget(prefix, "horizon", format_duration(scenario.horizon))
        return scenario.with_updates(seed=int(seed), replicas=max(1, int(replicas)), horizon=horizon)

    def show_report(self, report: Report) -> None:
        """One table per scheduler variant."""
        st.subheader(report.scenario_id)
        for group in report.schedulers:
            st.markdown(f"**{group.scheduler}** ({group.mode}), idle {group.idle_share.mean:.4f}")
            rows = []
            for vm in group.vms:
                rows.append({
                    "vm": vm.vm,
                    "role": vm.role,
                    "pcpu": vm.pcpu,
                    "share": round(vm.share.mean, 4),
                    "± 95%": round(vm.share.half_width, 4),
                    "% baseline": round(vm.pct_baseline.mean, 2) if vm.pct_baseline else None,
                    "charge bias µs": round(vm.charge_bias_us.mean, 1),
                    "debits": round(vm.debits.mean, 1),
                    "boost wakes": round(vm.boost_wakes.mean, 1),
                    "latency µs": round(vm.latency_us.mean, 1) if vm.latency_us else None,
                })
            st.dataframe(rows, hide_index=True, use_container_width=True)
