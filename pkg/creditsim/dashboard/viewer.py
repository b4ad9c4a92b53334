import streamlit as st
from dashboard.base_component import BaseComponent
from harness.report import parse_reports
from pydantic import ValidationError
from templates import Messages


class ReportViewerUI(BaseComponent):
    def __init__(self):
        st.write(Messages.VIEWER_INFO)
        uploaded = st.file_uploader("Report", type=["json"], key="viewer_upload")
        if uploaded is None:
            return
        try:
            reports = parse_reports(uploaded.getvalue().decode("utf-8"))
        except (ValidationError, UnicodeDecodeError) as e:
            st.error(f"Not a report: {e}")
            return
        for report in reports:
            self.show_report(report)
