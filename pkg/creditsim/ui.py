import os

import streamlit as st
from config import SCENARIO_FORMAT_MD
from dashboard.runner import EditorUI, PresetsUI
from dashboard.viewer import ReportViewerUI
from templates import Messages


class WebUI:
    def __init__(self):
        st.set_page_config(page_title=Messages.TITLE, page_icon="⏱️", layout="wide")
        st.title(Messages.TITLE)
        st.write(Messages.DESCRIPTION)
        presets_tab, editor_tab, viewer_tab, format_tab = st.tabs(
            ["🧪 Presets", "📝 Scenario editor", "📊 Report viewer", "📖 Scenario format"]
        )

        with presets_tab:
            self.presets = PresetsUI()

        with editor_tab:
            self.editor = EditorUI()

        with viewer_tab:
            self.viewer = ReportViewerUI()

        with format_tab:
            if os.path.isfile(SCENARIO_FORMAT_MD):
                st.write(open(SCENARIO_FORMAT_MD, "r", encoding="utf-8").read())


WebUI()
