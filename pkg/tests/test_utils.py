"""
Unit tests for logging, report export and table formatting.
"""

import json
import logging

import pytest

from utils import (
    ROOT_LOGGER,
    create_logger,
    create_report_exporter,
    create_table_formatter,
    set_log_level,
)


class TestLogger:
    """Test the levelforge logger hierarchy."""

    def test_names_are_namespaced(self):
        """Test short names land under the levelforge root."""
        assert create_logger("gro").logger.name == "levelforge.gro"
        assert create_logger("levelforge.km").logger.name == "levelforge.km"

    def test_set_log_level(self):
        """Test the root level controls every package logger."""
        logger = create_logger("hopf")
        set_log_level("DEBUG")
        assert logger.is_debug()
        set_log_level("WARNING")
        assert not logger.is_debug()
        assert logging.getLogger(ROOT_LOGGER).level == logging.WARNING


class TestReportExporter:
    """Test JSON export."""

    def test_canonical_json(self):
        """Test keys are sorted so equal reports serialize identically."""
        exporter = create_report_exporter()
        assert exporter.to_json({"b": 1, "a": 2}) == exporter.to_json({"a": 2, "b": 1})

    def test_export_creates_directories(self, tmp_path):
        """Test exporting writes into a new directory."""
        target = tmp_path / "out" / "report.json"
        path = create_report_exporter().export_to_json({"pass": True, "checks": []}, str(target))
        assert path == str(target)
        assert json.loads(target.read_text(encoding="utf-8")) == {"pass": True, "checks": []}


class TestTableFormatter:
    """Test text tables."""

    def test_render(self):
        """Test records render with the requested columns."""
        formatter = create_table_formatter()
        text = formatter.render([{"check": "rank", "computed": 6}], ["check", "computed"])
        assert "rank" in text
        assert "computed" in text.splitlines()[0]

    def test_empty(self):
        """Test an empty table renders a placeholder."""
        assert create_table_formatter().render([]) == "(empty)"

    def test_stringify(self):
        """Test booleans and sequences are shown compactly."""
        formatter = create_table_formatter()
        assert formatter.stringify(True) == "yes"
        assert formatter.stringify([3, 3]) == "3, 3"
        assert formatter.stringify(42) == "42"


if __name__ == "__main__":
    pytest.main([__file__])
