"""
Utility functions for logging, report export and table formatting.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd


ROOT_LOGGER = "levelforge"


class Logger:
    """
    Named logger for levelforge packages.

    Every logger lives under the ``levelforge`` hierarchy, and a single stderr
    handler is attached to the root of that hierarchy so stdout carries only
    reports.
    """

    def __init__(self, name: str = ROOT_LOGGER, log_level: Optional[str] = None):
        """
        Initialize logger.

        Args:
            name: Logger name ("gro" and "levelforge.gro" are equivalent)
            log_level: Logging level; None leaves the hierarchy's level alone
        """
        if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
            name = f"{ROOT_LOGGER}.{name}"
        root = logging.getLogger(ROOT_LOGGER)
        if not root.handlers:
            handler = logging.StreamHandler(sys.stderr)
            formatter = logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
            )
            handler.setFormatter(formatter)
            root.addHandler(handler)
            root.setLevel(logging.WARNING)
        self.logger = logging.getLogger(name)
        if log_level is not None:
            self.logger.setLevel(getattr(logging, log_level.upper()))

    def info(self, message: str) -> None:
        """Log info message."""
        self.logger.info(message)

    def error(self, message: str) -> None:
        """Log error message."""
        self.logger.error(message)

    def warning(self, message: str) -> None:
        """Log warning message."""
        self.logger.warning(message)

    def debug(self, message: str) -> None:
        """Log debug message."""
        self.logger.debug(message)

    def is_debug(self) -> bool:
        return self.logger.isEnabledFor(logging.DEBUG)


def set_log_level(level: str) -> None:
    """Set the level of the whole levelforge logger hierarchy."""
    Logger(ROOT_LOGGER)
    logging.getLogger(ROOT_LOGGER).setLevel(getattr(logging, level.upper()))


class ReportExporter:
    """Serialize verification reports."""

    @staticmethod
    def to_json(data: Dict[str, Any]) -> str:
        """Canonical JSON: sorted keys, fixed indentation, ASCII-safe."""
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)

    def export_to_json(self, data: Dict[str, Any], output_path: str) -> str:
        """
        Write a report to a JSON file.

        Args:
            data: Report dictionary
            output_path: Output file path

        Returns:
            Path to generated JSON file
        """
        Path(output_path).parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(self.to_json(data))
            f.write("\n")
        return output_path


class TableFormatter:
    """Render lists of records as aligned text tables."""

    @staticmethod
    def render(records: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
        """
        Render records with pandas.

        Args:
            records: One dictionary per row
            columns: Column order; defaults to the keys of the first record

        Returns:
            The table as text, or "(empty)" when there are no rows
        """
        if not records:
            return "(empty)"
        frame = pd.DataFrame.from_records(records, columns=columns)
        return frame.to_string(index=False)

    @staticmethod
    def stringify(value: Any) -> str:
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, (list, tuple)):
            return ", ".join(str(v) for v in value)
        return str(value)


# Factory functions
def create_report_exporter() -> ReportExporter:
    """Create a report exporter instance."""
    return ReportExporter()


def create_table_formatter() -> TableFormatter:
    """Create a table formatter instance."""
    return TableFormatter()


def create_logger(name: str = ROOT_LOGGER, level: Optional[str] = None) -> Logger:
    """Create a logger instance."""
    return Logger(name, level)
