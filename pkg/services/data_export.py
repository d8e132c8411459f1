"""
Data export services: result tables to CSV or JSON.
"""
import hashlib
import json
import logging
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd

from config.settings import config
from models.run import ResultRow

logger = logging.getLogger(__name__)


class DataExportService:
    """Serializes result tables with fixed formatting."""

    @staticmethod
    def frame_from_rows(rows: Iterable[ResultRow]) -> pd.DataFrame:
        """ResultRows to a DataFrame with the fixed column order."""
        return pd.DataFrame([row.as_dict() for row in rows], columns=list(ResultRow.COLUMNS))

    @staticmethod
    def to_csv_text(frame: pd.DataFrame) -> str:
        """
        CSV with header, ',' separator and scientific floats (10 significant digits).

        Identical frames always give identical text.
        """
        return frame.to_csv(index=False, float_format=config.FLOAT_FORMAT, lineterminator="\n")

    @staticmethod
    def to_json_text(frame: pd.DataFrame) -> str:
        """JSON array of records keyed by column name; NaN becomes null."""
        records = [
            {key: _json_value(value) for key, value in record.items()}
            for record in frame.to_dict(orient="records")
        ]
        return json.dumps(records, indent=2)

    @staticmethod
    def tagged_frame(sections: Mapping[str, pd.DataFrame], tag: str = "table") -> pd.DataFrame:
        """Stack several tables into one; the first column names each row's table."""
        parts = [frame.assign(**{tag: name}) for name, frame in sections.items()]
        stacked = pd.concat(parts, ignore_index=True, sort=False)
        return stacked[[tag] + [column for column in stacked.columns if column != tag]]

    @staticmethod
    def render(frame: pd.DataFrame, fmt: str) -> str:
        if fmt == "json":
            return DataExportService.to_json_text(frame)
        return DataExportService.to_csv_text(frame)

    @staticmethod
    def default_output_path(command: str, identifier: str, fmt: str) -> str:
        """Path under the exports directory derived from a run identifier."""
        filename_hash = hashlib.md5(identifier.encode()).hexdigest()[:12]
        return os.path.join(config.EXPORTS_DIR, f"{command}_{filename_hash}.{fmt}")

    @staticmethod
    def save(frame: pd.DataFrame, path: str, fmt: str = "csv") -> str:
        """
        Write a frame to disk.

        Args:
            frame: Result table
            path: Destination file
            fmt: 'csv' or 'json'

        Returns:
            The path written
        """
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        content = DataExportService.render(frame, fmt)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    @staticmethod
    def read_columns(path: str) -> List[str]:
        """Column names of a written CSV file."""
        return list(pd.read_csv(path, nrows=0).columns)


def _json_value(value: Any) -> Any:
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def records_frame(records: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """DataFrame from plain dict records, optionally fixing the column order."""
    return pd.DataFrame(list(records), columns=list(columns) if columns else None)
