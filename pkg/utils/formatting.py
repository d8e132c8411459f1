"""
Utilities for formatting numbers and console tables.
"""
import math
from typing import Any, Dict, List, Optional

import pandas as pd


def format_float(value: Any, digits: int = 10) -> str:
    """Scientific notation with a fixed number of significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, float)):
        if isinstance(value, float) and math.isnan(value):
            return "nan"
        return f"{float(value):.{digits - 1}e}"
    return str(value)


def relative_deviation(value: float, reference: float) -> float:
    """|value - reference| / |reference|; absolute deviation when the reference is 0."""
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def format_data_as_table(data: List[Dict[str, Any]], max_width: int = 24, digits: int = 6) -> str:
    """
    Format result rows as a fixed-width text table.

    Args:
        data: List of dictionaries sharing the same keys
        max_width: Maximum width for each column
        digits: Significant digits for floats

    Returns:
        Formatted table as string
    """
    if not data:
        return "<no rows>"

    df = pd.DataFrame(data)

    def render(value):
        text = format_float(value, digits) if isinstance(value, float) else str(value)
        return text if len(text) <= max_width else text[:max_width - 3] + "..."

    for col in df.columns:
        df[col] = df[col].map(render)

    widths = {col: min(max(df[col].str.len().max(), len(str(col))), max_width) for col in df.columns}

    lines = [" | ".join(f"{str(col):{widths[col]}}" for col in df.columns)]
    lines.append("-|-".join("-" * widths[col] for col in df.columns))
    for _, row in df.iterrows():
        lines.append(" | ".join(f"{cell:{widths[col]}}" for col, cell in zip(df.columns, row)))
    return "\n".join(lines)


def comparison_row(name: str, value: float, reference: float, tolerance: float,
                   note: Optional[str] = None) -> Dict[str, Any]:
    """Side-by-side record of a computed value against its reference."""
    deviation = relative_deviation(value, reference)
    row = {
        "observable": name,
        "computed": value,
        "reference": reference,
        "rel_deviation": deviation,
        "tolerance": tolerance,
        "ok": deviation <= tolerance,
    }
    if note:
        row["note"] = note
    return row
