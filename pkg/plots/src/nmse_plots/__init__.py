"""Publication-style line plots for bdris-krf result CSVs."""

from .figure import SERIES_COLUMNS, X_AXES, FigureSpec, RenderResult, render
from .reader import SchemaError, load_rows

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "RenderResult",
    "SERIES_COLUMNS",
    "SchemaError",
    "X_AXES",
    "load_rows",
    "render",
]
