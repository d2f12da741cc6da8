"""CSV intake for harness result files.

The harness writes one row per (configuration, method) with the header
``snr_db,mt,mr,n,nbar,q,t,method,nmse_mean,nmse_db,trials,seed``.  Only the
columns a figure actually uses are demanded here, so files with extra
columns keep working.
"""

import csv

__all__ = ["SchemaError", "load_rows", "require_columns"]


class SchemaError(ValueError):
    """The CSV does not match the harness result contract."""


def load_rows(path):
    """Read a result CSV into (header, rows-as-dicts), both untyped.

    Raises SchemaError when the file has no header or no data rows.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        parsed = csv.DictReader(fh)
        header = parsed.fieldnames
        rows = list(parsed)
    if not header:
        raise SchemaError(f"{path}: empty file, expected a CSV header")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return tuple(header), rows


def require_columns(header, needed, path):
    missing = [name for name in needed if name not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
