"""Figure assembly: group result rows into series and render them.

The y axis is always NMSE in dB, recomputed from the linear nmse_mean
column; the stored nmse_db column is only cross-checked, never trusted.
Rendering avoids pyplot so no global backend state is touched, and the
SVG hash salt is pinned so identical inputs produce identical bytes.
"""

import math
from dataclasses import dataclass, field

import matplotlib
from matplotlib.figure import Figure

from .reader import load_rows, require_columns

__all__ = ["FigureSpec", "RenderResult", "render", "X_AXES", "SERIES_COLUMNS"]

X_AXES = ("snr_db", "n")
SERIES_COLUMNS = ("method", "nbar", "mt", "mr", "t")

_X_LABELS = {"snr_db": "SNR (dB)", "n": "surface elements"}
_FORMATS = {".svg": "svg", ".png": "png"}
_HASH_SALT = "nmse-plots"

# Stored dB values drift from the recomputed ones only if the file was
# edited by hand; anything past rounding noise is worth a warning.
_DB_DRIFT_LIMIT = 1e-9


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which CSV, which x axis, what distinguishes a series."""

    input_csv: str
    output_image: str
    x_axis: str = "snr_db"
    series_key: tuple = ("method", "nbar")
    title: str = ""

    def __post_init__(self):
        if self.x_axis not in X_AXES:
            raise ValueError(f"x_axis must be one of {X_AXES}, got {self.x_axis!r}")
        keys = tuple(self.series_key)
        if not keys:
            raise ValueError("series_key must name at least one column")
        bad = [k for k in keys if k not in SERIES_COLUMNS]
        if bad:
            raise ValueError(
                f"series_key may only use {SERIES_COLUMNS}, got {', '.join(bad)}"
            )
        object.__setattr__(self, "series_key", keys)


@dataclass(frozen=True)
class RenderResult:
    """What was drawn: series labels in legend order plus axis coverage."""

    output_image: str
    series: tuple
    points: int
    x_min: float
    x_max: float
    warnings: tuple = field(default_factory=tuple)


def _suffix_format(path):
    dot = path.rfind(".")
    suffix = path[dot:].lower() if dot >= 0 else ""
    if suffix not in _FORMATS:
        raise ValueError(
            f"unsupported image extension {suffix or '(none)'}; "
            f"use one of {', '.join(sorted(_FORMATS))}"
        )
    return _FORMATS[suffix]


def _collect_series(spec, rows):
    """Group rows by the series key, in first-appearance order."""
    series = {}
    warnings = []
    worst_drift = 0.0
    zero_rows = 0
    for index, row in enumerate(rows, start=2):  # header is line 1
        try:
            x = float(row[spec.x_axis])
            mean = float(row["nmse_mean"])
        except ValueError as exc:
            raise ValueError(f"line {index}: {exc}") from None
        if mean < 0.0:
            raise ValueError(f"line {index}: nmse_mean is negative ({mean!r})")
        if mean == 0.0:
            zero_rows += 1
            continue
        y = 10.0 * math.log10(mean)
        stored = row.get("nmse_db")
        if stored is not None:
            try:
                worst_drift = max(worst_drift, abs(y - float(stored)))
            except ValueError:
                raise ValueError(f"line {index}: bad nmse_db {stored!r}") from None
        label = ", ".join(f"{k}={row[k]}" for k in spec.series_key)
        series.setdefault(label, []).append((x, y))
    if zero_rows:
        warnings.append(
            f"skipped {zero_rows} row(s) with nmse_mean == 0 (no dB image)"
        )
    if worst_drift > _DB_DRIFT_LIMIT:
        warnings.append(
            f"stored nmse_db drifts from 10*log10(nmse_mean) by up to "
            f"{worst_drift:.3e}; plotting the recomputed values"
        )
    if not series:
        raise ValueError("no plottable rows (all nmse_mean values are zero)")
    return series, warnings


def render(spec):
    """Draw spec and return a RenderResult; the input file is never touched."""
    image_format = _suffix_format(spec.output_image)
    header, rows = load_rows(spec.input_csv)
    require_columns(
        header, (spec.x_axis, *spec.series_key, "nmse_mean"), spec.input_csv
    )
    series, warnings = _collect_series(spec, rows)

    with matplotlib.rc_context({"svg.hashsalt": _HASH_SALT}):
        fig = Figure(figsize=(7.2, 4.8), constrained_layout=True)
        ax = fig.subplots()
        points = 0
        for label, pairs in series.items():
            pairs.sort(key=lambda p: p[0])
            xs = [p[0] for p in pairs]
            ys = [p[1] for p in pairs]
            ax.plot(xs, ys, marker="o", linewidth=1.4, markersize=4, label=label)
            points += len(pairs)
        ax.set_xlabel(_X_LABELS[spec.x_axis])
        ax.set_ylabel("NMSE (dB)")
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, alpha=0.35)
        ax.legend(fontsize=8)
        # SVG output embeds a creation date unless told otherwise; drop it so
        # re-rendering the same data gives identical bytes.
        metadata = {"Date": None} if image_format == "svg" else None
        fig.savefig(spec.output_image, format=image_format, metadata=metadata)

    all_x = [p[0] for pairs in series.values() for p in pairs]
    return RenderResult(
        output_image=spec.output_image,
        series=tuple(series),
        points=points,
        x_min=min(all_x),
        x_max=max(all_x),
        warnings=tuple(warnings),
    )
