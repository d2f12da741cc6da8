"""`plot-nmse`: render one figure from a harness result CSV."""

import argparse
import sys

from .figure import X_AXES, FigureSpec, render
from .reader import SchemaError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plot-nmse",
        description="plot NMSE sweep results from a bdris-krf CSV file",
    )
    parser.add_argument("--csv", required=True, help="input result CSV")
    parser.add_argument("--x", default="snr_db", choices=X_AXES, help="x-axis column")
    parser.add_argument(
        "--series",
        default="method,nbar",
        help="comma-separated columns that distinguish the lines",
    )
    parser.add_argument("--out", required=True, help="output image (.svg or .png)")
    parser.add_argument("--title", default="", help="figure title")
    args = parser.parse_args(argv)

    keys = tuple(part.strip() for part in args.series.split(",") if part.strip())
    try:
        spec = FigureSpec(
            input_csv=args.csv,
            output_image=args.out,
            x_axis=args.x,
            series_key=keys,
            title=args.title,
        )
        result = render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"wrote {result.output_image}: {len(result.series)} series, "
        f"{result.points} points, x {result.x_min:g}..{result.x_max:g}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
