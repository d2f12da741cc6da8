import math

import pytest

from nmse_plots import FigureSpec, SchemaError, render
from conftest import HEADER, SNR_GRID, result_line


def spec_for(csv_path, out_path, **overrides):
    return FigureSpec(input_csv=str(csv_path), output_image=str(out_path), **overrides)


def test_sweep_renders_six_series(sweep_csv, tmp_path):
    out = tmp_path / "sweep.svg"
    result = render(spec_for(sweep_csv, out))
    assert len(result.series) == 6
    assert result.x_min == min(SNR_GRID)
    assert result.x_max == max(SNR_GRID)
    assert result.points == 6 * len(SNR_GRID)
    assert result.warnings == ()
    svg = out.read_text(encoding="utf-8")
    for label in result.series:
        assert label in svg
    # two methods times three group sizes
    assert {lbl.split(",")[0] for lbl in result.series} == {
        "method=LS",
        "method=KRF",
    }


def test_rerender_is_byte_identical(sweep_csv, tmp_path):
    first = tmp_path / "a.svg"
    second = tmp_path / "b.svg"
    render(spec_for(sweep_csv, first))
    render(spec_for(sweep_csv, second))
    assert first.read_bytes() == second.read_bytes()


def test_input_file_never_modified(sweep_csv, tmp_path):
    before = sweep_csv.read_bytes()
    render(spec_for(sweep_csv, tmp_path / "out.svg"))
    assert sweep_csv.read_bytes() == before


def test_single_row_plots_one_marker(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text(
        HEADER + "\n" + result_line(10.0, 2, "KRF", 1e-3) + "\n", encoding="utf-8"
    )
    result = render(spec_for(path, tmp_path / "one.svg"))
    assert result.series == ("method=KRF, nbar=2",)
    assert result.points == 1
    assert result.x_min == result.x_max == 10.0


def test_png_output(sweep_csv, tmp_path):
    out = tmp_path / "sweep.png"
    render(spec_for(sweep_csv, out))
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_missing_method_column_raises(tmp_path):
    header = HEADER.replace("method,", "")
    line = "10.0,2,2,16,2,8,64,0.001,-30.0,300,7"
    path = tmp_path / "broken.csv"
    path.write_text(header + "\n" + line + "\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="method"):
        render(spec_for(path, tmp_path / "x.svg"))


def test_header_only_file_raises(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="no data rows"):
        render(spec_for(path, tmp_path / "x.svg"))


def test_unsupported_extension_raises(sweep_csv, tmp_path):
    with pytest.raises(ValueError, match="extension"):
        render(spec_for(sweep_csv, tmp_path / "sweep.bmp"))


def test_bad_axis_and_series_rejected(sweep_csv, tmp_path):
    with pytest.raises(ValueError, match="x_axis"):
        spec_for(sweep_csv, tmp_path / "x.svg", x_axis="trials")
    with pytest.raises(ValueError, match="series_key"):
        spec_for(sweep_csv, tmp_path / "x.svg", series_key=("method", "bogus"))
    with pytest.raises(ValueError, match="at least one"):
        spec_for(sweep_csv, tmp_path / "x.svg", series_key=())


def test_zero_mean_rows_skipped_with_warning(tmp_path):
    path = tmp_path / "zero.csv"
    lines = [
        HEADER,
        result_line(0.0, 1, "LS", 0.0),
        result_line(10.0, 1, "LS", 1e-2),
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    result = render(spec_for(path, tmp_path / "zero.svg"))
    assert result.points == 1
    assert any("nmse_mean == 0" in w for w in result.warnings)


def test_stored_db_drift_warns_but_plots_recomputed(tmp_path):
    mean = 1e-2
    wrong_db = 10.0 * math.log10(mean) + 0.5
    line = f"10.0,2,2,16,2,8,64,LS,{mean!r},{wrong_db!r},300,7"
    path = tmp_path / "drift.csv"
    path.write_text(HEADER + "\n" + line + "\n", encoding="utf-8")
    result = render(spec_for(path, tmp_path / "drift.svg"))
    assert any("nmse_db drifts" in w for w in result.warnings)


def test_negative_mean_rejected(tmp_path):
    line = "10.0,2,2,16,2,8,64,LS,-0.5,-3.0,300,7"
    path = tmp_path / "neg.csv"
    path.write_text(HEADER + "\n" + line + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="negative"):
        render(spec_for(path, tmp_path / "neg.svg"))
