import math

import pytest

HEADER = "snr_db,mt,mr,n,nbar,q,t,method,nmse_mean,nmse_db,trials,seed"

SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
GROUP_SIZES = (1, 2, 4)


def result_line(snr, nbar, method, mean, mt=2, mr=2, n=16, trials=300, seed=7):
    q = n // nbar
    t = mt * nbar * nbar * q
    db = 10.0 * math.log10(mean) if mean > 0.0 else -math.inf
    return (
        f"{snr!r},{mt},{mr},{n},{nbar},{q},{t},{method},{mean!r},{db!r},"
        f"{trials},{seed}"
    )


def sweep_csv_text():
    """A group-size sweep shaped like real harness output: 6 series."""
    lines = [HEADER]
    for nbar in GROUP_SIZES:
        for snr in SNR_GRID:
            noise = 10.0 ** (-snr / 10.0)
            lines.append(result_line(snr, nbar, "LS", 0.05 * noise))
            lines.append(result_line(snr, nbar, "KRF", 0.01 * noise / nbar))
    return "\n".join(lines) + "\n"


@pytest.fixture
def sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    path.write_text(sweep_csv_text(), encoding="utf-8")
    return path
