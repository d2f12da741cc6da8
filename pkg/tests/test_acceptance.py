"""End-to-end acceptance gate for the estimation chain and the harness.

Each test covers one headline behavior at desk scale and prints a single
[PASS]/[FAIL] line with the measured numbers; run with `pytest -s` to see
the lines for passing tests too.  The statistical checks all run on the
shipped default master seed, so their outcomes are reproducible bit for
bit on any machine.
"""

import itertools
import math

import numpy as np
import pytest

from bdris_krf import (
    CombinedChannel,
    ExperimentSpec,
    SystemConfig,
    build_training,
    combined_channel,
    generate_channels,
    krf_decouple,
    kron,
    ls_matched_filter,
    nmse,
    reconstruct_combined,
    run_experiment,
    synthesize_rx,
)
from bdris_krf.harness import DEFAULTS

SEED = int(DEFAULTS["seed"])
SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


def report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return f"{name}: {detail}"


def rows_db(rows, method, **keys):
    """The nmse_db of the unique row matching method and the given fields."""
    hits = [
        r
        for r in rows
        if r.method == method and all(getattr(r, k) == v for k, v in keys.items())
    ]
    assert len(hits) == 1, f"expected one row for {method} {keys}, got {len(hits)}"
    return hits[0].nmse_db


@pytest.fixture(scope="module")
def group_sweep_rows():
    # Group sizes 1, 2, 4 over a surface of 16 elements, shortest schedule
    # per cell, full SNR grid.  Shared by the sweep and slope checks.
    base = SystemConfig.create(mt=2, mr=2, n=16, nbar=1)
    spec = ExperimentSpec(
        base=base,
        snr_grid=SNR_GRID,
        sweep_axis="group_size",
        sweep_values=(1, 2, 4),
        trials=300,
        master_seed=SEED,
    )
    return run_experiment(spec, workers=4)


@pytest.fixture(scope="module")
def fixed_budget_rows():
    # Same sweep, but every cell pays the schedule of the largest group
    # size (t = 2 * 16 * 4 = 128) so the training budget is constant.
    base = SystemConfig.create(mt=2, mr=2, n=16, nbar=1, t=128)
    spec = ExperimentSpec(
        base=base,
        snr_grid=(10.0,),
        sweep_axis="group_size",
        sweep_values=(1, 2, 4),
        trials=300,
        master_seed=SEED,
        pilot_length=128,
    )
    return run_experiment(spec, workers=4)


@pytest.fixture(scope="module")
def antenna_sweep_rows():
    # Antenna pairs (1,1) and (4,4) on an 8-element surface with groups of
    # two, both cells on the same 64-slot budget.
    base = SystemConfig.create(mt=1, mr=1, n=8, nbar=2, t=64)
    spec = ExperimentSpec(
        base=base,
        snr_grid=(10.0,),
        sweep_axis="antennas",
        sweep_values=((1, 1), (4, 4)),
        trials=300,
        master_seed=SEED,
        pilot_length=64,
    )
    return run_experiment(spec, workers=2)


def test_training_orthogonality_grid():
    worst_gram = 0.0
    worst_unitary = 0.0
    cases = 0
    for mt, nbar, q in itertools.product((1, 2), (1, 2, 4), (1, 2, 4)):
        cfg = SystemConfig.create(mt=mt, mr=1, n=nbar * q, nbar=nbar)
        td = build_training(cfg)
        gram = td.omega.conj().T @ td.omega
        target = (cfg.t / cfg.nbar) * np.eye(gram.shape[0])
        worst_gram = max(
            worst_gram, np.linalg.norm(gram - target) / np.linalg.norm(target)
        )
        eye = np.eye(nbar)
        for t in range(cfg.t):
            for qi in range(q):
                block = td.s_seq[t, qi]
                err = np.linalg.norm(block.conj().T @ block - eye)
                worst_unitary = max(worst_unitary, err)
        cases += 1
    ok = worst_gram <= 1e-9 and worst_unitary <= 1e-12
    msg = report(
        "orthogonal training",
        ok,
        f"{cases} configs, gram rel err {worst_gram:.2e} (<=1e-9), "
        f"block unitarity err {worst_unitary:.2e} (<=1e-12)",
    )
    assert ok, msg


def test_noise_free_recovery_sweep():
    rng = np.random.default_rng(SEED)
    worst = {"ls": 0.0, "products": 0.0, "recombined": 0.0}
    cases = 0
    for mt, mr, nbar, q in itertools.product((1, 2, 3), (1, 2, 3), (1, 2, 4), (1, 2)):
        cfg = SystemConfig.create(mt=mt, mr=mr, n=nbar * q, nbar=nbar, snr_db=np.inf)
        ch = generate_channels(cfg, rng)
        td = build_training(cfg)
        y = synthesize_rx(cfg, ch, td, rng)
        truth = combined_channel(cfg, ch)
        ls = ls_matched_filter(y, td, cfg)
        ls_combined = CombinedChannel.from_vector(ls.c_hat, cfg)
        worst["ls"] = max(worst["ls"], math.sqrt(nmse(truth, ls_combined)))
        kr = krf_decouple(ls, cfg)
        for qi in range(cfg.q):
            cols = cfg.group_slice(qi)
            want = kron(ch.h[:, cols], ch.g[:, cols])
            got = kron(kr.h_hat[:, cols], kr.g_hat[:, cols])
            rel = np.linalg.norm(got - want) / np.linalg.norm(want)
            worst["products"] = max(worst["products"], rel)
        rec = reconstruct_combined(kr, cfg)
        worst["recombined"] = max(worst["recombined"], math.sqrt(nmse(truth, rec)))
        cases += 1
    ok = all(v <= 1e-8 for v in worst.values())
    msg = report(
        "noise-free recovery",
        ok,
        f"{cases} configs, rel errors ls {worst['ls']:.2e}, group products "
        f"{worst['products']:.2e}, recombined {worst['recombined']:.2e} (<=1e-8)",
    )
    assert ok, msg


def test_ls_noise_level_matches_prediction():
    # At the shortest schedule the filtered-noise level has the closed form
    # sigma^2 / (mt * n); the trial mean must land within half a dB.
    base = SystemConfig.create(mt=2, mr=2, n=16, nbar=2)
    spec = ExperimentSpec(
        base=base,
        snr_grid=(10.0,),
        sweep_axis="group_size",
        sweep_values=(2,),
        trials=500,
        master_seed=SEED,
    )
    rows = run_experiment(spec, workers=2)
    measured = rows_db(rows, "LS", nbar=2)
    predicted = 10.0 * math.log10(0.1 / 32.0)
    delta = measured - predicted
    ok = abs(delta) <= 0.5
    msg = report(
        "analytic LS level",
        ok,
        f"measured {measured:.3f} dB vs predicted {predicted:.3f} dB, "
        f"delta {delta:+.3f} dB (|delta|<=0.5)",
    )
    assert ok, msg


def test_group_size_sweep_shortest_schedule(group_sweep_rows):
    ls = [rows_db(group_sweep_rows, "LS", snr_db=10.0, nbar=b) for b in (1, 2, 4)]
    krf = [rows_db(group_sweep_rows, "KRF", snr_db=10.0, nbar=b) for b in (1, 2, 4)]
    spread = max(ls) - min(ls)
    gain = krf[0] - krf[2]
    ok = spread <= 0.5 and gain >= 1.0
    msg = report(
        "group-size sweep, shortest schedule",
        ok,
        f"LS spread {spread:.3f} dB (<=0.5), KRF gain group 1 -> 4 "
        f"{gain:.3f} dB (>=1.0)",
    )
    assert ok, msg


def test_group_size_sweep_fixed_budget(fixed_budget_rows):
    ls = [rows_db(fixed_budget_rows, "LS", nbar=b) for b in (1, 2, 4)]
    krf = [rows_db(fixed_budget_rows, "KRF", nbar=b) for b in (1, 2, 4)]
    band = max(krf) - min(krf)
    ls_gap = ls[2] - ls[0]
    ok = band <= 1.0 and ls_gap > 0.0
    msg = report(
        "group-size sweep, fixed budget",
        ok,
        f"KRF band {band:.3f} dB (<=1.0), LS group 4 above group 1 by "
        f"{ls_gap:.3f} dB (>0)",
    )
    assert ok, msg


def test_antenna_sweep_fixed_budget(antenna_sweep_rows):
    ls_small = rows_db(antenna_sweep_rows, "LS", mt=1, mr=1)
    ls_large = rows_db(antenna_sweep_rows, "LS", mt=4, mr=4)
    krf_small = rows_db(antenna_sweep_rows, "KRF", mt=1, mr=1)
    krf_large = rows_db(antenna_sweep_rows, "KRF", mt=4, mr=4)
    gain = krf_small - krf_large
    flatness = abs(ls_large - ls_small)
    ok = gain >= 1.0 and flatness <= 0.5
    msg = report(
        "antenna sweep, fixed budget",
        ok,
        f"KRF gain (1,1) -> (4,4) {gain:.3f} dB (>=1.0), LS flatness "
        f"{flatness:.3f} dB (<=0.5)",
    )
    assert ok, msg


def test_ls_error_slope_tracks_snr(group_sweep_rows):
    slopes = []
    for nbar in (1, 2, 4):
        db = [rows_db(group_sweep_rows, "LS", snr_db=s, nbar=nbar) for s in SNR_GRID]
        slopes.append(np.polyfit(SNR_GRID, db, 1)[0])
    worst = max(abs(s + 1.0) for s in slopes)
    ok = worst <= 0.05
    msg = report(
        "LS error slope",
        ok,
        f"slopes {', '.join(f'{s:.4f}' for s in slopes)} dB/dB "
        f"(all within -1 +/- 0.05)",
    )
    assert ok, msg


def test_csv_determinism_across_runs_and_workers(tmp_path):
    base = SystemConfig.create(mt=2, mr=2, n=8, nbar=2)
    paths = [tmp_path / f"run{i}.csv" for i in range(3)]
    blobs = []
    for path, workers in zip(paths, (1, 1, 4)):
        spec = ExperimentSpec(
            base=base,
            snr_grid=(0.0, 10.0),
            sweep_axis="group_size",
            sweep_values=(1, 2),
            trials=30,
            master_seed=SEED,
            output_path=str(path),
        )
        run_experiment(spec, workers=workers)
        blobs.append(path.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    msg = report(
        "deterministic output",
        ok,
        f"{len(blobs[0])} byte CSV identical across repeat run and "
        f"worker counts 1 and 4",
    )
    assert ok, msg
