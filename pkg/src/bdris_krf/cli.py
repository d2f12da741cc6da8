"""Command line front end: `bdris-krf run` and `bdris-krf verify`."""

import argparse
import math
import sys

import numpy as np

from .estimators import krf_decouple, ls_matched_filter, reconstruct_combined
from .harness import build_spec, load_config_file, run_experiment
from .model import (
    SystemConfig,
    build_training,
    combined_channel,
    generate_channels,
    synthesize_rx,
)

FULL_SCALE = {
    "n": "128",
    "mt": "2",
    "mr": "2",
    "t": "min",
    "sweep": "group_size",
    "sweep_values": "1,2,4,8",
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bdris-krf",
        description="Monte Carlo NMSE experiments for decoupled BD-RIS channel estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment sweep and emit CSV")
    run_p.add_argument("--config", help="flat key=value experiment file")
    run_p.add_argument("--snr", help="comma-separated SNR grid in dB (inf allowed)")
    run_p.add_argument("--n", help="number of RIS elements")
    run_p.add_argument("--nbar", help="comma-separated group sizes to sweep")
    run_p.add_argument("--mt", help="transmit antennas")
    run_p.add_argument("--mr", help="receive antennas")
    run_p.add_argument("--t", help="training slots, an integer or 'min'")
    run_p.add_argument("--trials", help="Monte Carlo trials per cell")
    run_p.add_argument("--seed", help="master seed (unsigned 64-bit)")
    run_p.add_argument("--out", help="output CSV path")
    run_p.add_argument("--workers", help="worker processes (default 1)")
    run_p.add_argument(
        "--full-scale",
        action="store_true",
        help="preset for the full-size sweep (n=128, group sizes 1,2,4,8)",
    )

    sub.add_parser("verify", help="self-check training orthogonality and noise-free recovery")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_verify()
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _cmd_run(args):
    options = {}
    if args.config:
        options.update(load_config_file(args.config))
    if args.full_scale:
        options.update(FULL_SCALE)
    for key in ("snr", "n", "mt", "mr", "t", "trials", "seed", "out", "workers"):
        value = getattr(args, key)
        if value is not None:
            options[key] = value
    if args.nbar is not None:
        options["sweep"] = "group_size"
        options["sweep_values"] = args.nbar

    spec, workers = build_spec(options)
    rows = run_experiment(spec, workers=workers)
    for row in rows:
        print(
            f"snr={row.snr_db:g} nbar={row.nbar} mt={row.mt} mr={row.mr} t={row.t} "
            f"{row.method}: nmse={row.nmse_mean:.6e} ({row.nmse_db:.2f} dB)"
        )
    if spec.output_path:
        print(f"wrote {len(rows)} rows to {spec.output_path}")
    return 0


def _cmd_verify():
    failures = 0

    for mt in (1, 2):
        for nbar in (1, 2, 4):
            for q in (1, 2, 4):
                cfg = SystemConfig.create(mt=mt, mr=1, n=nbar * q, nbar=nbar)
                td = build_training(cfg)
                gram = td.omega.conj().T @ td.omega
                target = (cfg.t / cfg.nbar) * np.eye(gram.shape[0])
                gram_err = np.linalg.norm(gram - target) / np.linalg.norm(target)
                unit_err = max(
                    np.abs(td.s_seq[t_i, q_i].conj().T @ td.s_seq[t_i, q_i] - np.eye(nbar)).max()
                    for t_i in range(cfg.t)
                    for q_i in range(q)
                )
                ok = gram_err <= 1e-9 and unit_err <= 1e-12
                failures += not ok
                print(
                    f"{'ok' if ok else 'FAIL'}: orthogonal design mt={mt} nbar={nbar} q={q} "
                    f"(gram err {gram_err:.2e}, unitarity err {unit_err:.2e})"
                )

    for mt in (1, 2):
        for mr in (1, 2):
            for nbar in (1, 2):
                for q in (1, 2):
                    cfg = SystemConfig.create(
                        mt=mt, mr=mr, n=nbar * q, nbar=nbar, snr_db=math.inf
                    )
                    rng = np.random.default_rng(2**32 + 17)
                    ch = generate_channels(cfg, rng)
                    td = build_training(cfg)
                    y = synthesize_rx(cfg, ch, td, rng)
                    truth = combined_channel(cfg, ch)
                    ls = ls_matched_filter(y, td, cfg)
                    rec = reconstruct_combined(krf_decouple(ls, cfg), cfg)
                    scale = np.linalg.norm(truth.c)
                    ls_err = np.linalg.norm(ls.c_hat - truth.c) / scale
                    krf_err = np.linalg.norm(rec.c - truth.c) / scale
                    ok = ls_err <= 1e-8 and krf_err <= 1e-8
                    failures += not ok
                    print(
                        f"{'ok' if ok else 'FAIL'}: noise-free recovery mt={mt} mr={mr} "
                        f"nbar={nbar} q={q} (ls err {ls_err:.2e}, krf err {krf_err:.2e})"
                    )

    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
