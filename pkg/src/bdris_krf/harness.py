"""Monte Carlo experiment harness.

Every trial draws its randomness from a stream derived solely from
(master seed, cell configuration, trial index), so results are reproducible
bit for bit regardless of how trials are scheduled across workers.  LS and
KRF always see the same realization within a trial, making every comparison
paired by construction.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimators import krf_decouple, ls_matched_filter, nmse, reconstruct_combined
from .model import (
    CombinedChannel,
    SystemConfig,
    build_training,
    combined_channel,
    generate_channels,
    synthesize_rx,
)

__all__ = [
    "CSV_COLUMNS",
    "ExperimentSpec",
    "ResultRow",
    "SWEEP_AXES",
    "cell_configs",
    "emit_csv",
    "load_config_file",
    "parse_config_text",
    "run_experiment",
    "run_trial",
    "trial_rng",
]

SWEEP_AXES = ("group_size", "pilot_length", "antennas", "ris_elements")
METHODS = ("LS", "KRF")
CSV_COLUMNS = (
    "snr_db",
    "mt",
    "mr",
    "n",
    "nbar",
    "q",
    "t",
    "method",
    "nmse_mean",
    "nmse_db",
    "trials",
    "seed",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a base link, one swept axis, an SNR grid and a trial
    budget.  pilot_length None means the shortest valid schedule per cell."""

    base: SystemConfig
    snr_grid: tuple
    sweep_axis: str = "group_size"
    sweep_values: tuple = ()
    trials: int = 100
    master_seed: int = 0
    pilot_length: int | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.sweep_axis!r}, pick one of {SWEEP_AXES}")
        if not self.snr_grid:
            raise ValueError("snr_grid must not be empty")
        if not self.sweep_values:
            object.__setattr__(self, "sweep_values", self._default_sweep_values())
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be an unsigned 64-bit integer")
        cell_configs(self)  # every cell must define a valid configuration

    def _default_sweep_values(self):
        return {
            "group_size": (self.base.nbar,),
            "pilot_length": (self.base.t,),
            "antennas": ((self.base.mt, self.base.mr),),
            "ris_elements": (self.base.n,),
        }[self.sweep_axis]


def cell_configs(spec):
    """All simulated configurations, sweep-major then SNR, as a flat list."""
    cells = []
    for value in spec.sweep_values:
        for snr in spec.snr_grid:
            cells.append(_resolve_cell(spec, value, snr))
    return cells


def _resolve_cell(spec, value, snr):
    base = spec.base
    mt, mr, n, nbar = base.mt, base.mr, base.n, base.nbar
    t = spec.pilot_length
    if spec.sweep_axis == "group_size":
        nbar = int(value)
    elif spec.sweep_axis == "pilot_length":
        t = int(value)
    elif spec.sweep_axis == "antennas":
        mt, mr = (int(value[0]), int(value[1]))
    elif spec.sweep_axis == "ris_elements":
        n = int(value)
    if n % nbar != 0:
        raise ValueError(f"group size {nbar} does not divide element count {n}")
    cfg = SystemConfig.create(
        mt=mt, mr=mr, n=n, nbar=nbar, t=t, snr_db=float(snr), seed=spec.master_seed
    )
    if cfg.t % cfg.t_min != 0:
        raise ValueError(
            f"t={cfg.t} is not a whole multiple of mt*nbar^2*q={cfg.t_min} "
            f"for sweep value {value!r}"
        )
    return cfg


@dataclass(frozen=True)
class ResultRow:
    """One aggregated CSV row: the configuration plus the linear-scale mean
    NMSE of one method and its dB image."""

    snr_db: float
    mt: int
    mr: int
    n: int
    nbar: int
    q: int
    t: int
    method: str
    nmse_mean: float
    nmse_db: float
    trials: int
    seed: int


def _config_fingerprint(cfg):
    # Stable integer encoding; the SNR float is folded in via its bit pattern.
    snr_bits = int(np.float64(cfg.snr_db).view(np.uint64))
    return (cfg.mt, cfg.mr, cfg.n, cfg.nbar, cfg.q, cfg.t, snr_bits, cfg.seed)


def trial_rng(cfg, trial_index, master_seed):
    """Independent, reproducible random stream for one (cell, trial) pair."""
    entropy = (master_seed, *_config_fingerprint(cfg), trial_index)
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy))


def run_trial(cfg, trial_index, master_seed):
    """One paired draw: returns (nmse_ls, nmse_krf) on a shared realization."""
    rng = trial_rng(cfg, trial_index, master_seed)
    training = build_training(cfg)
    channels = generate_channels(cfg, rng)
    y = synthesize_rx(cfg, channels, training, rng)
    truth = combined_channel(cfg, channels)
    ls = ls_matched_filter(y, training, cfg)
    kr = krf_decouple(ls, cfg)
    nmse_ls = nmse(truth, CombinedChannel.from_vector(ls.c_hat, cfg))
    nmse_krf = nmse(truth, reconstruct_combined(kr, cfg))
    return nmse_ls, nmse_krf


def _run_cell(args):
    cfg, trials, master_seed = args
    ls_vals = np.zeros(trials)
    krf_vals = np.zeros(trials)
    for i in range(trials):
        ls_vals[i], krf_vals[i] = run_trial(cfg, i, master_seed)
    # Mean in linear scale, summed in trial order so the result does not
    # depend on scheduling.
    return float(ls_vals.mean()), float(krf_vals.mean())


def run_experiment(spec, workers=1):
    """Run all cells of spec and return the rows in deterministic order.

    Cells may be dispatched to worker processes; each trial's stream depends
    only on (master_seed, cell, trial index), so any worker count gives
    byte-identical results.  Writes CSV to spec.output_path when set.
    """
    if spec.output_path is not None:
        _check_writable(spec.output_path)
    cells = cell_configs(spec)
    tasks = [(cfg, spec.trials, spec.master_seed) for cfg in cells]
    if workers <= 1:
        means = [_run_cell(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            means = list(pool.map(_run_cell, tasks))
    rows = []
    for cfg, (ls_mean, krf_mean) in zip(cells, means):
        for method, value in zip(METHODS, (ls_mean, krf_mean)):
            rows.append(
                ResultRow(
                    snr_db=cfg.snr_db,
                    mt=cfg.mt,
                    mr=cfg.mr,
                    n=cfg.n,
                    nbar=cfg.nbar,
                    q=cfg.q,
                    t=cfg.t,
                    method=method,
                    nmse_mean=value,
                    nmse_db=_to_db(value),
                    trials=spec.trials,
                    seed=spec.master_seed,
                )
            )
    if spec.output_path is not None:
        emit_csv(rows, spec.output_path)
    return rows


def _to_db(value):
    return 10.0 * math.log10(value) if value > 0.0 else -math.inf


def _check_writable(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK) or (os.path.exists(path) and not os.access(path, os.W_OK)):
        raise OSError(f"output path is not writable: {path}")


def _fmt(value):
    # Shortest representation that round-trips through float().
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows, path):
    """Write rows as UTF-8 CSV with the fixed column set, newline-terminated."""
    if not rows:
        raise ValueError("refusing to write an empty result set")
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, col)) for col in CSV_COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# Flat key=value experiment files.  Values keep their raw string form here;
# build_spec does the typed conversion so CLI overrides share one code path.

CONFIG_KEYS = (
    "mt",
    "mr",
    "n",
    "nbar",
    "t",
    "snr",
    "sweep",
    "sweep_values",
    "trials",
    "seed",
    "out",
    "workers",
)

DEFAULTS = {
    "mt": "2",
    "mr": "2",
    "n": "16",
    "nbar": "1",
    "t": "min",
    "snr": "0,5,10,15,20,25,30",
    "sweep": "group_size",
    "sweep_values": "",
    "trials": "100",
    "seed": "3405691582",
    "out": "",
    "workers": "1",
}


def parse_config_text(text):
    """Parse `key = value` lines; '#' starts a comment, unknown keys fail."""
    options = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        options[key] = value
    return options


def load_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def build_spec(options):
    """Assemble an ExperimentSpec from raw string options (file + overrides)."""
    merged = dict(DEFAULTS)
    merged.update({k: v for k, v in options.items() if v is not None})

    mt = int(merged["mt"])
    mr = int(merged["mr"])
    n = int(merged["n"])
    nbar = int(merged["nbar"])
    sweep = merged["sweep"]
    if sweep not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {sweep!r}, pick one of {SWEEP_AXES}")
    t_raw = merged["t"].strip()
    pilot_length = None if t_raw in ("", "min") else int(t_raw)
    snr_grid = tuple(float(part) for part in _split_list(merged["snr"]))
    if not snr_grid:
        raise ValueError("snr grid must not be empty")

    sweep_values = tuple(
        _parse_sweep_value(sweep, part) for part in _split_list(merged["sweep_values"])
    )
    base_nbar = sweep_values[0] if sweep == "group_size" and sweep_values else nbar
    base = SystemConfig.create(
        mt=mt,
        mr=mr,
        n=n,
        nbar=int(base_nbar),
        t=None,
        snr_db=snr_grid[0],
        seed=int(merged["seed"]),
    )
    return ExperimentSpec(
        base=base,
        snr_grid=snr_grid,
        sweep_axis=sweep,
        sweep_values=sweep_values,
        trials=int(merged["trials"]),
        master_seed=int(merged["seed"]),
        pilot_length=pilot_length,
        output_path=merged["out"] or None,
    ), int(merged["workers"])


def _split_list(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_sweep_value(axis, text):
    if axis == "antennas":
        parts = text.lower().split("x")
        if len(parts) != 2:
            raise ValueError(f"antenna sweep values look like '2x2', got {text!r}")
        return (int(parts[0]), int(parts[1]))
    return int(text)
