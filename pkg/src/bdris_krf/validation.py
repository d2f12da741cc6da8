"""Input validation helpers.

scikit-learn's own check_array rejects complex data outright, so the
estimators here use these lightweight complex-aware checks instead.
"""

import numpy as np

from .model import SystemConfig

__all__ = ["check_config", "check_received_signal", "ensure_complex_vector"]


def check_config(cfg):
    if not isinstance(cfg, SystemConfig):
        raise TypeError(f"expected a SystemConfig, got {type(cfg).__name__}")
    return cfg


def ensure_complex_vector(v, length, name="y"):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if v.size != length:
        raise ValueError(f"{name} must have length {length}, got {v.size}")
    return v


def check_received_signal(y, cfg):
    """Coerce a received training signal to the stacked length mr*t vector.

    Accepts either the stacked vector itself or an (mr, t) matrix whose
    columns are the per-slot observations.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim == 2:
        if y.shape != (cfg.mr, cfg.t):
            raise ValueError(
                f"received matrix has shape {y.shape}, expected {(cfg.mr, cfg.t)}"
            )
        return y.reshape(-1, order="F")
    return ensure_complex_vector(y, cfg.mr * cfg.t, name="received signal")
