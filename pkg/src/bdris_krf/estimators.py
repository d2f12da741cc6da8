"""Channel estimators: matched-filter least squares and its Khatri-Rao
factorization refinement.

The functional core (ls_matched_filter, krf_decouple, reconstruct_combined,
nmse, resolve_ambiguity) does the work; the estimator classes at the bottom
wrap it behind the scikit-learn fit/attributes convention.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .linalg import kron_vec_permutation, rank_one_approx, unvec, vec
from .model import ChannelPair, CombinedChannel, build_training, combined_channel
from .validation import check_config, check_received_signal

__all__ = [
    "KhatriRaoEstimator",
    "KrfEstimate",
    "LeastSquaresEstimator",
    "LsEstimate",
    "krf_decouple",
    "ls_matched_filter",
    "nmse",
    "reconstruct_combined",
    "resolve_ambiguity",
]


@dataclass(frozen=True, eq=False)
class LsEstimate:
    """Matched-filter estimate of the stacked combined channel."""

    c_hat: np.ndarray


@dataclass(frozen=True, eq=False)
class KrfEstimate:
    """Decoupled factor estimates: h_hat (mt x n), g_hat (mr x n) and the
    per-group singular values of the rearranged rank-one fits."""

    h_hat: np.ndarray
    g_hat: np.ndarray
    sigmas: np.ndarray


def ls_matched_filter(y, training, cfg):
    """Least-squares estimate of the combined channel from one training pass.

    With the orthogonal designs used here the normal equations collapse to a
    matched filter: scale the correlation of the received block with the
    combined pilot matrix by nbar/t.  The Kronecker identity lets this run on
    the mr x t received matrix directly, so the big mr*t square system is
    never materialized.
    """
    check_config(cfg)
    y = check_received_signal(y, cfg)
    y_mat = unvec(y, cfg.mr, cfg.t)
    c_hat = (cfg.nbar / cfg.t) * vec(y_mat @ np.conj(training.omega))
    return LsEstimate(c_hat=c_hat)


def krf_decouple(ls, cfg):
    """Split the combined-channel estimate into per-group factor estimates.

    Column q of the reshaped estimate approximates vec(kron(H_q, G_q)).
    Rearranging it with the Kronecker-vec permutation turns it into a vector
    whose matricization is the rank-one outer product vec(G_q) vec(H_q)^T,
    so a dominant singular triplet per group recovers both factors up to one
    complex scalar; the square-root split of the singular value fixes their
    scale product.
    """
    check_config(cfg)
    c_hat = np.asarray(ls.c_hat)
    if c_hat.shape != (cfg.combined_length,):
        raise ValueError(
            f"combined estimate has shape {c_hat.shape}, expected ({cfg.combined_length},)"
        )
    block = cfg.mr * cfg.mt * cfg.nbar**2
    perm = kron_vec_permutation(cfg.mt, cfg.mr, cfg.nbar)
    c_cols = unvec(c_hat, block, cfg.q)

    h_hat = np.zeros((cfg.mt, cfg.n), dtype=np.complex128)
    g_hat = np.zeros((cfg.mr, cfg.n), dtype=np.complex128)
    sigmas = np.zeros(cfg.q)
    for qi in range(cfg.q):
        rearranged = perm.apply(c_cols[:, qi])
        outer = unvec(rearranged, cfg.mr * cfg.nbar, cfg.mt * cfg.nbar)
        sigma, u, v = rank_one_approx(outer)
        scale = np.sqrt(sigma)
        cols = cfg.group_slice(qi)
        g_hat[:, cols] = unvec(scale * u, cfg.mr, cfg.nbar)
        h_hat[:, cols] = unvec(scale * np.conj(v), cfg.mt, cfg.nbar)
        sigmas[qi] = sigma
    return KrfEstimate(h_hat=h_hat, g_hat=g_hat, sigmas=sigmas)


def reconstruct_combined(kr, cfg):
    """Recombine decoupled factors into the combined-channel form; the
    per-group scalar ambiguity cancels exactly in the Kronecker product."""
    check_config(cfg)
    return combined_channel(cfg, ChannelPair(h=kr.h_hat, g=kr.g_hat))


def nmse(truth, estimate):
    """Squared-error ratio ||truth - estimate||^2 / ||truth||^2."""
    c_true = np.asarray(truth.c)
    c_est = np.asarray(estimate.c)
    if c_true.shape != c_est.shape:
        raise ValueError(f"shape mismatch: {c_true.shape} vs {c_est.shape}")
    denom = np.linalg.norm(c_true) ** 2
    if denom == 0.0:
        raise ValueError("truth has zero norm, NMSE undefined")
    return float(np.linalg.norm(c_true - c_est) ** 2 / denom)


def resolve_ambiguity(truth, kr):
    """Align decoupled factors with a reference pair group by group.

    The factorization determines each (H_q, G_q) only up to one complex
    scalar.  Projecting the estimated receive factor onto the true one gives
    that scalar; dividing/multiplying it out makes the factors directly
    comparable.  Returns (h_aligned, g_aligned, lambdas).
    """
    h_hat = np.asarray(kr.h_hat)
    g_hat = np.asarray(kr.g_hat)
    n = h_hat.shape[1]
    q = np.asarray(kr.sigmas).size
    nbar = n // q
    h_aligned = np.zeros_like(h_hat)
    g_aligned = np.zeros_like(g_hat)
    lambdas = np.zeros(q, dtype=np.complex128)
    for qi in range(q):
        cols = slice(qi * nbar, (qi + 1) * nbar)
        g_true = vec(np.asarray(truth.g)[:, cols])
        norm2 = np.linalg.norm(g_true) ** 2
        if norm2 == 0.0:
            raise ValueError(f"true receive factor of group {qi} is zero, cannot align")
        lam = np.vdot(g_true, vec(g_hat[:, cols])) / norm2
        if lam == 0.0:
            raise ValueError(f"estimated receive factor of group {qi} is orthogonal to truth")
        lambdas[qi] = lam
        g_aligned[:, cols] = g_hat[:, cols] / lam
        h_aligned[:, cols] = h_hat[:, cols] * lam
    return h_aligned, g_aligned, lambdas


class LeastSquaresEstimator(BaseEstimator):
    """Matched-filter combined-channel estimator with a scikit-learn surface.

    Parameters
    ----------
    config : SystemConfig
        Link dimensions and training length.
    training : TrainingDesign, optional
        Precomputed schedule; built from config when omitted.
    """

    def __init__(self, config=None, training=None):
        self.config = config
        self.training = training

    def _setup(self):
        cfg = check_config(self.config)
        training = self.training if self.training is not None else build_training(cfg)
        return cfg, training

    def fit(self, y):
        """Estimate the combined channel from a received training signal."""
        cfg, training = self._setup()
        self.training_ = training
        self.c_hat_ = ls_matched_filter(y, training, cfg).c_hat
        self.combined_ = CombinedChannel.from_vector(self.c_hat_, cfg)
        return self


class KhatriRaoEstimator(LeastSquaresEstimator):
    """Decoupling estimator: matched filter followed by per-group rank-one
    factorization, exposing both the factors and the denoised combination."""

    def fit(self, y):
        cfg, training = self._setup()
        self.training_ = training
        ls = ls_matched_filter(y, training, cfg)
        kr = krf_decouple(ls, cfg)
        self.c_hat_ls_ = ls.c_hat
        self.factors_ = kr
        self.h_hat_ = kr.h_hat
        self.g_hat_ = kr.g_hat
        self.sigmas_ = kr.sigmas
        self.combined_ = reconstruct_combined(kr, cfg)
        self.c_hat_ = self.combined_.c
        return self
