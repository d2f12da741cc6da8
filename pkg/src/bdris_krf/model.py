"""System model for a group-connected beyond-diagonal RIS MIMO link.

The surface has N elements split into Q groups of size nbar.  During slot t
the transmitter sends pilot x_t while each group applies a unitary nbar-by-nbar
scattering block, so the receiver sees the sum of the per-group cascades
G_q S_tq H_q^T x_t plus noise.  Channels are drawn i.i.d. circularly-symmetric
complex Gaussian with unit variance per entry.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import dft_matrix, khatri_rao, kron, vec, weyl_heisenberg_basis

__all__ = [
    "ChannelPair",
    "CombinedChannel",
    "SystemConfig",
    "TrainingDesign",
    "build_training",
    "combined_channel",
    "generate_channels",
    "synthesize_rx",
]


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and operating point of one simulated link.

    mt/mr are transmit/receive antenna counts, n the number of RIS elements,
    nbar the group size, q the group count (n == nbar * q), t the number of
    training slots and snr_db the operating SNR (math.inf means noise-free).
    """

    mt: int
    mr: int
    n: int
    nbar: int
    q: int
    t: int
    snr_db: float = 10.0
    seed: int = 0

    def __post_init__(self):
        for name in ("mt", "mr", "n", "nbar", "q", "t"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.n != self.nbar * self.q:
            raise ValueError(
                f"n must equal nbar * q, got n={self.n}, nbar={self.nbar}, q={self.q}"
            )
        if self.t < self.t_min:
            raise ValueError(
                f"t={self.t} is below the identifiability floor mt*nbar^2*q={self.t_min}"
            )
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"snr_db must be finite or +inf, got {self.snr_db}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @classmethod
    def create(cls, mt, mr, n, nbar, t=None, snr_db=10.0, seed=0):
        """Build a config from element count and group size; t=None picks the
        shortest training length mt * nbar^2 * q."""
        if n % nbar != 0:
            raise ValueError(f"nbar={nbar} does not divide n={n}")
        q = n // nbar
        if t is None:
            t = mt * nbar**2 * q
        return cls(mt=mt, mr=mr, n=n, nbar=nbar, q=q, t=t, snr_db=snr_db, seed=seed)

    @property
    def t_min(self):
        return self.mt * self.nbar**2 * self.q

    @property
    def noise_variance(self):
        """Per-entry complex noise variance; exactly 0 at snr_db = +inf."""
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def combined_length(self):
        return self.mr * self.mt * self.nbar**2 * self.q

    def group_slice(self, q):
        """Column range of group q inside the full n-column channel matrices."""
        return slice(q * self.nbar, (q + 1) * self.nbar)


@dataclass(frozen=True, eq=False)
class ChannelPair:
    """Transmitter-to-surface channel h (mt x n) and surface-to-receiver
    channel g (mr x n)."""

    h: np.ndarray
    g: np.ndarray


@dataclass(frozen=True, eq=False)
class TrainingDesign:
    """One training schedule: pilots, per-slot scattering blocks and the
    combined pilot matrix omega used by the matched filter.

    x is mt x t, s_seq is (t, q, nbar, nbar), s_bar stacks the vectorized
    blocks per slot (nbar^2*q x t) and omega = khatri_rao(s_bar, x)^T with
    shape t x (mt*nbar^2*q).  For the designs built here omega^H omega is
    exactly (t/nbar) * I.
    """

    x: np.ndarray
    s_seq: np.ndarray
    s_bar: np.ndarray
    omega: np.ndarray


@dataclass(frozen=True, eq=False)
class CombinedChannel:
    """The Kronecker-structured cascade the matched filter estimates.

    c stacks vec(kron(H_q, G_q)) over groups; c_matrix is the same data as an
    (mr*mt) x (nbar^2*q) matrix used for error reporting.
    """

    c: np.ndarray
    c_matrix: np.ndarray

    @classmethod
    def from_vector(cls, c, cfg):
        c = np.asarray(c)
        if c.shape != (cfg.combined_length,):
            raise ValueError(
                f"expected combined vector of length {cfg.combined_length}, got {c.shape}"
            )
        return cls(c=c, c_matrix=c.reshape(cfg.mr * cfg.mt, cfg.nbar**2 * cfg.q, order="F"))


def generate_channels(cfg, rng):
    """Draw an i.i.d. CN(0, 1) channel pair for cfg from rng."""
    shape_h = (cfg.mt, cfg.n)
    shape_g = (cfg.mr, cfg.n)
    h = (rng.standard_normal(shape_h) + 1j * rng.standard_normal(shape_h)) / np.sqrt(2)
    g = (rng.standard_normal(shape_g) + 1j * rng.standard_normal(shape_g)) / np.sqrt(2)
    return ChannelPair(h=h, g=g)


def build_training(cfg):
    """Deterministic orthogonal training design for cfg.

    The shortest schedule enumerates all (pilot column m, group phase g,
    shift p, modulation k) combinations: slot t sends DFT pilot column m
    while group q' applies exp(-2i*pi*q'*g/Q) times the shift-and-modulate
    unitary indexed by (k, p).  The Gram matrix omega^H omega then factors
    into three separate orthogonality sums (group phases, basis matrices,
    pilot columns) and equals (t/nbar) * I exactly.  Longer schedules repeat
    the shortest one a whole number of times.
    """
    if cfg.t % cfg.t_min != 0:
        raise ValueError(
            f"t={cfg.t} must be a whole multiple of mt*nbar^2*q={cfg.t_min}"
        )
    design = _build_minimal_design(cfg.mt, cfg.nbar, cfg.q)
    reps = cfg.t // cfg.t_min
    if reps == 1:
        return design
    return TrainingDesign(
        x=np.tile(design.x, (1, reps)),
        s_seq=np.tile(design.s_seq, (reps, 1, 1, 1)),
        s_bar=np.tile(design.s_bar, (1, reps)),
        omega=np.tile(design.omega, (reps, 1)),
    )


@lru_cache(maxsize=32)
def _build_minimal_design(mt, nbar, q):
    t_min = mt * nbar**2 * q
    f_pilot = dft_matrix(mt)
    basis = weyl_heisenberg_basis(nbar)
    omega_q = np.exp(-2j * np.pi / q)

    # Slot index decomposition: t = ((m*q + g)*nbar + p)*nbar + k.
    slots = np.arange(t_min)
    k_idx = slots % nbar
    p_idx = (slots // nbar) % nbar
    g_idx = (slots // nbar**2) % q
    m_idx = slots // (nbar**2 * q)

    x = f_pilot[:, m_idx]

    basis_vecs = np.stack([vec(u) for u in basis], axis=1)  # (nbar^2, nbar^2)
    slot_basis = basis_vecs[:, p_idx * nbar + k_idx]  # (nbar^2, t)
    group_phase = omega_q ** np.outer(np.arange(q), g_idx)  # (q, t)
    s_bar = (group_phase[:, None, :] * slot_basis[None, :, :]).reshape(q * nbar**2, t_min)

    # Rows of s_bar decompose as q'*nbar^2 + (b*nbar + n) with n fastest.
    s_seq = np.transpose(s_bar.reshape(nbar, nbar, q, t_min, order="F"), (3, 2, 0, 1))

    omega = khatri_rao(s_bar, x).T

    for arr in (x, s_bar, s_seq, omega):
        arr.setflags(write=False)
    return TrainingDesign(x=x, s_seq=s_seq, s_bar=s_bar, omega=omega)


def synthesize_rx(cfg, channels, training, rng):
    """Received training signal, stacked slot by slot into one vector.

    Per slot, y_t = sum_q G_q S_tq H_q^T x_t plus circularly-symmetric noise
    of per-entry variance 10^(-snr_db/10); the slot vectors are concatenated
    into a length mr*t output.
    """
    h_blocks = _as_group_blocks(channels.h, cfg, "h", cfg.mt)
    g_blocks = _as_group_blocks(channels.g, cfg, "g", cfg.mr)
    if training.x.shape != (cfg.mt, cfg.t):
        raise ValueError(f"training pilots have shape {training.x.shape}, expected {(cfg.mt, cfg.t)}")
    if training.s_seq.shape != (cfg.t, cfg.q, cfg.nbar, cfg.nbar):
        raise ValueError(
            f"scattering schedule has shape {training.s_seq.shape}, "
            f"expected {(cfg.t, cfg.q, cfg.nbar, cfg.nbar)}"
        )
    # y[a, t] = sum_{q, n, b, m} G[q, a, n] S[t, q, n, b] H[q, m, b] X[m, t]
    hx = np.einsum("qmb,mt->qbt", h_blocks, training.x)
    shx = np.einsum("tqnb,qbt->qnt", training.s_seq, hx)
    y_mat = np.einsum("qan,qnt->at", g_blocks, shx)
    sigma2 = cfg.noise_variance
    if sigma2 > 0.0:
        scale = np.sqrt(sigma2 / 2.0)
        noise_shape = (cfg.mr, cfg.t)
        y_mat = y_mat + scale * (
            rng.standard_normal(noise_shape) + 1j * rng.standard_normal(noise_shape)
        )
    return y_mat.reshape(-1, order="F")


def _as_group_blocks(mat, cfg, name, rows):
    mat = np.asarray(mat)
    if mat.shape != (rows, cfg.n):
        raise ValueError(f"channel {name} has shape {mat.shape}, expected {(rows, cfg.n)}")
    # Column index is q*nbar + b, so the within-group offset varies fastest.
    return np.transpose(mat.reshape(rows, cfg.nbar, cfg.q, order="F"), (2, 0, 1))


def combined_channel(cfg, channels):
    """Stack vec(kron(H_q, G_q)) over the groups of a channel pair."""
    h = np.asarray(channels.h)
    g = np.asarray(channels.g)
    if h.shape != (cfg.mt, cfg.n):
        raise ValueError(f"channel h has shape {h.shape}, expected {(cfg.mt, cfg.n)}")
    if g.shape != (cfg.mr, cfg.n):
        raise ValueError(f"channel g has shape {g.shape}, expected {(cfg.mr, cfg.n)}")
    blocks = []
    for qi in range(cfg.q):
        cols = cfg.group_slice(qi)
        blocks.append(vec(kron(h[:, cols], g[:, cols])))
    return CombinedChannel.from_vector(np.concatenate(blocks), cfg)
