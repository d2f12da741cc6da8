"""Decoupled channel estimation for group-connected BD-RIS MIMO links."""

from .estimators import (
    KhatriRaoEstimator,
    KrfEstimate,
    LeastSquaresEstimator,
    LsEstimate,
    krf_decouple,
    ls_matched_filter,
    nmse,
    reconstruct_combined,
    resolve_ambiguity,
)
from .harness import ExperimentSpec, ResultRow, emit_csv, run_experiment, run_trial
from .linalg import (
    PermutationMap,
    dft_matrix,
    khatri_rao,
    kron,
    kron_vec_permutation,
    rank_one_approx,
    unvec,
    vec,
    weyl_heisenberg_basis,
)
from .model import (
    ChannelPair,
    CombinedChannel,
    SystemConfig,
    TrainingDesign,
    build_training,
    combined_channel,
    generate_channels,
    synthesize_rx,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelPair",
    "CombinedChannel",
    "ExperimentSpec",
    "KhatriRaoEstimator",
    "KrfEstimate",
    "LeastSquaresEstimator",
    "LsEstimate",
    "PermutationMap",
    "ResultRow",
    "SystemConfig",
    "TrainingDesign",
    "__version__",
    "build_training",
    "combined_channel",
    "dft_matrix",
    "emit_csv",
    "generate_channels",
    "khatri_rao",
    "kron",
    "kron_vec_permutation",
    "krf_decouple",
    "ls_matched_filter",
    "nmse",
    "rank_one_approx",
    "reconstruct_combined",
    "resolve_ambiguity",
    "run_experiment",
    "run_trial",
    "synthesize_rx",
    "unvec",
    "vec",
    "weyl_heisenberg_basis",
]
