"""Bell correlations, hidden-variable models and moment feasibility."""

from ._bellrv import (
    CapExceeded,
    Error,
    InvalidArgument,
    Marginal,
    NonCommuting,
    NonHermitian,
    check_feasibility,
    chsh_value,
    cosine_correlation,
    gram_matrix,
    max_chsh,
    mc_correlation,
    quantum_correlation,
    quantum_targets,
    run_cli,
    scalar_sign_correlation,
    spectral_representation,
    triple_correlation,
    tsirelson_chsh,
    verify_quantum,
)

__all__ = [
    "CapExceeded",
    "Error",
    "InvalidArgument",
    "Marginal",
    "NonCommuting",
    "NonHermitian",
    "check_feasibility",
    "chsh_value",
    "cosine_correlation",
    "gram_matrix",
    "max_chsh",
    "mc_correlation",
    "quantum_correlation",
    "quantum_targets",
    "run_cli",
    "scalar_sign_correlation",
    "spectral_representation",
    "triple_correlation",
    "tsirelson_chsh",
    "verify_quantum",
]
