"""Python bindings for the pspin simulator."""

from ._pspin import (
    BudgetError,
    ConfigError,
    DomainError,
    ExponentSet,
    NumericError,
    PatternMatrix,
    __version__,
    d_constant,
    descend,
    energy,
    entropy,
    exponents,
    exponents_from_q,
    ground_state,
    growth_ratio,
    h_constant,
    is_local_min,
    local_minima,
    perturb,
    phi,
    phi_bar,
    psi_norm,
    retrieval_sweep,
    sphere_min_gap,
    threshold_t,
    u_eval,
    verify,
)

__all__ = [
    "BudgetError",
    "ConfigError",
    "DomainError",
    "ExponentSet",
    "NumericError",
    "PatternMatrix",
    "__version__",
    "d_constant",
    "descend",
    "energy",
    "entropy",
    "exponents",
    "exponents_from_q",
    "ground_state",
    "growth_ratio",
    "h_constant",
    "is_local_min",
    "local_minima",
    "perturb",
    "phi",
    "phi_bar",
    "psi_norm",
    "retrieval_sweep",
    "sphere_min_gap",
    "threshold_t",
    "u_eval",
    "verify",
]
