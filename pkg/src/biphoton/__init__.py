"""Modeling, simulation and reconstruction of two-photon polarization
density matrices for pulsed entangled-pair sources."""

from .states import (
    BASIS_LABELS,
    StateMetrics,
    bell_state,
    compute_metrics,
    concurrence,
    fidelity,
    format_density_matrix,
    ideal_bell,
    linear_entropy,
    parse_density_matrix,
    purity,
    tangle,
    totally_mixed,
    validate,
    werner,
    werner_fit,
)
from .tomography import (
    CANONICAL_LABELS,
    CountVector,
    canonical_projection_set,
    expected_probabilities,
    linear_reconstruct,
    mle_reconstruct,
    simulate_counts,
)
from .multipair import (
    MonteCarloRates,
    PowerCalibration,
    RateTriple,
    SourceParams,
    background_g,
    class_prob_primed,
    class_prob_unprimed,
    effective_density_matrix,
    effective_g,
    g_vs_power_curve,
    monte_carlo_rates,
    pair_split_weight,
    poisson_pmf,
    projection_probabilities_16,
    rates_primed,
    rates_unprimed,
)
from . import errors, pipeline

__version__ = "0.1.0"

__all__ = [
    "BASIS_LABELS",
    "CANONICAL_LABELS",
    "CountVector",
    "MonteCarloRates",
    "PowerCalibration",
    "RateTriple",
    "SourceParams",
    "StateMetrics",
    "background_g",
    "bell_state",
    "canonical_projection_set",
    "class_prob_primed",
    "class_prob_unprimed",
    "compute_metrics",
    "concurrence",
    "effective_density_matrix",
    "effective_g",
    "errors",
    "expected_probabilities",
    "fidelity",
    "format_density_matrix",
    "g_vs_power_curve",
    "ideal_bell",
    "linear_entropy",
    "linear_reconstruct",
    "mle_reconstruct",
    "monte_carlo_rates",
    "pair_split_weight",
    "parse_density_matrix",
    "pipeline",
    "poisson_pmf",
    "projection_probabilities_16",
    "purity",
    "rates_primed",
    "rates_unprimed",
    "simulate_counts",
    "tangle",
    "totally_mixed",
    "validate",
    "werner",
    "werner_fit",
]
