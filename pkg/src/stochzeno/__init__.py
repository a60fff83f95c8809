"""Quantum systems under projective measurements at random times.

Survival probabilities of measurement sequences, their geometric, ensemble
and arithmetic averages, the Zeno regime in which these coincide, and the
large-deviation law of the survival probability for two-valued waiting times.
"""

__version__ = "0.1.0"

from .exceptions import ConfigError, DegenerateLawError, ValidationError
from .intervals import (
    IntervalDistribution,
    MeasurementSequence,
    make_bimodal,
    run_generator,
    sample_sequence,
)
from .large_deviation import (
    BimodalLawParameters,
    SurvivalHistogram,
    bimodal_law,
    build_histogram,
    empirical_rate_function,
    exact_prob_k,
    gaussian_prob_P,
    k_of_P,
)
from .montecarlo import EnsembleResult, enumerate_sequences, run_ensemble
from .quantum import (
    HamiltonianMoments,
    HermitianOperator,
    StateVector,
    basis_state,
    hamiltonian_moments,
    propagate,
    rabi_hamiltonian,
    sequence_survival,
    survival_q,
)
from .statistics import (
    SurvivalStatistics,
    arithmetic_average,
    delta_q_exact,
    delta_q_fourth_order,
    discrepancy,
    ensemble_average,
    geometric_average,
    series_ln_q_m,
    series_q_m,
    survival_statistics,
    zeno_parameter,
)
from .estimators import SequenceSurvival, SurvivalHistogramEstimator, ZenoAnalyzer
