"""scikit-learn compatible wrappers.

``X`` is always a matrix of interval sequences in seconds, one sequence per
row, or a column of survival probabilities for :class:`SurvivalHistogramEstimator`.
Constructor arguments are stored untouched so ``get_params``/``clone`` work.
Validation and conversion happen in ``fit``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .intervals import IntervalDistribution
from .large_deviation import build_histogram, empirical_rate_function
from .quantum import check_system, hamiltonian_moments, log_survival_q
from .statistics import (
    LOOSE_ZENO,
    STRICT_ZENO,
    classify_zeno,
    delta_q_fourth_order,
    survival_statistics,
)
from .validation import check_count, check_durations


def _check_intervals(X, estimator):
    X = check_array(X, dtype=np.float64, ensure_min_features=1, estimator=estimator)
    return check_durations(X, "X", ndim=2)


class SequenceSurvival(TransformerMixin, BaseEstimator):
    """Map each row of intervals to the survival probability of that sequence.

    Parameters
    ----------
    hamiltonian : HermitianOperator or array-like
        Generator of the free evolution, in rad/s.
    initial_state : StateVector or array-like
        Measured state; also the projector of every measurement.
    log : bool, default=False
        Return ``ln P`` instead of ``P``.
    """

    def __init__(self, hamiltonian, initial_state, log=False):
        self.hamiltonian = hamiltonian
        self.initial_state = initial_state
        self.log = log

    def fit(self, X, y=None):
        X = _check_intervals(X, self)
        self.hamiltonian_, self.initial_state_ = check_system(self.hamiltonian, self.initial_state)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "hamiltonian_")
        X = _check_intervals(X, self)
        values, inverse = np.unique(X, return_inverse=True)
        logq = log_survival_q(self.hamiltonian_, self.initial_state_, values)
        logP = logq[inverse.reshape(X.shape)].sum(axis=1, keepdims=True)
        return logP if self.log else np.exp(logP)


class ZenoAnalyzer(BaseEstimator):
    """Fit the waiting-time law from observed sequences and report the averages.

    The pooled intervals of ``X`` define an empirical distribution; ``m``
    defaults to the sequence length ``X.shape[1]``.

    Attributes
    ----------
    distribution_ : IntervalDistribution
    statistics_ : SurvivalStatistics
    moments_ : HamiltonianMoments
    delta_q_fourth_order_ : float
    regime_ : {"strict", "loose", "outside"}
    """

    def __init__(self, hamiltonian, initial_state, m=None, strict=STRICT_ZENO, loose=LOOSE_ZENO):
        self.hamiltonian = hamiltonian
        self.initial_state = initial_state
        self.m = m
        self.strict = strict
        self.loose = loose

    def fit(self, X, y=None):
        X = _check_intervals(X, self)
        return self.fit_distribution(IntervalDistribution.from_samples(X), m=self.m or X.shape[1])

    def fit_distribution(self, distribution, m=None):
        """Fit from a known :class:`IntervalDistribution` instead of samples."""
        H, psi0 = check_system(self.hamiltonian, self.initial_state)
        m = check_count(m if m is not None else (self.m or 100), "m")
        self.distribution_ = distribution
        self.m_ = m
        self.statistics_ = survival_statistics(distribution, H, psi0, m)
        self.moments_ = hamiltonian_moments(H, psi0)
        self.delta_q_fourth_order_ = delta_q_fourth_order(self.moments_, distribution, m)
        self.regime_ = classify_zeno(self.statistics_.zeno_parameter, self.strict, self.loose)
        self._transformer = SequenceSurvival(H, psi0).fit(np.zeros((1, 1)))
        return self

    def predict(self, X):
        """Survival probability of each row of intervals."""
        check_is_fitted(self, "statistics_")
        return self._transformer.transform(X).ravel()


class SurvivalHistogramEstimator(BaseEstimator):
    """Histogram and empirical rate function of sampled survival probabilities.

    Parameters
    ----------
    m : int
        Measurements per sequence; sets the scale of ``J = -ln(freq) / m``.
    bins : int or str, default="sigma"
    scale : {"log", "linear"}, default="log"
    """

    def __init__(self, m=100, bins="sigma", scale="log"):
        self.m = m
        self.bins = bins
        self.scale = scale

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_2d=False, estimator=self).ravel()
        self.histogram_ = build_histogram(X, bins=self.bins, scale=self.scale)
        self.rate_function_ = empirical_rate_function(self.histogram_, self.m)
        self.mode_bin_ = self.histogram_.mode_bin()
        self.n_samples_ = X.size
        return self

    def score_samples(self, X):
        """Log relative frequency of the bin each value falls in (``-inf`` if empty)."""
        check_is_fitted(self, "histogram_")
        X = check_array(X, dtype=np.float64, ensure_2d=False, estimator=self).ravel()
        freq = self.histogram_.frequencies
        idx = [self.histogram_.bin_index(x) for x in X]
        with np.errstate(divide="ignore"):
            return np.log(freq[idx])
