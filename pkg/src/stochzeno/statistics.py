"""Closed-form averages of the sequence survival probability.

For i.i.d. intervals drawn from a discrete distribution with atoms
``(mu_k, p_k)`` and single-interval survival ``q_k = q(mu_k)``:

* ensemble average   ``<P> = (sum_k p_k q_k)^m``
* geometric average  ``P_g = prod_k q_k^(m p_k)``  (most probable value)
* arithmetic average ``P_a = sum_k p_k q_k^m``     (fixed-interval sequences)

and ``P_g <= <P> <= P_a``. All three are evaluated from the same per-atom
``ln q_k`` values and stay in log space until the final exponential.

The Zeno parameter ``m <ln q>`` is never positive. The regime test therefore
compares its absolute value against the thresholds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .quantum import log_survival_q
from .validation import check_count, check_duration

STRICT_ZENO = 0.01
LOOSE_ZENO = 0.1


@dataclass(frozen=True)
class SurvivalStatistics:
    geometric: float
    arithmetic: float
    ensemble: float
    zeno_parameter: float
    delta_q: float
    discrepancy: float
    m: int

    def as_dict(self):
        return {
            "m": self.m,
            "geometric": self.geometric,
            "arithmetic": self.arithmetic,
            "ensemble": self.ensemble,
            "zeno_parameter": self.zeno_parameter,
            "delta_q": self.delta_q,
            "discrepancy": self.discrepancy,
        }


def atom_log_q(dist, H, psi0):
    """``ln q(mu_k)`` for every atom of ``dist`` (``-inf`` where ``q = 0``)."""
    return np.atleast_1d(log_survival_q(H, psi0, dist.durations))


def _log_sum_weighted(log_p, log_x):
    terms = log_p + log_x
    if np.all(np.isneginf(terms)):
        return -math.inf
    return float(np.logaddexp.reduce(terms))


def log_ensemble_average(dist, H, psi0, m):
    m = check_count(m, "m")
    return m * _log_sum_weighted(np.log(dist.probabilities), atom_log_q(dist, H, psi0))


def log_geometric_average(dist, H, psi0, m):
    m = check_count(m, "m")
    logq = atom_log_q(dist, H, psi0)
    if np.any(np.isneginf(logq)):
        return -math.inf
    return m * math.fsum(dist.probabilities * logq)


def log_arithmetic_average(dist, H, psi0, m):
    m = check_count(m, "m")
    return _log_sum_weighted(np.log(dist.probabilities), m * atom_log_q(dist, H, psi0))


def ensemble_average(dist, H, psi0, m):
    """Expectation of the sequence survival probability over random sequences."""
    return math.exp(log_ensemble_average(dist, H, psi0, m))


def geometric_average(dist, H, psi0, m):
    """Weighted geometric average ``prod_k q_k^(m p_k)``.

    This is also the most probable value of the survival probability, the
    point where its large-deviation rate function vanishes.
    """
    return math.exp(log_geometric_average(dist, H, psi0, m))


def arithmetic_average(dist, H, psi0, m):
    """Average of ``q(mu)^m`` over ``mu`` drawn once and held fixed."""
    return math.exp(log_arithmetic_average(dist, H, psi0, m))


def zeno_parameter(dist, H, psi0, m):
    """Signed ``m * sum_k p_k ln q_k``; ``-inf`` if any weighted atom has ``q = 0``."""
    return log_geometric_average(dist, H, psi0, m)


def classify_zeno(zeno, strict=STRICT_ZENO, loose=LOOSE_ZENO):
    """Return ``"strict"``, ``"loose"`` or ``"outside"`` for a Zeno parameter value."""
    size = abs(zeno)
    if size <= strict:
        return "strict"
    if size <= loose:
        return "loose"
    return "outside"


def delta_q_exact(dist, H, psi0, m):
    """``ln P_a - ln P_g``, the log gap between arithmetic and geometric averages."""
    log_g = log_geometric_average(dist, H, psi0, m)
    if log_g == -math.inf:
        raise ValidationError("delta_q is undefined when the geometric average is zero")
    # Jensen guarantees >= 0; clip rounding noise at the degenerate end
    return max(0.0, log_arithmetic_average(dist, H, psi0, m) - log_g)


def discrepancy(dist, H, psi0, m):
    """Normalized gap ``(P_a - P_g) / P_a``, computed as ``1 - exp(-delta_q)``."""
    log_a = log_arithmetic_average(dist, H, psi0, m)
    if log_a == -math.inf:
        raise ValidationError("discrepancy is undefined when the arithmetic average is zero")
    return -math.expm1(-delta_q_exact(dist, H, psi0, m))


def delta_q_fourth_order(moments, dist, m):
    """Leading small-interval term ``(m^2/2) (Var H)^2 (nu4 - nu2^2)`` of delta_q."""
    m = check_count(m, "m")
    spread = max(0.0, dist.nu4 - dist.nu2**2)
    return 0.5 * m * m * moments.variance**2 * spread


def series_q_m(moments, mu, m):
    """Fourth-order small-``mu`` expansion of ``q(mu)^m``."""
    mu = check_duration(mu)
    m = check_count(m, "m")
    var = moments.variance
    quartic = (m / 12.0) * (moments.kurtosis + 3.0 * (2 * m - 1) * var**2)
    return 1.0 - m * var * mu**2 + quartic * mu**4


def series_ln_q_m(moments, mu, m):
    """Fourth-order small-``mu`` expansion of ``m ln q(mu)``."""
    mu = check_duration(mu)
    m = check_count(m, "m")
    var = moments.variance
    quartic = (m / 12.0) * (moments.kurtosis - 3.0 * var**2)
    return -m * var * mu**2 + quartic * mu**4


def survival_statistics(dist, H, psi0, m):
    """Bundle the three averages, the Zeno parameter, delta_q and D."""
    m = check_count(m, "m")
    log_g = log_geometric_average(dist, H, psi0, m)
    log_a = log_arithmetic_average(dist, H, psi0, m)
    log_e = log_ensemble_average(dist, H, psi0, m)
    if log_g == -math.inf:
        raise ValidationError("survival statistics undefined: an atom with positive weight has q = 0")
    delta_q = max(0.0, log_a - log_g)
    return SurvivalStatistics(
        geometric=math.exp(log_g),
        arithmetic=math.exp(log_a),
        ensemble=math.exp(log_e),
        zeno_parameter=log_g,
        delta_q=delta_q,
        discrepancy=-math.expm1(-delta_q),
        m=m,
    )
