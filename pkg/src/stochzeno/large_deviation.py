"""Distribution of the survival probability for two-atom interval laws.

With intervals ``mu1`` (weight ``p1``) and ``mu2`` (weight ``p2``), a sequence
of ``m`` measurements in which ``mu1`` occurs ``k`` times has survival
probability ``P = q1^k q2^(m-k)``, and ``k`` is binomial. Inverting ``P -> k``
needs ``q1 != q2``.

Two representations of ``Prob(P)`` are offered:

* the exact law, a probability mass on the ``m + 1`` support points, and
* the Gaussian (Stirling) form, a density in ``k`` evaluated at ``k(P)``.

The Gaussian is a density with respect to ``k``, not ``P``. Its values at
integer ``k`` approximate the probability mass of the matching support
point, and that is how they are compared with histograms. No Jacobian to a
density in ``P`` is applied.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateLawError, ValidationError
from .statistics import atom_log_q
from .validation import check_count, check_probability

MAX_SIGMA_BINS = 512


@dataclass(frozen=True)
class BimodalLawParameters:
    """Survival factors ``q1, q2`` with weights ``p1, p2`` over ``m`` measurements."""

    q1: float
    q2: float
    p1: float
    p2: float
    m: int

    def __post_init__(self):
        check_probability(self.q1, "q1", open_low=True)
        check_probability(self.q2, "q2", open_low=True)
        check_probability(self.p1, "p1")
        check_probability(self.p2, "p2")
        check_count(self.m, "m")
        if abs(self.p1 + self.p2 - 1.0) > 1e-12:
            raise ValidationError("p1 + p2 must equal 1")
        if math.log(self.q1) == math.log(self.q2):
            raise DegenerateLawError("q1 == q2: survival probability does not determine k")

    @property
    def log_q1(self):
        return math.log(self.q1)

    @property
    def log_q2(self):
        return math.log(self.q2)

    def log_support(self):
        """``ln P_k = k ln q1 + (m - k) ln q2`` for ``k = 0..m``."""
        k = np.arange(self.m + 1)
        return k * self.log_q1 + (self.m - k) * self.log_q2

    def support(self):
        return np.exp(self.log_support())


def bimodal_law(dist, H, psi0, m):
    """Law parameters for a two-atom distribution (shorter atom first)."""
    if dist.n_atoms != 2:
        raise DegenerateLawError(f"a bimodal law needs exactly 2 atoms, got {dist.n_atoms}")
    logq = atom_log_q(dist, H, psi0)
    if np.any(np.isneginf(logq)):
        raise DegenerateLawError("an atom has q = 0; the law has no finite log support")
    q1, q2 = np.exp(logq)
    p1, p2 = dist.probabilities
    return BimodalLawParameters(float(q1), float(q2), float(p1), float(p2), m)


def k_of_log_P(law, log_P):
    return (log_P - law.m * law.log_q2) / (law.log_q1 - law.log_q2)


def k_of_P(law, P):
    """Number of ``mu1`` intervals that yields survival probability ``P`` (real valued)."""
    P = np.asarray(P, dtype=float)
    if np.any(P <= 0.0) or np.any(P > 1.0):
        raise ValidationError("P must lie in (0, 1]")
    k = k_of_log_P(law, np.log(P))
    return float(k) if k.ndim == 0 else k


def _xlogy(x, y):
    return 0.0 if x == 0 else x * math.log(y)


def log_prob_k(law, k):
    k = check_count(k, "k", minimum=0)
    if k > law.m:
        raise ValidationError(f"k must be in [0, {law.m}], got {k}")
    if (law.p1 == 0.0 and k > 0) or (law.p2 == 0.0 and k < law.m):
        return -math.inf
    log_comb = math.lgamma(law.m + 1) - math.lgamma(k + 1) - math.lgamma(law.m - k + 1)
    return log_comb + _xlogy(k, law.p1) + _xlogy(law.m - k, law.p2)


def exact_prob_k(law, k):
    """Binomial probability that ``mu1`` occurs exactly ``k`` times."""
    return math.exp(log_prob_k(law, k))


def exact_pmf(law):
    """Exact probabilities of the support points ``k = 0..m``."""
    return np.array([exact_prob_k(law, k) for k in range(law.m + 1)])


def _gaussian_width(law):
    var = law.m * law.p1 * law.p2
    if var <= 0.0:
        raise DegenerateLawError("Gaussian form needs 0 < p1 < 1")
    return var


def gaussian_prob_k(law, k):
    """Stirling/Gaussian density in ``k``; accepts real or array ``k``."""
    var = _gaussian_width(law)
    k = np.asarray(k, dtype=float)
    val = np.exp(-((k - law.m * law.p1) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return float(val) if val.ndim == 0 else val


def gaussian_prob_P(law, P):
    """Gaussian approximation of ``Prob(P)``, peaked at the geometric average."""
    return gaussian_prob_k(law, k_of_P(law, P))


def discretized_gaussian(law):
    """Gaussian form at integer ``k = 0..m``, renormalized to unit mass."""
    vals = gaussian_prob_k(law, np.arange(law.m + 1))
    return vals / vals.sum()


def total_variation(p, q):
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


@dataclass(frozen=True, eq=False)
class SurvivalHistogram:
    """Histogram of survival probabilities over bins that cover ``[0, 1]``.

    For weighted (exhaustive) ensembles ``counts`` holds probability masses
    and ``n_samples`` is 1.
    """

    edges: np.ndarray
    counts: np.ndarray
    n_samples: float

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValidationError("edges must be strictly increasing")
        if edges[0] > 0.0 or edges[-1] < 1.0:
            raise ValidationError("edges must cover [0, 1]")
        if counts.shape != (edges.size - 1,) or np.any(counts < 0):
            raise ValidationError("counts must be non-negative, one per bin")
        for name, arr in (("edges", edges), ("counts", counts)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def midpoints(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def frequencies(self):
        return self.counts / self.n_samples

    def mode_bin(self):
        """``(left, right)`` edges of the most populated bin (first on ties)."""
        i = int(np.argmax(self.counts))
        return float(self.edges[i]), float(self.edges[i + 1])

    def bin_index(self, value):
        i = int(np.searchsorted(self.edges, value, side="right")) - 1
        return min(max(i, 0), self.counts.size - 1)

    def merge(self, other):
        """Sum two histograms built on identical edges."""
        if not np.array_equal(self.edges, other.edges):
            raise ValidationError("cannot merge histograms with different edges")
        return SurvivalHistogram(self.edges, self.counts + other.counts, self.n_samples + other.n_samples)


def _distinct(log_samples, rtol=1e-9):
    """Sorted distinct values, merging ones that differ only by summation-order rounding."""
    values = np.sort(np.asarray(log_samples, dtype=float))
    keep = np.concatenate(([True], np.diff(values) > rtol * np.maximum(1.0, np.abs(values[1:]))))
    return values[keep]


def _lattice_step(log_samples):
    """Common spacing of the distinct values if they sit on a lattice, else None."""
    values = _distinct(log_samples)
    if values.size < 2:
        return None
    gaps = np.diff(values)
    step = float(gaps.min())
    ratio = gaps / step
    if np.all(np.abs(ratio - np.rint(ratio)) <= 1e-6 * np.maximum(ratio, 1.0)):
        return step
    return None


def _sigma_edges(log_samples, lower):
    """Log edges about one standard deviation wide, one bin centred on the median.

    On a lattice the width is an odd number of lattice steps and the edges
    fall halfway between lattice points, so every bin holds the same number
    of support points.
    """
    width = float(np.std(log_samples))
    if width == 0.0:
        return None
    centre = float(np.median(log_samples))
    step = _lattice_step(log_samples)
    if step is not None:
        n_steps = max(1, 2 * int(round((width / step - 1.0) / 2.0)) + 1)
        width = n_steps * step
        # snap to the lattice point nearest the median
        lattice = _distinct(log_samples)
        centre = float(lattice[np.argmin(np.abs(lattice - centre))])
    # a few far outliers must not explode the bin count
    width = max(width, -lower / MAX_SIGMA_BINS)
    n_below = math.ceil((centre - 0.5 * width - lower) / width)
    n_above = math.ceil((0.0 - centre - 0.5 * width) / width)
    start = centre - 0.5 * width - max(n_below, 0) * width
    return start + width * np.arange(max(n_below, 0) + max(n_above, 0) + 2)


def histogram_edges(samples, bins="sigma", scale="log"):
    """Bin edges for survival samples.

    ``scale="log"`` spaces edges logarithmically over ``[min(samples), 1]``
    and prepends 0, since ``P`` spreads over decades. It falls back to linear
    spacing on ``[0, 1]`` when a sample is exactly 0.

    ``bins="sigma"`` (log scale only) makes every bin one standard deviation
    of ``ln P`` wide and centres one bin on the median of ``ln P``. Survival
    samples of a two-atom law sit on a lattice, and edges placed without
    regard to the peak alias against it, making the mode bin erratic. Any
    other value is passed to :func:`numpy.histogram_bin_edges`.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValidationError("no samples")
    if np.any(samples < 0.0) or np.any(samples > 1.0):
        raise ValidationError("survival samples must lie in [0, 1]")
    lo = float(samples.min())
    if scale == "linear" or lo == 0.0:
        if isinstance(bins, str) and bins == "sigma":
            bins = "sturges"
        return np.histogram_bin_edges(samples, bins=bins, range=(0.0, 1.0))
    if scale != "log":
        raise ValidationError(f"unknown bin scale {scale!r}")
    if lo == 1.0:
        return np.array([0.0, 1.0])
    log_samples = np.log(samples)
    log_edges = None
    if isinstance(bins, str) and bins == "sigma":
        log_edges = _sigma_edges(log_samples, math.log(lo))
        if log_edges is None:
            return np.array([0.0, lo, 1.0])
    else:
        log_edges = np.histogram_bin_edges(log_samples, bins=bins, range=(math.log(lo), 0.0))
    edges = np.exp(log_edges)
    edges[0], edges[-1] = lo, 1.0
    return np.concatenate(([0.0], edges))


def build_histogram(samples, bins="sigma", scale="log", weights=None, edges=None):
    samples = np.asarray(samples, dtype=float)
    if edges is None:
        edges = histogram_edges(samples, bins=bins, scale=scale)
    counts, _ = np.histogram(samples, bins=edges, weights=weights)
    n = samples.size if weights is None else 1.0
    return SurvivalHistogram(edges, counts, n)


def empirical_rate_function(hist, m):
    """``[(P_mid, J)]`` with ``J = -ln(frequency) / m`` for every non-empty bin."""
    m = check_count(m, "m")
    if hist.n_samples <= 0:
        raise ValidationError("histogram is empty")
    out = []
    for mid, count in zip(hist.midpoints, hist.counts):
        if count > 0:
            out.append((float(mid), -math.log(count / hist.n_samples) / m))
    return out


def binned_law(law, edges):
    """Exact and Gaussian probability mass falling in each bin of ``edges``."""
    support = law.support()
    exact, _ = np.histogram(support, bins=edges, weights=exact_pmf(law))
    try:
        gauss, _ = np.histogram(support, bins=edges, weights=discretized_gaussian(law))
    except DegenerateLawError:
        gauss = np.full(exact.shape, np.nan)
    return exact, gauss
