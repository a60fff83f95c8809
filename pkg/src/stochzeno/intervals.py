"""Discrete waiting-time distributions and reproducible interval sampling.

Random streams
--------------
Every random sequence is drawn from its own generator::

    numpy.random.Generator(numpy.random.Philox(
        numpy.random.SeedSequence(seed, spawn_key=(run_index,))))

Philox is counter based, and keying the seed sequence on the run index makes
run ``i`` independent of how runs are scheduled across workers. The string
:data:`RNG_ID` names this scheme and is folded into ensemble fingerprints.
Interval draws use one ``Generator.random`` uniform per interval, mapped
through the cumulative weights.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .validation import check_count, check_duration, check_durations, check_probability

RNG_ID = "numpy-philox4x64/seedsequence(seed,spawn_key=(run,))/uniform-inverse-cdf"

SUM_TOL = 1e-12
MAX_SEED = 2**64 - 1


def _readonly(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IntervalDistribution:
    """Finite distribution of waiting times between measurements.

    Atoms are stored sorted by duration with duplicates merged and zero
    weights dropped. ``mean``, ``nu2`` and ``nu4`` are the first, second and
    fourth raw moments in s, s^2 and s^4.
    """

    durations: np.ndarray
    probabilities: np.ndarray
    mean: float = field(init=False)
    nu2: float = field(init=False)
    nu4: float = field(init=False)

    def __post_init__(self):
        mus = check_durations(self.durations, "durations")
        ps = np.asarray(self.probabilities, dtype=float)
        if ps.shape != mus.shape or mus.size == 0:
            raise ValidationError("durations and probabilities must be non-empty and of equal length")
        if not np.all(np.isfinite(ps)) or np.any(ps < 0.0):
            raise ValidationError("probabilities must be finite and non-negative")
        total = math.fsum(ps)
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"probabilities must sum to 1, got {total!r}")

        values, inverse = np.unique(mus, return_inverse=True)
        merged = np.zeros(values.shape)
        np.add.at(merged, inverse, ps)
        keep = merged > 0.0
        values, merged = values[keep], merged[keep]
        merged = merged / math.fsum(merged)

        object.__setattr__(self, "durations", _readonly(values))
        object.__setattr__(self, "probabilities", _readonly(merged))
        object.__setattr__(self, "mean", math.fsum(merged * values))
        object.__setattr__(self, "nu2", math.fsum(merged * values**2))
        object.__setattr__(self, "nu4", math.fsum(merged * values**4))

    @classmethod
    def from_atoms(cls, atoms):
        """Build from an iterable of ``(duration, probability)`` pairs."""
        atoms = list(atoms)
        if not atoms:
            raise ValidationError("at least one atom is required")
        mus, ps = zip(*atoms)
        return cls(np.array(mus, dtype=float), np.array(ps, dtype=float))

    @classmethod
    def from_samples(cls, samples):
        """Empirical distribution of observed waiting times."""
        samples = check_durations(np.ravel(samples), "samples")
        if samples.size == 0:
            raise ValidationError("cannot build a distribution from zero samples")
        values, counts = np.unique(samples, return_counts=True)
        return cls(values, counts / counts.sum())

    @property
    def atoms(self):
        return list(zip(self.durations.tolist(), self.probabilities.tolist()))

    @property
    def n_atoms(self):
        return self.durations.shape[0]

    def scaled(self, factor):
        """Distribution with every duration multiplied by ``factor``."""
        factor = check_duration(factor, "factor")
        return IntervalDistribution(self.durations * factor, self.probabilities)


@dataclass(frozen=True, eq=False)
class MeasurementSequence:
    """Ordered intervals of free evolution between consecutive measurements."""

    intervals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "intervals", _readonly(check_durations(self.intervals, "intervals")))

    @property
    def m(self):
        return self.intervals.shape[0]

    @property
    def total_time(self):
        return math.fsum(self.intervals)


def make_bimodal(mu1, mu2, p1):
    """Two-atom distribution: ``mu1`` with weight ``p1``, ``mu2`` with ``1 - p1``.

    Equal durations or a weight of 0 or 1 collapse to a single atom.
    """
    mu1 = check_duration(mu1, "mu1")
    mu2 = check_duration(mu2, "mu2")
    p1 = check_probability(p1, "p1")
    return IntervalDistribution(np.array([mu1, mu2]), np.array([p1, 1.0 - p1]))


def check_seed(seed):
    seed = check_count(seed, "seed", minimum=0)
    if seed > MAX_SEED:
        raise ValidationError("seed must fit in 64 bits")
    return seed


def run_generator(seed, run_index=0):
    """Independent generator for run ``run_index`` of an experiment seeded with ``seed``."""
    seed = check_seed(seed)
    run_index = check_count(run_index, "run_index", minimum=0)
    seq = np.random.SeedSequence(seed, spawn_key=(run_index,))
    return np.random.Generator(np.random.Philox(seq))


def sample_indices(dist, m, rng):
    """Draw ``m`` i.i.d. atom indices of ``dist`` using ``rng``."""
    u = rng.random(m)
    cdf = np.cumsum(dist.probabilities)[:-1]
    return np.searchsorted(cdf, u, side="right")


def sample_sequence(dist, m, seed, run_index=0):
    """Draw a reproducible sequence of ``m`` i.i.d. intervals from ``dist``."""
    m = check_count(m, "m")
    idx = sample_indices(dist, m, run_generator(seed, run_index))
    return MeasurementSequence(dist.durations[idx])
