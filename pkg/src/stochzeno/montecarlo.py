"""Monte Carlo ensembles of random measurement sequences.

Run ``i`` draws its intervals from ``run_generator(seed, i)`` (see
:mod:`stochzeno.intervals`). Each sample is written to slot ``i`` of a
preallocated array, so the ensemble is bit-identical for any worker count.
"""

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ValidationError
from .intervals import RNG_ID, check_seed, run_generator, sample_indices
from .large_deviation import SurvivalHistogram, build_histogram
from .quantum import check_system
from .statistics import atom_log_q
from .validation import check_count

MAX_WORK = 5 * 10**9
MAX_EXHAUSTIVE_M = 20
MODES = ("sample", "exhaustive")


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    samples: np.ndarray
    histogram: SurvivalHistogram
    sample_mean: float
    sample_mode_bin: tuple
    config_fingerprint: str
    weights: Optional[np.ndarray] = None
    mode: str = "sample"

    @property
    def n_runs(self):
        return self.samples.shape[0]


def _encode_complex(arr):
    arr = np.asarray(arr, dtype=complex)
    return [[repr(float(z.real)), repr(float(z.imag))] for z in arr.ravel()]


def config_fingerprint(H, psi0, dist, m, n_runs, seed, mode="sample"):
    """SHA-256 digest identifying an ensemble configuration, RNG scheme included."""
    payload = {
        "hamiltonian": {"shape": list(H.matrix.shape), "entries": _encode_complex(H.matrix)},
        "psi0": _encode_complex(psi0.amplitudes),
        "atoms": [[repr(mu), repr(p)] for mu, p in dist.atoms],
        "m": int(m),
        "n_runs": int(n_runs),
        "seed": int(seed),
        "rng": RNG_ID,
        "mode": mode,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _sample_runs(dist, logq, m, seed, run_ids, out):
    for i in run_ids:
        idx = sample_indices(dist, m, run_generator(seed, int(i)))
        out[i] = math.exp(float(np.sum(logq[idx])))


def sample_survival(H, psi0, dist, m, n_runs, seed, threads=1):
    """Survival probabilities of ``n_runs`` random sequences, in run order."""
    H, psi0 = check_system(H, psi0)
    m = check_count(m, "m")
    n_runs = check_count(n_runs, "n_runs")
    threads = check_count(threads, "threads")
    seed = check_seed(seed)
    if m * n_runs > MAX_WORK:
        raise ValidationError(f"n_runs * m = {m * n_runs} exceeds the work limit {MAX_WORK}")
    logq = atom_log_q(dist, H, psi0)
    out = np.empty(n_runs)
    if threads == 1:
        _sample_runs(dist, logq, m, seed, range(n_runs), out)
        return out
    chunks = [c for c in np.array_split(np.arange(n_runs), threads * 4) if c.size]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_sample_runs, dist, logq, m, seed, c, out) for c in chunks]
        for fut in futures:
            fut.result()
    return out


def enumerate_sequences(H, psi0, dist, m):
    """Every interval sequence of length ``m`` with its probability weight.

    Returns ``(survival, weights)`` in lexicographic order of atom indices.
    This is the brute-force reference for the closed-form averages and the
    binomial law, so it is limited to ``n_atoms <= 2`` and ``m <= 20``.
    """
    H, psi0 = check_system(H, psi0)
    m = check_count(m, "m")
    if dist.n_atoms > 2 or m > MAX_EXHAUSTIVE_M:
        raise ValidationError(
            f"exhaustive enumeration needs <= 2 atoms and m <= {MAX_EXHAUSTIVE_M}"
        )
    logq = atom_log_q(dist, H, psi0)
    logp = np.log(dist.probabilities)
    if dist.n_atoms == 1:
        idx = np.zeros((1, m), dtype=int)
    else:
        codes = np.arange(2**m, dtype=np.int64)[:, None]
        idx = (codes >> np.arange(m - 1, -1, -1)) & 1
    survival = np.exp(logq[idx].sum(axis=1))
    weights = np.exp(logp[idx].sum(axis=1))
    return survival, weights


def run_ensemble(H, psi0, dist, m=100, n_runs=1000, seed=0, threads=1, mode="sample",
                 bins="sigma", scale="log"):
    """Simulate an ensemble of measurement sequences and histogram the result.

    Parameters
    ----------
    H, psi0 : HermitianOperator, StateVector
        Generator of the free evolution and the measured initial state.
    dist : IntervalDistribution
        Waiting-time law; intervals are drawn i.i.d.
    m, n_runs : int
        Measurements per sequence and number of sequences.
    seed : int
        64-bit experiment seed; run ``i`` uses the stream keyed on ``(seed, i)``.
    threads : int
        Worker threads. Does not affect the result.
    mode : {"sample", "exhaustive"}
        ``"exhaustive"`` enumerates every sequence with its weight instead of
        sampling (``n_runs`` and ``seed`` are then ignored except in the
        fingerprint).
    bins, scale
        Histogram policy, see :func:`stochzeno.large_deviation.histogram_edges`.
    """
    H, psi0 = check_system(H, psi0)
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    fingerprint = config_fingerprint(H, psi0, dist, m, n_runs, check_seed(seed), mode)
    if mode == "exhaustive":
        samples, weights = enumerate_sequences(H, psi0, dist, m)
        mean = float(np.sum(samples * weights) / np.sum(weights))
    else:
        samples = sample_survival(H, psi0, dist, m, n_runs, seed, threads=threads)
        weights = None
        mean = float(np.mean(samples))
    samples.setflags(write=False)
    hist = build_histogram(samples, bins=bins, scale=scale, weights=weights)
    return EnsembleResult(
        samples=samples,
        histogram=hist,
        sample_mean=mean,
        sample_mode_bin=hist.mode_bin(),
        config_fingerprint=fingerprint,
        weights=weights,
        mode=mode,
    )


def exact_variance(dist, H, psi0, m):
    """Variance of the survival probability over random sequences.

    ``E[P^2] = (sum_k p_k q_k^2)^m`` for i.i.d. intervals.
    """
    logq = atom_log_q(dist, H, psi0)
    logp = np.log(dist.probabilities)
    second = math.exp(m * float(np.logaddexp.reduce(logp + 2 * logq)))
    first = math.exp(m * float(np.logaddexp.reduce(logp + logq)))
    return max(0.0, second - first * first)
