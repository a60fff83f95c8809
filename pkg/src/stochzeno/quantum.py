"""States, Hamiltonians and single-interval survival probabilities.

Units are SI throughout: Hamiltonians in rad/s (hbar = 1) and durations in
seconds. Conversion from laboratory units (kHz, microseconds) happens in
:mod:`stochzeno.units`.

The state after a measurement sequence is never built explicitly. With a
pure initial state and the rank-1 projector onto it, the post-selected state
is the initial state again, so all information lives in the scalar survival
probability.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .validation import check_duration, check_durations, check_square_matrix

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12


def _readonly(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of dimension ``d >= 2``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] < 2:
            raise ValidationError(f"state must be a vector of dimension >= 2, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state must have unit norm, got {norm!r}")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def normalized(cls, amplitudes):
        """Build a state from arbitrary non-zero amplitudes, rescaling to unit norm."""
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValidationError("cannot normalize a zero or non-finite vector")
        return cls(amps / norm)

    @property
    def dim(self):
        return self.amplitudes.shape[0]


def basis_state(dim, index=0):
    """Computational basis state ``|index>`` in dimension ``dim``."""
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix together with its spectral decomposition.

    The Hermiticity check is entrywise, relative to the largest entry so that
    matrices in rad/s (entries of order 1e4) are judged on the same footing
    as dimensionless ones. The stored matrix is the symmetrized input.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mat = check_square_matrix(self.matrix, "hamiltonian")
        if mat.shape[0] < 2:
            raise ValidationError("hamiltonian must be at least 2x2")
        scale = max(1.0, float(np.max(np.abs(mat))))
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL * scale:
            raise ValidationError("hamiltonian is not Hermitian")
        mat = 0.5 * (mat + mat.conj().T)
        evals, evecs = np.linalg.eigh(mat)
        object.__setattr__(self, "matrix", _readonly(mat))
        object.__setattr__(self, "eigenvalues", _readonly(evals))
        object.__setattr__(self, "eigenvectors", _readonly(evecs))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def reconstruct(self):
        """Return ``V diag(lambda) V^dagger``."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


@dataclass(frozen=True)
class HamiltonianMoments:
    """Energy statistics of ``H`` in the initial state.

    ``variance`` is the energy variance and ``kurtosis`` the fourth central
    moment ``<(H - <H>)^4>``, both taken in the initial state.
    """

    mean: float
    variance: float
    kurtosis: float


def as_hamiltonian(hamiltonian):
    if isinstance(hamiltonian, HermitianOperator):
        return hamiltonian
    return HermitianOperator(hamiltonian)


def as_state(state):
    if isinstance(state, StateVector):
        return state
    return StateVector(state)


def check_system(H, psi0):
    H = as_hamiltonian(H)
    psi0 = as_state(psi0)
    if H.dim != psi0.dim:
        raise ValidationError(f"dimension mismatch: hamiltonian is {H.dim}, state is {psi0.dim}")
    return H, psi0


def rabi_hamiltonian(delta_h):
    """Resonant two-level Hamiltonian ``delta_h * sigma_x``.

    ``delta_h`` is the energy standard deviation in a basis state, in rad/s;
    the Rabi frequency is ``2 * delta_h`` and ``q(mu) = cos(delta_h * mu)**2``.
    """
    delta_h = float(delta_h)
    return HermitianOperator(np.array([[0.0, delta_h], [delta_h, 0.0]], dtype=complex))


def propagate(H, mu):
    """Unitary ``exp(-i H mu)`` from the spectral decomposition of ``H``."""
    H = as_hamiltonian(H)
    mu = check_duration(mu)
    phases = np.exp(-1j * H.eigenvalues * mu)
    return (H.eigenvectors * phases) @ H.eigenvectors.conj().T


def spectral_weights(H, psi0):
    """Populations ``|<v_k|psi0>|^2`` of the initial state on the eigenbasis of ``H``."""
    H, psi0 = check_system(H, psi0)
    return np.abs(H.eigenvectors.conj().T @ psi0.amplitudes) ** 2


def survival_q(H, psi0, mu):
    """Survival probability ``|<psi0|exp(-i H mu)|psi0>|^2`` after one interval.

    ``mu`` may be a scalar or an array of durations; the result has the same
    shape. Evaluated as ``|sum_k w_k exp(-i lambda_k mu)|^2`` with the spectral
    weights of ``psi0``, which is the same quantity as going through
    :func:`propagate` without building the matrix.
    """
    H, psi0 = check_system(H, psi0)
    scalar = np.ndim(mu) == 0
    mus = check_durations(np.atleast_1d(mu), "mu")
    weights = spectral_weights(H, psi0)
    amp = np.exp(-1j * np.outer(mus, H.eigenvalues)) @ weights
    q = np.clip(np.abs(amp) ** 2, 0.0, 1.0)
    # U(0) = I exactly; the eigen-weights only sum to 1 up to rounding
    q[mus == 0.0] = 1.0
    return float(q[0]) if scalar else q


def log_survival_q(H, psi0, mu):
    """Natural log of :func:`survival_q`; ``-inf`` where ``q == 0``."""
    q = survival_q(H, psi0, mu)
    with np.errstate(divide="ignore"):
        return np.log(q)


def log_sequence_survival(H, psi0, intervals):
    """``sum_j ln q(mu_j)`` over a sequence of intervals."""
    intervals = getattr(intervals, "intervals", intervals)
    mus = check_durations(intervals, "intervals")
    if mus.size == 0:
        return 0.0
    # q depends only on the interval value; evaluate each distinct value once
    values, inverse = np.unique(mus, return_inverse=True)
    logq = log_survival_q(H, psi0, values)
    return float(np.sum(logq[inverse]))


def sequence_survival(H, psi0, intervals):
    """Survival probability ``prod_j q(mu_j)`` of a whole measurement sequence.

    Accepts a :class:`~stochzeno.intervals.MeasurementSequence` or a plain
    array of durations. Accumulates in log space, so ``m`` in the millions
    does not underflow to a spurious zero unless the true value does. An
    empty sequence gives 1.
    """
    return float(np.exp(log_sequence_survival(H, psi0, intervals)))


def hamiltonian_moments(H, psi0):
    """Mean, variance and fourth central moment of ``H`` in ``psi0``.

    The central moments are taken over the spectral populations of ``psi0``,
    which equals the raw-moment expansion
    ``<H^4> - 4<H^3><H> + 6<H^2><H>^2 - 3<H>^4`` without its cancellation.
    """
    H, psi0 = check_system(H, psi0)
    weights = spectral_weights(H, psi0)
    mean = float(weights @ H.eigenvalues)
    centered = H.eigenvalues - mean
    variance = float(weights @ centered**2)
    kurtosis = float(weights @ centered**4)
    return HamiltonianMoments(mean=mean, variance=variance, kurtosis=kurtosis)
