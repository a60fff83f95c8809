"""Input validation helpers shared by the library functions and estimators."""

import numbers

import numpy as np

from .exceptions import ValidationError


def check_count(value, name, minimum=1):
    """Return ``value`` as a Python int, requiring ``value >= minimum``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_duration(value, name="mu"):
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise ValidationError(f"{name} must be a finite non-negative duration, got {value!r}")
    return value


def check_probability(value, name="p", open_low=False):
    value = float(value)
    if not np.isfinite(value) or value > 1.0 or value < 0.0 or (open_low and value == 0.0):
        interval = "(0, 1]" if open_low else "[0, 1]"
        raise ValidationError(f"{name} must lie in {interval}, got {value!r}")
    return value


def check_durations(values, name="intervals", ndim=1):
    """Validate an array of non-negative finite durations.

    Parameters
    ----------
    values : array-like
        Durations in seconds.
    ndim : int
        Required dimensionality (1 for a single sequence, 2 for a batch of
        sequences, one per row).
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < 0.0)):
        raise ValidationError(f"{name} must be finite and non-negative")
    return arr


def check_square_matrix(matrix, name="matrix"):
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr
