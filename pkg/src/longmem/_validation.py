"""Input validation helpers used across the public API."""
import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InputError


def check_series(x, name="x", min_length=1, allow_constant=True):
    """Coerce ``x`` to a finite 1-d float array.

    Accepts lists, numpy arrays, pandas Series and single-column frames.
    """
    try:
        arr = check_array(x, ensure_2d=False, dtype=np.float64,
                          ensure_all_finite=True, ensure_min_samples=0)
    except ValueError as exc:
        raise InputError(f"{name}: {exc}") from exc
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise InputError(f"{name} needs at least {min_length} observations, got {arr.size}")
    if not allow_constant and arr.size and np.ptp(arr) == 0.0:
        raise InputError(f"{name} is constant; moments are undefined")
    return arr


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value:
        raise InputError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return value
