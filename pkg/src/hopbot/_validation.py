"""Small input-checking helpers in the spirit of ``sklearn.utils.validation``."""

import math

import numpy as np

from .errors import ValidationError


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(value, name, allow_zero=False):
    value = check_finite(value, name)
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValidationError(f"{name} must be {bound}, got {value!r}")
    return value


def check_vector(value, name, size):
    """Return ``value`` as a finite float array of shape ``(size,)``."""
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size,):
        raise ValidationError(f"{name} must have shape ({size},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite, got {arr.tolist()}")
    return arr


def check_matrix(value, name, shape):
    arr = np.asarray(value, dtype=float)
    if arr.shape != shape:
        raise ValidationError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return arr


def raise_if(problems):
    if problems:
        raise ValidationError(problems)
