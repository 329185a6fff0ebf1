"""Input validation helpers shared by the estimators and the CLI."""

import numpy as np

#: Largest integer in the sampling domain; everything operates on [0, MAX_VALUE].
MAX_VALUE = 2**32


def check_modulus(p):
    """Return ``p`` as a plain int, requiring an integer >= 2."""
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise ValueError(f"modulus must be an integer >= 2, got {p!r}")
    p = int(p)
    if p < 2:
        raise ValueError(f"modulus must be >= 2, got {p}")
    return p


def check_fraction(value, name="fraction"):
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value


def check_scalar_integer(x, name="x", max_value=MAX_VALUE):
    """Validate a single integer in [0, max_value] and return it as int."""
    if isinstance(x, bool):
        raise ValueError(f"{name} must be an integer, got a bool")
    if isinstance(x, float) or isinstance(x, np.floating):
        if not float(x).is_integer():
            raise ValueError(f"{name} must be an integer, got {x!r}")
        x = int(x)
    if not isinstance(x, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {type(x).__name__}")
    x = int(x)
    if x < 0 or x > max_value:
        raise ValueError(f"{name} must lie in [0, {max_value}], got {x}")
    return x


def check_integer_array(x, name="x", max_value=MAX_VALUE):
    """Coerce ``x`` to a 1-d uint64 array of values in [0, max_value].

    Accepts lists, 1-d arrays and (n, 1) column arrays of any integer or
    integral-float dtype. Negative or fractional values are rejected before
    any unsigned cast so nothing wraps silently.
    """
    arr = np.asarray(x)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if arr.dtype == object:
        try:
            arr = arr.astype(np.uint64)
        except (OverflowError, TypeError, ValueError) as exc:
            raise ValueError(f"{name} contains values outside the integer domain") from exc
    if np.issubdtype(arr.dtype, np.floating):
        if not np.all(np.isfinite(arr)) or not np.all(arr == np.floor(arr)):
            raise ValueError(f"{name} must contain integers, got fractional or non-finite values")
        if np.any(arr < 0):
            raise ValueError(f"{name} must be non-negative")
        arr = arr.astype(np.uint64)
    elif np.issubdtype(arr.dtype, np.signedinteger):
        if np.any(arr < 0):
            raise ValueError(f"{name} must be non-negative")
        arr = arr.astype(np.uint64)
    elif np.issubdtype(arr.dtype, np.unsignedinteger):
        arr = arr.astype(np.uint64)
    elif arr.dtype == bool:
        raise ValueError(f"{name} must be an integer array, got bool")
    if np.any(arr > np.uint64(max_value)):
        raise ValueError(f"{name} must not exceed {max_value}")
    return arr


def check_labels(y, n_classes, name="y"):
    """Coerce labels to int64 and require each to lie in [0, n_classes)."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        flt = arr.astype(float)
        if not np.all(flt == np.floor(flt)):
            raise ValueError(f"{name} must contain integer labels")
        arr = flt.astype(np.int64)
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
        raise ValueError(f"{name} labels must lie in [0, {n_classes - 1}]")
    return arr


def check_matrix(X, name="X"):
    """Coerce to a 2-d float64 matrix with finite entries."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr
