"""Input validation helpers shared by the functional API and the estimator."""

import numbers

import numpy as np


def check_signal(x, n=None, name="signal"):
    """Return ``x`` as a finite 1-D complex128 array.

    Parameters
    ----------
    x : array-like
        Candidate signal.
    n : int, optional
        Required length.
    name : str
        Used in error messages.
    """
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not (np.issubdtype(arr.dtype, np.number) or arr.dtype == bool):
        raise TypeError(f"{name} must be numeric, got dtype {arr.dtype}")
    arr = arr.astype(np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {n}")
    return arr


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_index_set(indices, n, name="index set", allow_empty=False):
    """Reduce integer indices mod ``n`` and reject duplicates.

    Returns a sorted int64 array.
    """
    arr = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices)
    if arr.size == 0:
        if allow_empty:
            return np.zeros(0, dtype=np.int64)
        raise ValueError(f"{name} must be non-empty")
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.issubdtype(arr.dtype, np.integer):
        if np.issubdtype(arr.dtype, np.floating) and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            raise TypeError(f"{name} must contain integers")
    reduced = np.mod(arr.astype(np.int64), n)
    uniq = np.unique(reduced)
    if uniq.size != reduced.size:
        raise ValueError(f"{name} contains duplicate entries modulo {n}")
    return uniq


def check_hermitian(h, n=None, rtol=1e-12, name="matrix"):
    """Return ``h`` as a complex square array after checking H = H*."""
    arr = np.asarray(h, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has dimension {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    scale = np.linalg.norm(arr)
    defect = np.linalg.norm(arr - arr.conj().T)
    if defect > rtol * max(scale, np.finfo(float).tiny):
        raise ValueError(f"{name} is not Hermitian (defect {defect:.3e}, norm {scale:.3e})")
    return arr


def check_signal_matrix(X, n=None, name="X", dtype=np.complex128):
    """Return ``X`` as a finite 2-D array of one signal per row.

    A single 1-D signal is promoted to one row. ``sklearn.utils.check_array``
    rejects complex input, hence this helper.
    """
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_features), got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} is empty, shape {arr.shape}")
    if not (np.issubdtype(arr.dtype, np.number) or arr.dtype == bool):
        raise TypeError(f"{name} must be numeric, got dtype {arr.dtype}")
    if dtype is np.float64 and np.iscomplexobj(arr):
        raise TypeError(f"{name} must be real")
    arr = arr.astype(dtype)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n is not None and arr.shape[1] != n:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {n}")
    return arr
