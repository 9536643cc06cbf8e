"""Input validation helpers shared by the functional layer and the estimators."""

import numpy as np

from .exceptions import DimensionMismatch

ORTHO_TOL = 1e-10


def check_basis(basis, name="basis", tol=ORTHO_TOL):
    """Return ``basis`` as a float 2-D array, checking column-orthonormality."""
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {basis.shape}")
    n, r = basis.shape
    if not 1 <= r <= n:
        raise DimensionMismatch(f"{name} must satisfy 1 <= r <= n, got {basis.shape}")
    gram = basis.T @ basis
    err = np.max(np.abs(gram - np.eye(r)))
    if err > tol:
        raise ValueError(f"{name} columns are not orthonormal (max deviation {err:.3g})")
    return basis


def check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def check_omega(omega, n):
    """Return ``omega`` as a sorted, unique int array of 0-based indices below ``n``."""
    omega = np.asarray(omega, dtype=np.intp).reshape(-1)
    if omega.size and (omega.min() < 0 or omega.max() >= n):
        raise DimensionMismatch(f"observed indices must lie in [0, {n})")
    if omega.size > 1 and np.any(np.diff(omega) <= 0):
        omega = np.unique(omega)
    return omega


def rank_tol(shape, smax):
    """Singular values at or below this are treated as zero."""
    return max(shape) * np.finfo(np.float64).eps * smax
