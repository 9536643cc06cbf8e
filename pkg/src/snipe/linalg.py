"""Dense kernels and subspace geometry.

Subspaces are represented throughout by ``(n, r)`` float arrays with
orthonormal columns. Functions here never mutate their arguments.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import check_basis, check_omega, check_same_shape, rank_tol
from .exceptions import DimensionMismatch, RankDeficient

__all__ = [
    "SpectralSummary",
    "orthonormalize",
    "truncated_svd_left",
    "masked_pinv_apply",
    "masked_coefficients",
    "principal_angles",
    "grassmann_distance",
    "coherence",
    "spectral_summary",
]


@dataclass(frozen=True)
class SpectralSummary:
    """Singular values (non-increasing) and the ratio of largest to smallest."""

    singular_values: np.ndarray
    condition_number: float


def _canonical_signs(U):
    # flip each column so its largest-magnitude entry is positive
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def orthonormalize(M):
    """Orthonormal basis for the column span of a full-column-rank matrix.

    Raises
    ------
    RankDeficient
        If the smallest singular value of ``M`` is at or below the
        numerical-rank tolerance.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    n, r = M.shape
    if r == 0 or r > n:
        raise RankDeficient(f"cannot have full column rank with shape {M.shape}")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0 or s[-1] <= rank_tol(M.shape, s[0]):
        raise RankDeficient(f"sigma_min={s[-1]:.3g} is below the rank tolerance")
    Q, R = np.linalg.qr(M)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def _pad_complement(U, r):
    """Extend the orthonormal columns of ``U`` to ``r`` columns.

    Uses a pivoted QR of the residual identity ``I - U U^T`` so the padding
    is deterministic.
    """
    n, k = U.shape
    resid = np.eye(n) - U @ U.T
    Q, _, _ = scipy.linalg.qr(resid, mode="economic", pivoting=True)
    pad = Q[:, : r - k]
    # one Gram-Schmidt sweep against U guards against residual leakage
    pad = pad - U @ (U.T @ pad)
    pad, _ = np.linalg.qr(pad)
    return np.hstack([U, pad])


def _leading_left(M, r):
    n, b = M.shape
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    k = int(np.sum(s > rank_tol(M.shape, s[0]))) if s.size and s[0] > 0 else 0
    k = min(k, r)
    U = U[:, :k]
    if k < r:
        U = _pad_complement(U, r)
    return _canonical_signs(U)


def truncated_svd_left(M, r):
    """Top-``r`` left singular vectors of ``M``.

    Singular vectors come in the order LAPACK returns them, with each column's
    sign fixed so that its largest-magnitude entry is positive. When ``M`` has
    fewer than ``r`` singular values above the rank tolerance, the basis is
    padded deterministically with orthonormal complement directions.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {M.shape}")
    if not 1 <= r <= min(M.shape):
        raise DimensionMismatch(f"r={r} must lie in [1, min{M.shape}]")
    return _leading_left(M, r)


def masked_coefficients(basis, values, mask):
    """Column-wise ``(P_omega_j B)^+ y_j`` for a block of observed vectors.

    Parameters
    ----------
    basis : ndarray, shape (n, r)
    values : ndarray, shape (n, b)
        Zero-filled observations.
    mask : ndarray of bool, shape (n, b)

    Returns
    -------
    ndarray, shape (r, b)
        Minimum-norm least-squares coefficients; singular values at or below
        ``max(n, r) * eps * sigma_max`` are dropped.
    """
    n, r = basis.shape
    A = basis[None, :, :] * mask.T[:, :, None]
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    tol = rank_tol((n, r), s[:, :1])
    with np.errstate(divide="ignore"):
        sinv = np.where(s > tol, 1.0 / np.where(s > 0, s, 1.0), 0.0)
    uty = np.einsum("bnk,nb->bk", U, values)
    coef = np.einsum("bkr,bk->br", Vt, sinv * uty)
    return coef.T


def masked_pinv_apply(basis, omega, y):
    """Minimum-norm least-squares coefficients of ``y`` on the rows ``omega`` of ``basis``.

    ``omega`` holds 0-based indices; entries of ``y`` outside it are ignored.
    """
    basis = np.asarray(basis, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = basis.shape[0]
    if y.shape[0] != n:
        raise DimensionMismatch(f"y has length {y.shape[0]}, basis has {n} rows")
    omega = check_omega(omega, n)
    mask = np.zeros((n, 1), dtype=bool)
    mask[omega, 0] = True
    return masked_coefficients(basis, np.where(mask, y[:, None], 0.0), mask)[:, 0]


def principal_angles(A, B):
    """Principal angles between ``span(A)`` and ``span(B)``, largest first.

    Angles below 45 degrees come from the sines (SVD of ``B - A A^T B``),
    the rest from the cosines (SVD of ``A^T B``), which keeps full relative
    accuracy near zero.
    """
    A = check_basis(A, "A")
    B = check_basis(B, "B")
    check_same_shape(A, B)
    AtB = A.T @ B
    cos = np.clip(np.linalg.svd(AtB, compute_uv=False), 0.0, 1.0)
    sin = np.clip(np.linalg.svd(B - A @ AtB, compute_uv=False), 0.0, 1.0)
    theta_cos = np.arccos(cos[::-1])
    theta_sin = np.arcsin(sin)
    theta = np.where(theta_sin < np.pi / 4, theta_sin, theta_cos)
    return np.sort(theta)[::-1]


def grassmann_distance(A, B):
    """Root-mean-square sine of the principal angles, ``||P_{A^perp} P_B||_F / sqrt(r)``."""
    A = check_basis(A, "A")
    B = check_basis(B, "B")
    check_same_shape(A, B)
    r = A.shape[1]
    d = np.linalg.norm(B - A @ (A.T @ B)) / np.sqrt(r)
    return float(min(d, 1.0))


def coherence(basis):
    """``(n / r) * max_i ||basis[i, :]||^2``; lies in ``[1, n / r]``."""
    basis = check_basis(basis)
    n, r = basis.shape
    return float(n / r * np.max(np.sum(basis**2, axis=1)))


def spectral_summary(M):
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    if M.size == 0:
        raise DimensionMismatch("matrix is empty")
    s = np.linalg.svd(M, compute_uv=False)
    smin = s[-1]
    if s[0] == 0 or smin <= rank_tol(M.shape, s[0]):
        nu = np.inf
    else:
        nu = float(s[0] / smin)
    return SpectralSummary(singular_values=s, condition_number=nu)
