"""Comparison estimators and the constrained least-squares oracle."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import check_basis
from .core import interpolate_column
from .exceptions import BlockTooSmall, DimensionMismatch
from .linalg import masked_pinv_apply, orthonormalize, truncated_svd_left
from .model import ObservedVector

__all__ = [
    "oracle_least_change",
    "GrouseState",
    "grouse_step",
    "zero_fill_svd",
    "oracle_equivalence_suite",
]

GROUSE_REORTHO_TOL = 1e-10
# residuals this small relative to ||y|| are rounding noise, not signal
GROUSE_RESIDUAL_RTOL = 1e-12


def oracle_least_change(basis, y):
    """Solve ``min ||P_{B^perp} x||_2`` subject to ``x = y`` on ``omega`` directly.

    The free coordinates ``omega^C`` are parameterised explicitly,
    ``x = y + Z z`` with ``Z`` the identity columns of ``omega^C``, and the
    resulting dense least-squares problem is solved with a pivoted-QR
    (complete orthogonal) factorization, giving the minimum-norm ``z`` when
    the system is singular. No pseudo-inverse of ``P_omega B`` is formed.
    """
    basis = check_basis(basis)
    if not isinstance(y, ObservedVector):
        raise TypeError("y must be an ObservedVector")
    n = basis.shape[0]
    if y.n != n:
        raise DimensionMismatch(f"y has length {y.n}, basis has {n} rows")
    free = np.flatnonzero(~y.mask)
    x = y.values.copy()
    if free.size == 0:
        return x
    proj_perp = np.eye(n) - basis @ basis.T
    Z = np.eye(n)[:, free]
    z, *_ = scipy.linalg.lstsq(proj_perp @ Z, -(proj_perp @ y.values), lapack_driver="gelsy")
    x[free] = z
    return x


@dataclass(frozen=True)
class GrouseState:
    """Current estimate, count of vectors seen plus one, and step scale ``c`` (step ``c / t``)."""

    estimate: np.ndarray
    t: int = 1
    step_scale: float = 100.0


def grouse_step(state, y):
    """One rank-one geodesic update of the estimate from a partially observed vector.

    With weights ``w = (P_omega B)^+ y``, prediction ``p = B w`` and residual
    ``rho = y - P_omega B w``, the estimate is rotated by angle
    ``sigma * c / t`` (``sigma = ||rho|| ||p||``) in the plane spanned by
    ``p`` and ``rho``.
    """
    B = state.estimate
    if not isinstance(y, ObservedVector):
        raise TypeError("y must be an ObservedVector")
    if y.n != B.shape[0]:
        raise DimensionMismatch(f"y has length {y.n}, estimate has {B.shape[0]} rows")
    eta = state.step_scale / state.t
    w = masked_pinv_apply(B, y.omega, y.values)
    p = B @ w
    rho = y.values - np.where(y.mask, p, 0.0)
    rho_norm = np.linalg.norm(rho)
    p_norm = np.linalg.norm(p)
    w_norm = np.linalg.norm(w)
    if eta == 0 or p_norm == 0 or rho_norm <= GROUSE_RESIDUAL_RTOL * np.linalg.norm(y.values):
        return GrouseState(B, state.t + 1, state.step_scale)
    angle = rho_norm * p_norm * eta
    direction = (np.cos(angle) - 1.0) * p / p_norm + np.sin(angle) * rho / rho_norm
    B = B + np.outer(direction, w / w_norm)
    drift = np.max(np.abs(B.T @ B - np.eye(B.shape[1])))
    if drift > GROUSE_REORTHO_TOL:
        B = orthonormalize(B)
    return GrouseState(B, state.t + 1, state.step_scale)


def zero_fill_svd(values, r):
    """Top-``r`` left singular span of the zero-filled data matrix ``[Y_1 ... Y_K]``."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[1] < r:
        raise BlockTooSmall(f"{values.shape[1]} columns is fewer than r={r}")
    if r > values.shape[0]:
        raise DimensionMismatch(f"r={r} exceeds n={values.shape[0]}")
    return truncated_svd_left(values, r)


def _random_instance(rng, max_n=20, max_r=5, cond_limit=1e8):
    while True:
        r = int(rng.integers(1, max_r + 1))
        n = int(rng.integers(r + 1, max_n + 1))
        m = int(rng.integers(r, n + 1))
        basis = orthonormalize(rng.standard_normal((n, r)))
        omega = np.sort(rng.choice(n, size=m, replace=False))
        s = np.linalg.svd(basis[omega], compute_uv=False)
        if s[-1] > 0 and s[0] / s[-1] < cond_limit:
            values = np.zeros(n)
            values[omega] = rng.standard_normal(m)
            return basis, ObservedVector(values, omega)


def oracle_equivalence_suite(trials=500, seed=0):
    """Compare the closed-form interpolation with :func:`oracle_least_change`.

    Instances have ``n <= 20``, ``r <= 5``, ``|omega| >= r`` and
    ``P_omega B`` of full column rank.

    Returns
    -------
    dict
        ``max_rel_err`` (relative l2 deviation between the two paths),
        ``max_feasibility`` (worst ``|x - y|`` on ``omega`` over both paths)
        and ``trials``.
    """
    rng = np.random.default_rng(seed)
    max_rel = 0.0
    max_feas = 0.0
    for _ in range(trials):
        basis, y = _random_instance(rng)
        x_closed = interpolate_column(basis, y)
        x_oracle = oracle_least_change(basis, y)
        denom = max(np.linalg.norm(x_oracle), np.finfo(float).tiny)
        max_rel = max(max_rel, np.linalg.norm(x_closed - x_oracle) / denom)
        for x in (x_closed, x_oracle):
            resid = np.abs(x[y.omega] - y.values[y.omega])
            max_feas = max(max_feas, float(np.max(resid, initial=0.0)))
    return {"max_rel_err": float(max_rel), "max_feasibility": max_feas, "trials": trials}
