"""scikit-learn compatible estimators.

Data follow the scikit-learn layout: ``X`` has shape ``(n_samples,
n_features)``, so each row is one streamed vector. Missing entries are given
either as NaN in ``X`` or through an explicit boolean ``mask`` (True means
observed); internally they become zeros plus the mask.

>>> import numpy as np
>>> from snipe.estimators import SNIPE
>>> rng = np.random.default_rng(0)
>>> X = rng.standard_normal((40, 2)) @ rng.standard_normal((2, 8))
>>> est = SNIPE(n_components=2, block_size=4).fit(X)
>>> est.components_.shape
(2, 8)
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .baselines import GrouseState, grouse_step
from .core import SnipeConfig, snipe_init, snipe_step
from .exceptions import BlockTooSmall, DimensionMismatch
from .linalg import masked_coefficients, orthonormalize, truncated_svd_left
from .model import MeasurementBlock, ObservedVector

__all__ = ["SNIPE", "GROUSE", "ZeroFillSVD", "to_block"]


def to_block(X, mask=None):
    """Convert ``(n_samples, n_features)`` data into a column-wise :class:`MeasurementBlock`."""
    X = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan")
    if mask is None:
        mask = ~np.isnan(X)
    else:
        mask = check_array(mask, dtype=bool)
        if mask.shape != X.shape:
            raise DimensionMismatch(f"mask shape {mask.shape} differs from X shape {X.shape}")
        if np.any(np.isnan(X[mask])):
            raise ValueError("X has NaN at observed positions")
    values = np.where(mask, X, 0.0)
    return MeasurementBlock(values.T, mask.T)


class _SubspaceMixin(TransformerMixin):
    """Shared ``transform`` / ``inverse_transform`` for fitted subspace estimators."""

    @property
    def components_(self):
        return self._basis().T

    def transform(self, X, mask=None):
        """Least-squares coefficients of each row on its observed entries."""
        check_is_fitted(self)
        block = to_block(X, mask)
        basis = self._basis()
        if block.n != basis.shape[0]:
            raise DimensionMismatch(f"X has {block.n} features, expected {basis.shape[0]}")
        return masked_coefficients(basis, block.values, block.mask).T

    def inverse_transform(self, Z):
        check_is_fitted(self)
        return np.asarray(Z) @ self.components_


class SNIPE(_SubspaceMixin, BaseEstimator):
    """Streaming subspace estimation from incomplete vectors, one block at a time.

    Parameters
    ----------
    n_components : int
        Subspace dimension ``r``.
    block_size : int, optional
        Rows per block used by :meth:`fit`; defaults to ``2 * n_components``.
    min_block_guard : bool, default True
        Reject blocks with fewer rows than ``n_components``. When False such
        blocks are processed and the estimate is padded to full rank.

    Attributes
    ----------
    state_ : SnipeState
        The full retained state, an ``(n, r)`` basis plus a block counter.
    components_ : ndarray of shape (n_components, n_features)
    n_features_in_ : int
    """

    def __init__(self, n_components, block_size=None, min_block_guard=True):
        self.n_components = n_components
        self.block_size = block_size
        self.min_block_guard = min_block_guard

    def _basis(self):
        return self.state_.estimate

    def _config(self):
        return SnipeConfig(int(self.n_components), bool(self.min_block_guard))

    def partial_fit_block(self, block):
        if not hasattr(self, "state_"):
            self.state_ = snipe_init(block, self._config())
            self.n_features_in_ = block.n
        else:
            self.state_ = snipe_step(self.state_, block)
        return self

    def partial_fit(self, X, y=None, mask=None):
        """Fold all rows of ``X`` in as a single block."""
        return self.partial_fit_block(to_block(X, mask))

    def fit(self, X, y=None, mask=None):
        """Reset and stream ``X`` through in consecutive blocks of ``block_size`` rows.

        A trailing remainder shorter than ``n_components`` is merged into the
        preceding block when ``min_block_guard`` is set.
        """
        block = to_block(X, mask)
        r = int(self.n_components)
        b = int(self.block_size) if self.block_size is not None else 2 * r
        if b < 1:
            raise ValueError("block_size must be positive")
        for attr in ("state_", "n_features_in_"):
            self.__dict__.pop(attr, None)
        T = block.b
        edges = list(range(0, T, b)) + [T]
        if len(edges) > 2 and T - edges[-2] < r and self.min_block_guard:
            edges.pop(-2)
        if edges[1] < r and self.min_block_guard:
            raise BlockTooSmall(f"{T} samples is fewer than n_components={r}")
        for lo, hi in zip(edges[:-1], edges[1:]):
            self.partial_fit_block(
                MeasurementBlock(block.values[:, lo:hi], block.mask[:, lo:hi])
            )
        return self


class GROUSE(_SubspaceMixin, BaseEstimator):
    """Per-vector Grassmannian gradient tracker with diminishing step ``step_scale / t``.

    The initial estimate is a random orthonormal basis drawn from
    ``random_state`` the first time data are seen.
    """

    def __init__(self, n_components, step_scale=100.0, random_state=None):
        self.n_components = n_components
        self.step_scale = step_scale
        self.random_state = random_state

    def _basis(self):
        return self.state_.estimate

    def partial_fit_block(self, block):
        r = int(self.n_components)
        if not hasattr(self, "state_"):
            if r > block.n:
                raise DimensionMismatch(f"n_components={r} exceeds n_features={block.n}")
            rng = check_random_state(self.random_state)
            start = orthonormalize(rng.standard_normal((block.n, r)))
            self.state_ = GrouseState(start, 1, float(self.step_scale))
            self.n_features_in_ = block.n
        elif block.n != self.n_features_in_:
            raise DimensionMismatch(f"X has {block.n} features, expected {self.n_features_in_}")
        state = self.state_
        for j in range(block.b):
            y = ObservedVector(block.values[:, j], np.flatnonzero(block.mask[:, j]))
            state = grouse_step(state, y)
        self.state_ = state
        return self

    def partial_fit(self, X, y=None, mask=None):
        return self.partial_fit_block(to_block(X, mask))

    def fit(self, X, y=None, mask=None):
        for attr in ("state_", "n_features_in_"):
            self.__dict__.pop(attr, None)
        return self.partial_fit(X, mask=mask)


class ZeroFillSVD(_SubspaceMixin, BaseEstimator):
    """Top singular subspace of the zero-filled data, with no interpolation.

    :meth:`partial_fit` accumulates the ``n x n`` second-moment matrix
    ``Y Y^T`` so the estimate after each call equals the batch answer on all
    data seen so far.
    """

    def __init__(self, n_components):
        self.n_components = n_components

    def _basis(self):
        return self.basis_

    def partial_fit_block(self, block):
        r = int(self.n_components)
        if not hasattr(self, "gram_"):
            if r > block.n:
                raise DimensionMismatch(f"n_components={r} exceeds n_features={block.n}")
            self.gram_ = np.zeros((block.n, block.n))
            self.n_samples_seen_ = 0
            self.n_features_in_ = block.n
        elif block.n != self.n_features_in_:
            raise DimensionMismatch(f"X has {block.n} features, expected {self.n_features_in_}")
        self.gram_ += block.values @ block.values.T
        self.n_samples_seen_ += block.b
        self.basis_ = truncated_svd_left(self.gram_, r)
        return self

    def partial_fit(self, X, y=None, mask=None):
        return self.partial_fit_block(to_block(X, mask))

    def fit(self, X, y=None, mask=None):
        for attr in ("gram_", "basis_", "n_samples_seen_", "n_features_in_"):
            self.__dict__.pop(attr, None)
        return self.partial_fit(X, mask=mask)
