"""Block-wise subspace estimation from incomplete vectors.

The estimate after block ``k`` is the top-``r`` left singular span of the
interpolated block ``R_k``, whose columns agree with the observations on
their support and are filled elsewhere from the previous estimate.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_basis
from .exceptions import BlockTooSmall, DimensionMismatch, EmptyStream
from .linalg import _leading_left, grassmann_distance, masked_coefficients, truncated_svd_left
from .model import MeasurementBlock, ObservedVector

__all__ = [
    "SnipeConfig",
    "SnipeState",
    "snipe_init",
    "interpolate_column",
    "interpolate_block",
    "snipe_step",
    "snipe_run",
]


@dataclass(frozen=True)
class SnipeConfig:
    """Target rank and whether blocks narrower than the rank are rejected."""

    r: int
    min_block_guard: bool = True

    def __post_init__(self):
        if int(self.r) < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")


@dataclass(frozen=True)
class SnipeState:
    """Everything retained between blocks: the ``(n, r)`` estimate and a block counter."""

    estimate: np.ndarray
    blocks_processed: int
    config: SnipeConfig

    @property
    def n(self):
        return self.estimate.shape[0]


def _check_block(block, cfg, n=None):
    if not isinstance(block, MeasurementBlock):
        raise TypeError(f"expected MeasurementBlock, got {type(block).__name__}")
    if n is not None and block.n != n:
        raise DimensionMismatch(f"block has n={block.n}, estimate has n={n}")
    if cfg.r > block.n:
        raise DimensionMismatch(f"r={cfg.r} exceeds n={block.n}")
    if block.b < cfg.r and cfg.min_block_guard:
        raise BlockTooSmall(f"block of {block.b} vectors is narrower than r={cfg.r}")


def _top_r(M, r):
    if r <= M.shape[1]:
        return truncated_svd_left(M, r)
    return _leading_left(M, r)


def _frozen(a):
    a.setflags(write=False)
    return a


def snipe_init(block, cfg):
    """Initial estimate: top-``r`` left singular span of the zero-filled first block."""
    _check_block(block, cfg)
    return SnipeState(_frozen(_top_r(block.values, cfg.r)), 1, cfg)


def interpolate_block(basis, block):
    """Least-change completion of every column of ``block`` against ``basis``.

    Column ``j`` is ``y_j + P_{omega_j^C} B (P_{omega_j} B)^+ y_j``.
    """
    basis = np.asarray(basis)
    if basis.shape[0] != block.n:
        raise DimensionMismatch(f"basis has {basis.shape[0]} rows, block has n={block.n}")
    coef = masked_coefficients(basis, block.values, block.mask)
    return np.where(block.mask, block.values, basis @ coef)


def interpolate_column(basis, y):
    """Single-vector form of :func:`interpolate_block`."""
    if not isinstance(y, ObservedVector):
        raise TypeError("y must be an ObservedVector")
    block = MeasurementBlock(y.values[:, None], y.mask[:, None])
    return interpolate_block(basis, block)[:, 0]


def snipe_step(state, block, return_interpolation=False):
    """Fold one block into the estimate.

    All columns are interpolated against the previous estimate; the new
    estimate is the top-``r`` left singular span of the result. With
    ``return_interpolation=True`` the interpolated block is returned too.
    """
    cfg = state.config
    _check_block(block, cfg, n=state.n)
    R = interpolate_block(state.estimate, block)
    new = SnipeState(_frozen(_top_r(R, cfg.r)), state.blocks_processed + 1, cfg)
    if return_interpolation:
        return new, R
    return new


def snipe_run(blocks, cfg, truth=None):
    """Run over an iterable of blocks.

    Parameters
    ----------
    blocks : iterable of MeasurementBlock
    cfg : SnipeConfig
    truth : ndarray, optional
        True ``(n, r)`` basis; when given, the distance to it is recorded
        after every block.

    Returns
    -------
    state : SnipeState
    trace : list of float
        Empty when ``truth`` is None.
    """
    if truth is not None:
        truth = check_basis(truth, "truth")
    state = None
    trace = []
    for block in blocks:
        state = snipe_init(block, cfg) if state is None else snipe_step(state, block)
        if truth is not None:
            trace.append(grassmann_distance(truth, state.estimate))
    if state is None:
        raise EmptyStream("the stream yielded no blocks")
    return state, trace
