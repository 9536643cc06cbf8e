"""Streaming subspace estimation from incomplete, entrywise-subsampled vectors."""

from .core import (
    SnipeConfig,
    SnipeState,
    interpolate_block,
    interpolate_column,
    snipe_init,
    snipe_run,
    snipe_step,
)
from .estimators import GROUSE, SNIPE, ZeroFillSVD
from .linalg import (
    coherence,
    grassmann_distance,
    masked_pinv_apply,
    orthonormalize,
    principal_angles,
    spectral_summary,
    truncated_svd_left,
)
from .model import MeasurementBlock, ObservedVector, StreamConfig, stream_blocks

__version__ = "0.1.0"

__all__ = [
    "SNIPE",
    "GROUSE",
    "ZeroFillSVD",
    "SnipeConfig",
    "SnipeState",
    "snipe_init",
    "snipe_step",
    "snipe_run",
    "interpolate_block",
    "interpolate_column",
    "MeasurementBlock",
    "ObservedVector",
    "StreamConfig",
    "stream_blocks",
    "coherence",
    "grassmann_distance",
    "masked_pinv_apply",
    "orthonormalize",
    "principal_angles",
    "spectral_summary",
    "truncated_svd_left",
]
