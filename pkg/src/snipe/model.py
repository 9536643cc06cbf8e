"""Generative observation model: subspaces, coefficient streams and entrywise masks.

Every vector ``s_t = S q_t`` of an ``r``-dimensional subspace is revealed
coordinate by coordinate with probability ``p``. Unrevealed entries are stored
as zeros together with an explicit boolean mask.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_omega
from .exceptions import ConfigInvalid, DimensionMismatch, ParseError
from .linalg import orthonormalize

__all__ = [
    "ObservedVector",
    "MeasurementBlock",
    "GroundTruth",
    "StreamConfig",
    "generate_generic_subspace",
    "generate_coherent_subspace",
    "sample_observed_vector",
    "stream_blocks",
    "spawn_streams",
    "write_stream",
    "read_stream",
]

STREAM_HEADER = "#snipe-stream v1 n="
SUBSPACE_KINDS = ("generic", "coherent")


@dataclass(frozen=True, eq=False)
class ObservedVector:
    """A length-``n`` measurement revealed on the 0-based index set ``omega``."""

    values: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        omega = check_omega(self.omega, values.shape[0])
        off = np.ones(values.shape[0], dtype=bool)
        off[omega] = False
        if np.any(values[off] != 0):
            raise ValueError("values must be zero outside omega")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "omega", omega)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def mask(self):
        m = np.zeros(self.n, dtype=bool)
        m[self.omega] = True
        return m

    @classmethod
    def from_masked(cls, values, mask):
        mask = np.asarray(mask, dtype=bool)
        return cls(np.where(mask, values, 0.0), np.flatnonzero(mask))

    def __eq__(self, other):
        if not isinstance(other, ObservedVector):
            return NotImplemented
        return np.array_equal(self.omega, other.omega) and np.array_equal(
            self.values, other.values
        )


@dataclass(frozen=True, eq=False)
class MeasurementBlock:
    """``b`` observed vectors stored column-wise as zero-filled values plus mask."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        if values.ndim != 2 or values.shape != mask.shape:
            raise DimensionMismatch(
                f"values {values.shape} and mask {mask.shape} must be equal 2-D shapes"
            )
        if values.shape[1] < 1:
            raise DimensionMismatch("a block holds at least one vector")
        if np.any(values[~mask] != 0):
            raise ValueError("values must be zero outside the mask")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def b(self):
        return self.values.shape[1]

    @property
    def columns(self):
        return [
            ObservedVector(self.values[:, j], np.flatnonzero(self.mask[:, j]))
            for j in range(self.b)
        ]

    @classmethod
    def from_vectors(cls, vectors):
        vectors = list(vectors)
        if not vectors:
            raise DimensionMismatch("a block holds at least one vector")
        ns = {v.n for v in vectors}
        if len(ns) != 1:
            raise DimensionMismatch(f"vectors have different lengths {sorted(ns)}")
        values = np.column_stack([v.values for v in vectors])
        mask = np.column_stack([v.mask for v in vectors])
        return cls(values, mask)


@dataclass(frozen=True)
class GroundTruth:
    """Evaluation-only view of a block: the true basis and its ``(b, r)`` coefficients."""

    basis: np.ndarray
    coefficients: np.ndarray


def _as_block_sizes(block_sizes):
    try:
        sizes = tuple(int(b) for b in block_sizes)
    except TypeError:
        raise ConfigInvalid("block_sizes must be a sequence of integers") from None
    return sizes


@dataclass(frozen=True)
class StreamConfig:
    """Parameters of a synthetic stream.

    Attributes
    ----------
    n, r : int
        Ambient and subspace dimensions.
    p : float
        Per-entry observation probability in ``(0, 1]``.
    block_sizes : tuple of int
        ``b_1, ..., b_K``; each at least ``r``.
    seed : int
        Root seed; subspace, coefficient and mask draws use independent
        child streams of it.
    subspace_kind : {"generic", "coherent"}
    """

    n: int
    r: int
    p: float
    block_sizes: tuple
    seed: int = 0
    subspace_kind: str = "generic"
    coefficient_kind: str = "standard_gaussian"

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", _as_block_sizes(self.block_sizes))
        if not (isinstance(self.n, (int, np.integer)) and isinstance(self.r, (int, np.integer))):
            raise ConfigInvalid("n and r must be integers")
        if not 1 <= self.r <= self.n:
            raise ConfigInvalid(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if not 0 < self.p <= 1:
            raise ConfigInvalid(f"p must lie in (0, 1], got {self.p}")
        if not self.block_sizes:
            raise ConfigInvalid("at least one block is required")
        if min(self.block_sizes) < self.r:
            raise ConfigInvalid(f"every block size must be >= r={self.r}")
        if self.subspace_kind not in SUBSPACE_KINDS:
            raise ConfigInvalid(f"subspace_kind must be one of {SUBSPACE_KINDS}")
        if self.coefficient_kind != "standard_gaussian":
            raise ConfigInvalid("only standard_gaussian coefficients are supported")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigInvalid("seed must be an unsigned 64-bit integer")

    @property
    def T(self):
        return sum(self.block_sizes)

    @property
    def K(self):
        return len(self.block_sizes)

    @classmethod
    def uniform(cls, n, r, p, b, T, seed=0, subspace_kind="generic", first_block=None):
        """Equal blocks of size ``b`` (optionally a different first block) covering ``T``.

        A remainder of at least ``r`` vectors becomes a final short block;
        a smaller remainder is merged into the last block.
        """
        b1 = b if first_block is None else first_block
        if T < b1:
            raise ConfigInvalid(f"T={T} is smaller than the first block {b1}")
        sizes = [b1]
        rest = T - b1
        sizes += [b] * (rest // b)
        rem = rest % b
        if rem >= r:
            sizes.append(rem)
        elif rem:
            sizes[-1] += rem
        return cls(n, r, p, tuple(sizes), seed, subspace_kind)


def spawn_streams(seed, count=4):
    """Independent PCG64 generators for (subspace, coefficients, masks, extra)."""
    ss = np.random.SeedSequence(int(seed))
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(count)]


def generate_generic_subspace(n, r, rng):
    """Orthonormalized ``n x r`` standard Gaussian matrix."""
    if not 1 <= r <= n:
        raise DimensionMismatch(f"need 1 <= r <= n, got r={r}, n={n}")
    return orthonormalize(rng.standard_normal((n, r)))


def generate_coherent_subspace(n, r, rng):
    """Generic subspace with row ``i`` scaled by ``1 / (i + 1)``, re-orthonormalized."""
    S = generate_generic_subspace(n, r, rng)
    return orthonormalize(S / np.arange(1, n + 1)[:, None])


def sample_observed_vector(s, p, rng):
    """Reveal each entry of ``s`` independently with probability ``p``."""
    s = np.asarray(s, dtype=np.float64).reshape(-1)
    if not 0 < p <= 1:
        raise ConfigInvalid(f"p must lie in (0, 1], got {p}")
    mask = rng.random(s.shape[0]) < p
    return ObservedVector.from_masked(s, mask)


def stream_blocks(cfg):
    """Yield ``(MeasurementBlock, GroundTruth)`` pairs for a :class:`StreamConfig`.

    Within block ``k`` the coefficients are drawn as a ``(b_k, r)`` Gaussian
    matrix and the mask as ``b_k`` consecutive length-``n`` uniform draws, so
    the subspace and coefficients do not depend on ``p``.
    """
    if not isinstance(cfg, StreamConfig):
        raise ConfigInvalid("stream_blocks expects a StreamConfig")
    rng_s, rng_q, rng_m, _ = spawn_streams(cfg.seed)
    if cfg.subspace_kind == "generic":
        S = generate_generic_subspace(cfg.n, cfg.r, rng_s)
    else:
        S = generate_coherent_subspace(cfg.n, cfg.r, rng_s)
    S.setflags(write=False)
    for b in cfg.block_sizes:
        Q = rng_q.standard_normal((b, cfg.r))
        mask = (rng_m.random((b, cfg.n)) < cfg.p).T
        values = np.where(mask, S @ Q.T, 0.0)
        yield MeasurementBlock(values, mask), GroundTruth(S, Q)


def _format_vector(v):
    return ",".join(f"{i + 1}:{x:.17g}" for i, x in zip(v.omega, v.values[v.omega]))


def write_stream(path, vectors, n=None):
    """Write observed vectors in arrival order to a text stream file.

    The header is ``#snipe-stream v1 n=<n>``; each following line holds
    comma-separated ``index:value`` pairs with 1-based ascending indices.
    """
    vectors = list(vectors)
    if n is None:
        if not vectors:
            raise ValueError("n is required for an empty stream")
        n = vectors[0].n
    lines = [f"{STREAM_HEADER}{n}"]
    for v in vectors:
        if v.n != n:
            raise DimensionMismatch(f"vector of length {v.n} in a stream with n={n}")
        lines.append(_format_vector(v))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_stream(path):
    """Parse a stream file; returns ``(n, list of ObservedVector)``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith(STREAM_HEADER):
        raise ParseError(1, f"expected header '{STREAM_HEADER}<n>'")
    try:
        n = int(lines[0][len(STREAM_HEADER):])
    except ValueError:
        raise ParseError(1, "header has a non-integer n") from None
    if n < 1:
        raise ParseError(1, "n must be positive")
    vectors = []
    for lineno, line in enumerate(lines[1:], start=2):
        values = np.zeros(n)
        idx = []
        if line:
            for item in line.split(","):
                key, sep, val = item.partition(":")
                if not sep:
                    raise ParseError(lineno, f"entry {item!r} is not 'index:value'")
                try:
                    i = int(key)
                    x = float(val)
                except ValueError:
                    raise ParseError(lineno, f"entry {item!r} is not 'index:value'") from None
                if not 1 <= i <= n:
                    raise ParseError(lineno, f"index {i} outside [1, {n}]")
                if idx and i <= idx[-1] + 1:
                    raise ParseError(lineno, "indices must be strictly ascending")
                idx.append(i - 1)
                values[i - 1] = x
        vectors.append(ObservedVector(values, np.array(idx, dtype=np.intp)))
    return n, vectors
