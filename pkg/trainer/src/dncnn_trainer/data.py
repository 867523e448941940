"""Channel dataset loading and noisy training-pair synthesis.

Datasets arrive in the BCHD binary format written by the estimation
toolkit's ``generate`` command.  One global affine map (computed from the
training set's min/max) carries channel values into [0, 1]; noisy inputs
are built by adding Gaussian noise whose std is drawn uniformly from a
configured range, and the regression target is the noise itself
(residual learning).
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, TruncatedFileError

DATASET_MAGIC = b"BCHD"
DATASET_VERSION = 1

_HEADER = struct.Struct("<4sIIIIQ")  # magic, version, m, n, count, seed


def load_dataset(path):
    """Read a BCHD file; returns float32 samples of shape (count, m, n)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise TruncatedFileError(f"dataset header truncated: {path}")
        magic, version, m, n, count, _seed = _HEADER.unpack(header)
        if magic != DATASET_MAGIC:
            raise FormatError(f"bad dataset magic {magic!r} in {path}")
        if version != DATASET_VERSION:
            raise FormatError(f"unsupported dataset version {version} in {path}")
        payload = fh.read(4 * m * n * count)
        if len(payload) < 4 * m * n * count:
            raise TruncatedFileError(f"dataset payload truncated: {path}")
    flat = np.frombuffer(payload, dtype="<f4")
    return flat.reshape((count, n, m)).transpose(0, 2, 1).copy()


@dataclass(frozen=True)
class Affine:
    """v_trained = scale * v_channel + offset."""

    scale: float
    offset: float

    def apply(self, x):
        return self.scale * x + self.offset


def compute_affine(samples):
    """Affine that maps the set's min to 0 and max to 1."""
    lo = float(samples.min())
    hi = float(samples.max())
    if hi <= lo:
        raise ValueError("degenerate dataset: min == max")
    return Affine(scale=1.0 / (hi - lo), offset=-lo / (hi - lo))


def prepare_training_pairs(dataset_path, noise_range, rng, affine=None):
    """Yield (noisy, residual-target) float32 pairs in the trained domain.

    The affine defaults to the one computed from this dataset; pass the
    training set's affine when preparing validation pairs.
    """
    lo, hi = noise_range
    if lo < 0 or hi < lo:
        raise ValueError(f"bad noise range {noise_range}")
    samples = load_dataset(dataset_path)
    if affine is None:
        affine = compute_affine(samples)
    for image in samples:
        clean = affine.apply(image.astype(np.float32))
        sigma = rng.uniform(lo, hi)
        noise = (sigma * rng.standard_normal(clean.shape)).astype(np.float32)
        yield clean + noise, noise
