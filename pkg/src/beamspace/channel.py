"""Saleh-Valenzuela beamspace channel synthesis and dataset files.

A lens antenna array focuses each incident plane wave onto a small
neighbourhood of the M x N focal-plane array, so a multipath channel is a
sparse superposition of 2D sinc-shaped responses.  Channels are generated
as

    H = sqrt(M*N / P) * sum_i  gain_i * A(az_i, el_i)

where P is the number of paths and A is the unit-energy array response.
With standard-normal gains this makes E||H||_F^2 = M*N, i.e. unit energy
per antenna, which keeps the SNR convention of :mod:`beamspace.measurement`
clean.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, TruncatedFileError

DATASET_MAGIC = b"BCHD"
DATASET_VERSION = 1

_HEADER = struct.Struct("<4sIIIIQ")  # magic, version, m, n, count, seed


@dataclass(frozen=True)
class PathParameters:
    """One propagation path: a gain and the spatial frequencies of its AoA.

    Frequencies live in [-1/2, 1/2); they encode azimuth/elevation angles
    the way the focal-plane grid resolves them.
    """

    gain: float
    azimuth_freq: float
    elevation_freq: float

    def __post_init__(self):
        for name in ("azimuth_freq", "elevation_freq"):
            f = getattr(self, name)
            if not (-0.5 <= f < 0.5):
                raise ValueError(f"{name} must lie in [-1/2, 1/2), got {f}")


@dataclass(frozen=True)
class ChannelDataset:
    """A batch of channel realizations sharing one geometry.

    ``samples`` has shape (count, m, n) and dtype float32, matching the
    on-disk precision so file round trips are bit-exact.
    """

    m: int
    n: int
    seed: int
    samples: np.ndarray

    @property
    def count(self):
        return self.samples.shape[0]


def sample_paths(rng, num_paths):
    """Draw ``num_paths`` path parameter records.

    Gains are i.i.d. standard normal, spatial frequencies i.i.d. uniform
    on [-1/2, 1/2).  Deterministic given the generator state.
    """
    if num_paths < 1:
        raise ValueError(f"num_paths must be >= 1, got {num_paths}")
    gains = rng.standard_normal(num_paths)
    az = rng.uniform(-0.5, 0.5, num_paths)
    el = rng.uniform(-0.5, 0.5, num_paths)
    return [PathParameters(float(g), float(a), float(e)) for g, a, e in zip(gains, az, el)]


def array_response(azimuth_freq, elevation_freq, m, n):
    """Unit-Frobenius-norm focal-plane response of a single plane wave.

    Separable sinc kernel on the centered grid u_p = p - (m-1)/2,
    v_q = q - (n-1)/2:

        A[p, q]  propto  sinc(u_p - m*azimuth_freq) * sinc(v_q - n*elevation_freq)

    An on-grid frequency pair produces a one-hot matrix; off-grid pairs
    leak energy into neighbouring beams.
    """
    if not (-0.5 <= azimuth_freq < 0.5):
        raise ValueError(f"azimuth_freq must lie in [-1/2, 1/2), got {azimuth_freq}")
    if not (-0.5 <= elevation_freq < 0.5):
        raise ValueError(f"elevation_freq must lie in [-1/2, 1/2), got {elevation_freq}")
    if m < 1 or n < 1:
        raise ValueError("array dimensions must be positive")
    u = np.arange(m) - (m - 1) / 2.0
    v = np.arange(n) - (n - 1) / 2.0
    a = np.sinc(u - m * azimuth_freq)
    b = np.sinc(v - n * elevation_freq)
    response = np.outer(a, b)
    return response / np.linalg.norm(response)


def synthesize_channel(paths, m, n):
    """Superpose path responses into an M x N beamspace channel."""
    if len(paths) == 0:
        raise ValueError("paths must be nonempty")
    image = np.zeros((m, n))
    for p in paths:
        image += p.gain * array_response(p.azimuth_freq, p.elevation_freq, m, n)
    image *= np.sqrt(m * n / len(paths))
    return image


def vectorize(image):
    """Stack an M x N image column by column into a length-MN vector."""
    return np.asarray(image).flatten(order="F")


def devectorize(vector, m, n):
    """Inverse of :func:`vectorize`; rejects length mismatches."""
    vector = np.asarray(vector)
    if vector.size != m * n:
        raise ValueError(f"vector length {vector.size} does not match {m}x{n}")
    return vector.reshape((m, n), order="F")


def generate_dataset(count, num_paths, m, n, seed):
    """Generate ``count`` independent channels, reproducibly.

    Sample i is drawn from a child generator spawned from (seed, i), so
    any sample can be regenerated in isolation and the result does not
    depend on generation order.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    children = np.random.SeedSequence(seed).spawn(count)
    samples = np.empty((count, m, n), dtype=np.float32)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        samples[i] = synthesize_channel(sample_paths(rng, num_paths), m, n)
    return ChannelDataset(m=m, n=n, seed=seed, samples=samples)


def save_dataset(dataset, path):
    """Write a dataset file: BCHD header, then float32 columns per sample."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DATASET_MAGIC, DATASET_VERSION, dataset.m, dataset.n,
                              dataset.count, dataset.seed))
        for image in dataset.samples:
            fh.write(image.astype("<f4").tobytes(order="F"))


def load_dataset(path):
    """Read a BCHD dataset file back into a :class:`ChannelDataset`."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise TruncatedFileError(f"dataset header truncated: {path}")
        magic, version, m, n, count, seed = _HEADER.unpack(header)
        if magic != DATASET_MAGIC:
            raise FormatError(f"bad dataset magic {magic!r} in {path}")
        if version != DATASET_VERSION:
            raise FormatError(f"unsupported dataset version {version} in {path}")
        payload = fh.read(4 * m * n * count)
        if len(payload) < 4 * m * n * count:
            raise TruncatedFileError(f"dataset payload truncated: {path}")
    flat = np.frombuffer(payload, dtype="<f4")
    samples = flat.reshape((count, n, m)).transpose(0, 2, 1).copy()
    return ChannelDataset(m=m, n=n, seed=seed, samples=samples)
