"""The RF-chain selection network and noisy compressed measurements.

K RF chains observe the MN-antenna focal plane through a fully connected
network of 1-bit phase shifters: a K x MN matrix of equiprobable +-1 signs,
scaled by 1/sqrt(MN) so every row has unit energy.  Measurements are

    r = W h + noise,        noise ~ N(0, sigma_n^2 I_K)

with the pilot symbol fixed to 1.  Under the unit-row scaling each
measurement carries unit signal energy (E||h||^2/MN = 1 by construction of
the channel model), so SNR = 1/sigma_n^2.
"""

import numpy as np


class MeasurementOperator:
    """Dense +-1/sqrt(MN) selection-network matrix with its adjoint."""

    def __init__(self, sign_matrix, scale):
        sign_matrix = np.asarray(sign_matrix, dtype=np.float64)
        if sign_matrix.ndim != 2:
            raise ValueError("sign_matrix must be 2D")
        if not np.all(np.abs(sign_matrix) == 1.0):
            raise ValueError("sign_matrix entries must be +-1")
        self.sign_matrix = sign_matrix
        self.scale = float(scale)
        self._w = sign_matrix * self.scale

    @property
    def k(self):
        return self._w.shape[0]

    @property
    def mn(self):
        return self._w.shape[1]

    @property
    def delta(self):
        """Measurement ratio K/MN."""
        return self.k / self.mn

    def apply(self, h):
        """Forward product W h (length K)."""
        h = np.asarray(h)
        if h.shape != (self.mn,):
            raise ValueError(f"expected vector of length {self.mn}, got shape {h.shape}")
        return self._w @ h

    def apply_adjoint(self, z):
        """Adjoint product W^T z (length MN)."""
        z = np.asarray(z)
        if z.shape != (self.k,):
            raise ValueError(f"expected vector of length {self.k}, got shape {z.shape}")
        return self._w.T @ z


def measurement_count(delta, mn):
    """Number of RF chains for a measurement ratio: round(delta * MN), min 1."""
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return max(1, round(delta * mn))


def sample_selection_network(k, m, n, rng):
    """Draw a K x MN operator of i.i.d. equiprobable signs."""
    mn = m * n
    if not (1 <= k <= mn):
        raise ValueError(f"k must lie in [1, {mn}], got {k}")
    signs = rng.integers(0, 2, size=(k, mn)).astype(np.float64) * 2.0 - 1.0
    return MeasurementOperator(signs, 1.0 / np.sqrt(mn))


def measure(op, h, sigma_n, rng):
    """Noisy measurement r = W h + noise with i.i.d. N(0, sigma_n^2) entries."""
    if sigma_n < 0:
        raise ValueError(f"sigma_n must be >= 0, got {sigma_n}")
    r = op.apply(h)
    if sigma_n > 0:
        r = r + sigma_n * rng.standard_normal(op.k)
    return r


def snr_to_sigma(snr_db):
    """Noise standard deviation for a target SNR in dB (SNR = 1/sigma_n^2)."""
    return 10.0 ** (-snr_db / 20.0)
