"""Denoising-based AMP recursion for the selection-network measurements.

Each layer forms a pseudo-data vector, denoises it, and updates the
measurement residual with an Onsager correction:

    x^l      = h^l + (MN/K) * W^T z^l
    sigma^l  = ||z^l|| * sqrt(MN) / K
    h^{l+1}  = D(x^l, sigma^l)
    z^{l+1}  = r - W h^{l+1} + (div D / K) * z^l

The operator W has unit rows (+-1/sqrt(MN) entries), so its adjoint only
returns a delta = K/MN fraction of the identity on average; the MN/K gain
on the adjoint and the matching sqrt(MN)/K noise estimate put the
recursion in the column-normalized frame where AMP is exact.  The Onsager
term keeps x^l - h white Gaussian with std sigma^l, which is what makes a
plain denoiser the right nonlinearity and state evolution predictive.

The same denoiser instance is reused at every layer, and a run executes
exactly ``layers`` layers with no early stopping.
"""

from dataclasses import dataclass

import numpy as np

from .denoisers import mc_divergence
from .errors import NumericError


@dataclass(frozen=True)
class SolverState:
    h_hat: np.ndarray  # current channel estimate, length MN
    z: np.ndarray  # current measurement residual, length K
    sigma_hat: float  # noise-std estimate for the next denoiser call
    layer_index: int


@dataclass(frozen=True)
class LayerRecord:
    layer: int
    sigma_hat: float
    divergence: float | None  # None for the initialization record
    nmse_truth: float | None  # ||h_hat - h||^2 / ||h||^2 when truth given
    nmse_estimate: float | None  # ||h_hat - h||^2 / ||h_hat||^2; None if h_hat = 0


@dataclass(frozen=True)
class SolverTrajectory:
    records: tuple

    def __len__(self):
        return len(self.records)

    def sigma_hats(self):
        return np.array([rec.sigma_hat for rec in self.records])

    def nmse_truth(self):
        return np.array([rec.nmse_truth for rec in self.records], dtype=np.float64)


def noise_std_estimate(z, k, mn):
    """Effective noise std of the pseudo-data: ||z|| * sqrt(MN) / K."""
    return float(np.linalg.norm(z)) * np.sqrt(mn) / k


def init(r, mn):
    """Start from the zero estimate with the raw measurement as residual."""
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 1 or r.size < 1:
        raise ValueError("r must be a nonempty vector")
    return SolverState(h_hat=np.zeros(mn), z=r.copy(),
                       sigma_hat=noise_std_estimate(r, r.size, mn), layer_index=0)


def layer_step(state, op, r, denoiser, rng, onsager=True):
    """Advance one layer; returns (new state, divergence estimate).

    ``onsager=False`` drops the correction term (diagnostic only; the
    effective noise then loses its Gaussianity).
    """
    k, mn = op.k, op.mn
    x = state.h_hat + (mn / k) * op.apply_adjoint(state.z)
    sigma = noise_std_estimate(state.z, k, mn)
    h_next = denoiser.denoise(x, sigma)
    estimate = mc_divergence(denoiser, x, sigma, rng=rng)
    if not np.isfinite(estimate.value):
        raise NumericError(f"divergence diverged at layer {state.layer_index}",
                           layer=state.layer_index)
    z_next = r - op.apply(h_next)
    if onsager:
        z_next += (estimate.value / k) * state.z
    return (SolverState(h_hat=h_next, z=z_next,
                        sigma_hat=noise_std_estimate(z_next, k, mn),
                        layer_index=state.layer_index + 1),
            estimate)


def _record(state, divergence, truth):
    nmse_truth = nmse_estimate = None
    if truth is not None:
        err = float(np.sum((state.h_hat - truth) ** 2))
        nmse_truth = err / float(np.sum(truth**2))
        denom = float(np.sum(state.h_hat**2))
        nmse_estimate = err / denom if denom > 0 else None
    return LayerRecord(layer=state.layer_index, sigma_hat=state.sigma_hat,
                       divergence=divergence, nmse_truth=nmse_truth,
                       nmse_estimate=nmse_estimate)


def run(r, op, denoiser, layers=10, rng=None, truth=None, onsager=True):
    """Run the full recursion; returns (h_hat, trajectory).

    The trajectory holds layers + 1 records (initialization included).
    ``rng`` seeds the divergence probes, so a fixed generator state makes
    the whole run reproducible.
    """
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    if rng is None:
        rng = np.random.default_rng()
    state = init(r, op.mn)
    records = [_record(state, None, truth)]
    for _ in range(layers):
        state, estimate = layer_step(state, op, r, denoiser, rng, onsager=onsager)
        records.append(_record(state, estimate.value, truth))
    return state.h_hat, SolverTrajectory(records=tuple(records))
