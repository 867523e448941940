"""Scalar state evolution predicting the per-layer solver MSE analytically.

For a fixed channel realization h_o, the recursion tracks theta^l, the
average per-entry MSE of the denoiser output, and the effective noise
variance it implies:

    sigma_e^2 = theta^l / delta + sigma_n_sq
    theta^{l+1} = E_eps || D(h_o + sigma_e * eps, sigma_e) - h_o ||^2 / MN

with eps ~ N(0, I); the expectation is evaluated by Monte Carlo.  Starting
from theta^0 = ||h_o||^2 / MN matches the solver's zero initialization.

``sigma_n_sq`` is the measurement-noise variance in the solver's
column-normalized frame; for the unit-row selection network that is the
physical K-space variance divided by delta (bench does this conversion).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeTrajectory:
    theta: np.ndarray  # length layers + 1, theta[0] = ||h_o||^2 / MN
    sigma_e_sq: np.ndarray  # same length; sigma_e_sq[l] = theta[l]/delta + sigma_n_sq
    delta: float
    sigma_n_sq: float
    mc_trials: int

    def __len__(self):
        return len(self.theta)


def se_step(h_o, denoiser, theta_prev, delta, sigma_n_sq, mc_trials, rng):
    """One recursion update; returns (theta_next, sigma_e_sq)."""
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if theta_prev < 0:
        raise ValueError(f"theta_prev must be >= 0, got {theta_prev}")
    if mc_trials < 1:
        raise ValueError(f"mc_trials must be >= 1, got {mc_trials}")
    h_o = np.asarray(h_o, dtype=np.float64)
    mn = h_o.size
    sigma_e_sq = theta_prev / delta + sigma_n_sq
    sigma_e = np.sqrt(sigma_e_sq)
    total = 0.0
    for _ in range(mc_trials):
        eps = rng.standard_normal(mn)
        diff = denoiser.denoise(h_o + sigma_e * eps, sigma_e) - h_o
        total += float(diff @ diff)
    return total / (mn * mc_trials), sigma_e_sq


def se_run(h_o, denoiser, layers, delta, sigma_n_sq, mc_trials=50, rng=None):
    """Run ``layers`` updates from the zero-estimate start."""
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    if rng is None:
        rng = np.random.default_rng()
    h_o = np.asarray(h_o, dtype=np.float64)
    theta = [float(np.mean(h_o**2))]
    for _ in range(layers):
        theta_next, _ = se_step(h_o, denoiser, theta[-1], delta, sigma_n_sq,
                                mc_trials, rng)
        theta.append(theta_next)
    theta = np.array(theta)
    return SeTrajectory(theta=theta, sigma_e_sq=theta / delta + sigma_n_sq,
                        delta=delta, sigma_n_sq=sigma_n_sq, mc_trials=mc_trials)
