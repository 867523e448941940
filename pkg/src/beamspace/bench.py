"""Experiment driver: NMSE metric, Monte-Carlo sweeps, and SE comparison.

Every trial draws its channel, selection network, measurement noise, and
divergence probes from generators spawned off (seed, delta index, snr
index, trial index), so results are reproducible, trials are independent,
and all denoisers see identical problem instances.

NMSE follows the estimate-denominator convention by default,

    NMSE = ||h_hat - h||^2 / ||h_hat||^2,

with the conventional truth denominator ||h||^2 available as a mode.
Ensemble NMSE in dB is 10*log10(mean per-trial ratio); trials whose
estimate is identically zero have no defined ratio in estimate mode and
are excluded from the mean (their count is reported).
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import sample_paths, synthesize_channel, vectorize
from .cnn import DnCnnDenoiser, load_weights
from .damp import run as damp_run
from .denoisers import DEFAULT_SOFT_LAMBDA, SoftThresholdDenoiser, WienerDenoiser
from .errors import ConfigurationError, MetricUndefined
from .measurement import measure, measurement_count, sample_selection_network, snr_to_sigma
from .state_evolution import se_run

DENOISER_NAMES = ("wiener", "soft", "dncnn")

CSV_HEADER = "delta,snr_db,denoiser,layer,nmse_db_mean,nmse_db_stderr,trials"


@dataclass
class ExperimentConfig:
    m: int = 64
    n: int = 64
    num_paths: int = 4
    deltas: tuple = (0.1,)
    snr_dbs: tuple = (10.0,)
    denoisers: tuple = ("soft",)
    weights_path: str | None = None
    layers: int = 10
    trials: int = 1
    seed: int = 0
    nmse_denominator: str = "estimate"
    soft_lambda: float = DEFAULT_SOFT_LAMBDA
    se_trials: int = 50
    out_path: str | None = None


@dataclass(frozen=True)
class SweepRow:
    delta: float
    snr_db: float
    denoiser: str
    layer: int
    nmse_db_mean: float
    nmse_db_stderr: float
    trials: int


@dataclass
class SweepResult:
    rows: list
    excluded_trials: int = 0

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.delta, r.snr_db, r.denoiser, r.layer))

    def to_csv(self):
        lines = [CSV_HEADER]
        for r in self.sorted_rows():
            lines.append(f"{r.delta:.6f},{r.snr_db:.6f},{r.denoiser},{r.layer},"
                         f"{r.nmse_db_mean:.6f},{r.nmse_db_stderr:.6f},{r.trials}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())

    def lookup(self, delta, snr_db, denoiser, layer):
        for r in self.rows:
            if (math.isclose(r.delta, delta) and math.isclose(r.snr_db, snr_db)
                    and r.denoiser == denoiser and r.layer == layer):
                return r
        raise KeyError((delta, snr_db, denoiser, layer))


def nmse(h_hat, h, denominator="estimate"):
    """Per-trial NMSE ratio under the chosen denominator convention."""
    h_hat = np.asarray(h_hat, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if h_hat.shape != h.shape:
        raise ValueError(f"shape mismatch: {h_hat.shape} vs {h.shape}")
    if denominator not in ("estimate", "truth"):
        raise ValueError(f"unknown denominator mode {denominator!r}")
    err = float(np.sum((h_hat - h) ** 2))
    den = float(np.sum(h_hat**2)) if denominator == "estimate" else float(np.sum(h**2))
    if den == 0.0:
        raise MetricUndefined(f"zero {denominator} denominator")
    return err / den


def nmse_db(ratio):
    """10*log10 of an NMSE ratio; a perfect ratio of 0 maps to -inf."""
    if ratio < 0:
        raise ValueError(f"ratio must be >= 0, got {ratio}")
    return -math.inf if ratio == 0.0 else 10.0 * math.log10(ratio)


def validate_config(cfg):
    if cfg.m < 1 or cfg.n < 1:
        raise ConfigurationError("array dimensions must be positive")
    if cfg.num_paths < 1:
        raise ConfigurationError("num_paths must be >= 1")
    if cfg.layers < 1:
        raise ConfigurationError("layers must be >= 1")
    if cfg.trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if cfg.se_trials < 1:
        raise ConfigurationError("se_trials must be >= 1")
    if not cfg.deltas:
        raise ConfigurationError("at least one delta is required")
    for d in cfg.deltas:
        if not (0.0 < d <= 1.0):
            raise ConfigurationError(f"delta must lie in (0, 1], got {d}")
    if not cfg.denoisers:
        raise ConfigurationError("at least one denoiser is required")
    for name in cfg.denoisers:
        if name not in DENOISER_NAMES:
            raise ConfigurationError(f"unknown denoiser {name!r}; choose from {DENOISER_NAMES}")
    if cfg.nmse_denominator not in ("estimate", "truth"):
        raise ConfigurationError(f"nmse_denominator must be 'estimate' or 'truth', "
                                 f"got {cfg.nmse_denominator!r}")
    if cfg.soft_lambda <= 0:
        raise ConfigurationError("soft_lambda must be > 0")
    return cfg


def build_denoisers(cfg):
    """Instantiate every configured denoiser up front.

    A missing or unreadable weight file surfaces as a configuration error
    here, before any trial has run.
    """
    validate_config(cfg)
    built = {}
    for name in cfg.denoisers:
        if name == "wiener":
            built[name] = WienerDenoiser()
        elif name == "soft":
            built[name] = SoftThresholdDenoiser(cfg.soft_lambda)
        else:
            if cfg.weights_path is None:
                raise ConfigurationError("denoiser 'dncnn' needs --weights")
            try:
                weights = load_weights(cfg.weights_path)
            except OSError as exc:
                raise ConfigurationError(f"cannot load weights: {exc}") from exc
            built[name] = DnCnnDenoiser(weights, cfg.m, cfg.n)
    return built


def _trial_streams(cfg, di, si, t):
    """Five child seed sequences: channel, operator, noise, probe, SE."""
    return np.random.SeedSequence(entropy=cfg.seed, spawn_key=(di, si, t)).spawn(5)


def _draw_instance(cfg, delta, sigma_n, streams):
    """One problem instance: (h, operator, measurement)."""
    ch_ss, w_ss, noise_ss = streams[:3]
    h = vectorize(synthesize_channel(
        sample_paths(np.random.default_rng(ch_ss), cfg.num_paths), cfg.m, cfg.n))
    k = measurement_count(delta, cfg.m * cfg.n)
    op = sample_selection_network(k, cfg.m, cfg.n, np.random.default_rng(w_ss))
    r = measure(op, h, sigma_n, np.random.default_rng(noise_ss))
    return h, op, r


def _aggregate(ratios):
    """(mean dB, stderr dB, count) of per-trial ratios; empty -> (+inf, 0, 0)."""
    n = len(ratios)
    if n == 0:
        return math.inf, 0.0, 0
    mean = float(np.mean(ratios))
    if n > 1 and mean > 0:
        stderr = float(np.std(ratios, ddof=1)) / math.sqrt(n)
        stderr_db = (10.0 / math.log(10.0)) * stderr / mean
    else:
        stderr_db = 0.0
    return nmse_db(mean), stderr_db, n


def run_sweep(cfg):
    """Per-layer NMSE of every (delta, snr, denoiser) cell over cfg.trials."""
    denoisers = build_denoisers(cfg)
    rows = []
    excluded = 0
    for di, delta in enumerate(cfg.deltas):
        for si, snr_db in enumerate(cfg.snr_dbs):
            sigma_n = snr_to_sigma(snr_db)
            # ratios[name][layer] -> list of per-trial NMSE ratios
            ratios = {name: [[] for _ in range(cfg.layers + 1)] for name in cfg.denoisers}
            for t in range(cfg.trials):
                streams = _trial_streams(cfg, di, si, t)
                h, op, r = _draw_instance(cfg, delta, sigma_n, streams)
                for name in cfg.denoisers:
                    _, traj = damp_run(r, op, denoisers[name], layers=cfg.layers,
                                       rng=np.random.default_rng(streams[3]), truth=h)
                    for rec in traj.records:
                        ratio = (rec.nmse_estimate if cfg.nmse_denominator == "estimate"
                                 else rec.nmse_truth)
                        if ratio is None:
                            excluded += 1
                        else:
                            ratios[name][rec.layer].append(ratio)
            for name in cfg.denoisers:
                for layer in range(cfg.layers + 1):
                    mean_db, stderr_db, count = _aggregate(ratios[name][layer])
                    rows.append(SweepRow(delta, snr_db, name, layer,
                                         mean_db, stderr_db, count))
    result = SweepResult(rows=rows, excluded_trials=excluded)
    if cfg.out_path:
        result.write_csv(cfg.out_path)
    return result


def run_se_compare(cfg):
    """Paired simulated and SE-predicted per-layer NMSE curves.

    Rows named ``<denoiser>`` hold the simulated trajectory (truth
    denominator, so layer 0 is defined); rows named ``<denoiser>_se`` hold
    the prediction theta^l / theta^0 for the same channel realizations.
    The SE recursion receives the measurement-noise variance referred to
    the solver's normalized frame, sigma_n^2 / delta.
    """
    denoisers = build_denoisers(cfg)
    rows = []
    for di, delta in enumerate(cfg.deltas):
        for si, snr_db in enumerate(cfg.snr_dbs):
            sigma_n = snr_to_sigma(snr_db)
            sim = {name: [[] for _ in range(cfg.layers + 1)] for name in cfg.denoisers}
            pred = {name: [[] for _ in range(cfg.layers + 1)] for name in cfg.denoisers}
            for t in range(cfg.trials):
                streams = _trial_streams(cfg, di, si, t)
                h, op, r = _draw_instance(cfg, delta, sigma_n, streams)
                for name in cfg.denoisers:
                    _, traj = damp_run(r, op, denoisers[name], layers=cfg.layers,
                                       rng=np.random.default_rng(streams[3]), truth=h)
                    se = se_run(h, denoisers[name], cfg.layers, delta,
                                sigma_n**2 / delta, mc_trials=cfg.se_trials,
                                rng=np.random.default_rng(streams[4]))
                    for rec in traj.records:
                        sim[name][rec.layer].append(rec.nmse_truth)
                    for layer in range(cfg.layers + 1):
                        pred[name][layer].append(se.theta[layer] / se.theta[0])
            for name in cfg.denoisers:
                for layer in range(cfg.layers + 1):
                    mean_db, stderr_db, count = _aggregate(sim[name][layer])
                    rows.append(SweepRow(delta, snr_db, name, layer,
                                         mean_db, stderr_db, count))
                    mean_db, stderr_db, count = _aggregate(pred[name][layer])
                    rows.append(SweepRow(delta, snr_db, name + "_se", layer,
                                         mean_db, stderr_db, count))
    result = SweepResult(rows=rows)
    if cfg.out_path:
        result.write_csv(cfg.out_path)
    return result


def run_estimate(cfg):
    """Solve a single generated instance; returns (trajectory, h, h_hat)."""
    denoisers = build_denoisers(cfg)
    name = cfg.denoisers[0]
    delta = cfg.deltas[0]
    sigma_n = snr_to_sigma(cfg.snr_dbs[0])
    streams = _trial_streams(cfg, 0, 0, 0)
    h, op, r = _draw_instance(cfg, delta, sigma_n, streams)
    h_hat, traj = damp_run(r, op, denoisers[name], layers=cfg.layers,
                           rng=np.random.default_rng(streams[3]), truth=h)
    return traj, h, h_hat


def run_se_trajectory(cfg):
    """SE trajectory for a single generated channel realization."""
    denoisers = build_denoisers(cfg)
    name = cfg.denoisers[0]
    delta = cfg.deltas[0]
    sigma_n = snr_to_sigma(cfg.snr_dbs[0])
    streams = _trial_streams(cfg, 0, 0, 0)
    h = vectorize(synthesize_channel(
        sample_paths(np.random.default_rng(streams[0]), cfg.num_paths), cfg.m, cfg.n))
    return se_run(h, denoisers[name], cfg.layers, delta, sigma_n**2 / delta,
                  mc_trials=cfg.se_trials, rng=np.random.default_rng(streams[4]))
