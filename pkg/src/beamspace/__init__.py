"""Beamspace mmWave channel estimation with denoising-based AMP."""

from .bench import ExperimentConfig, nmse, nmse_db, run_se_compare, run_sweep
from .channel import (ChannelDataset, PathParameters, array_response, devectorize,
                      generate_dataset, load_dataset, sample_paths, save_dataset,
                      synthesize_channel, vectorize)
from .cnn import DnCnnDenoiser, DnCnnWeights, dncnn_forward, load_weights, save_weights
from .damp import SolverState, SolverTrajectory, init, layer_step, run
from .denoisers import (DEFAULT_SOFT_LAMBDA, Denoiser, DivergenceEstimate,
                        SoftThresholdDenoiser, WienerDenoiser, mc_divergence,
                        onsager_term)
from .measurement import (MeasurementOperator, measure, measurement_count,
                          sample_selection_network, snr_to_sigma)
from .state_evolution import SeTrajectory, se_run, se_step

__version__ = "0.1.0"

__all__ = [
    "ChannelDataset", "DEFAULT_SOFT_LAMBDA", "Denoiser", "DivergenceEstimate",
    "DnCnnDenoiser", "DnCnnWeights", "ExperimentConfig", "MeasurementOperator",
    "PathParameters", "SeTrajectory", "SoftThresholdDenoiser", "SolverState",
    "SolverTrajectory", "WienerDenoiser", "array_response", "devectorize",
    "dncnn_forward", "generate_dataset", "init", "layer_step", "load_dataset",
    "load_weights", "mc_divergence", "measure", "measurement_count", "nmse",
    "nmse_db", "onsager_term", "run", "run_se_compare", "run_sweep",
    "sample_paths", "sample_selection_network", "save_dataset", "save_weights",
    "se_run", "se_step", "snr_to_sigma", "synthesize_channel", "vectorize",
]
