"""Residual denoiser training pipeline for beamspace channel datasets."""

from .data import compute_affine, load_dataset, prepare_training_pairs
from .export import export_weights, fold_batch_norm
from .model import DnCnn
from .training import PlateauSchedule, TrainingConfig, train

__version__ = "0.1.0"

__all__ = ["DnCnn", "PlateauSchedule", "TrainingConfig", "compute_affine",
           "export_weights", "fold_batch_norm", "load_dataset",
           "prepare_training_pairs", "train"]
