"""Training loop: Adam on residual MSE with a plateau learning-rate ladder.

The learning rate starts at 1e-3 and drops to 1e-4 and then 1e-5 whenever
the validation loss stops improving for ``patience`` consecutive epochs.
The best-validation weights are kept.  Validation noise is drawn once,
so epoch losses are comparable; training noise is redrawn every epoch.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .data import compute_affine, load_dataset
from .errors import TrainingError
from .model import DnCnn

LR_LADDER = (1e-3, 1e-4, 1e-5)


@dataclass
class TrainingConfig:
    train_path: str
    val_path: str
    depth: int = 20
    width: int = 64
    noise_range: tuple = (0.0, 0.2)
    batch_size: int = 16
    epochs: int = 50
    patience: int = 3
    seed: int = 0
    export_path: str | None = None
    fixture_path: str | None = None


class PlateauSchedule:
    """Steps down the learning-rate ladder when validation stalls."""

    def __init__(self, ladder=LR_LADDER, patience=3):
        self.ladder = tuple(ladder)
        self.patience = patience
        self.level = 0
        self.best = math.inf
        self.stale = 0

    @property
    def lr(self):
        return self.ladder[self.level]

    def step(self, val_loss):
        """Record an epoch's validation loss; returns the lr for the next epoch."""
        if val_loss < self.best:
            self.best = val_loss
            self.stale = 0
        else:
            self.stale += 1
            if self.stale >= self.patience and self.level < len(self.ladder) - 1:
                self.level += 1
                self.stale = 0
        return self.lr


@dataclass
class TrainResult:
    model: DnCnn
    affine: object
    history: list = field(default_factory=list)  # (epoch, train_loss, val_loss, lr)
    best_val_loss: float = math.inf
    val_psnr_noisy: float = 0.0
    val_psnr_denoised: float = 0.0
    fixture_input: np.ndarray | None = None  # channel-scale validation image


def _psnr(mse):
    return 10.0 * math.log10(1.0 / mse) if mse > 0 else math.inf


def train(cfg, log=print):
    """Train per the config; returns a TrainResult with the best weights loaded."""
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    train_images = load_dataset(cfg.train_path)
    val_images = load_dataset(cfg.val_path)
    affine = compute_affine(train_images)
    lo, hi = cfg.noise_range

    train_clean = torch.from_numpy(affine.apply(train_images)).float().unsqueeze(1)
    val_clean = torch.from_numpy(affine.apply(val_images)).float().unsqueeze(1)
    # one fixed noise draw keeps validation losses comparable across epochs
    val_sigma = torch.from_numpy(
        rng.uniform(lo, hi, size=(val_clean.shape[0], 1, 1, 1))).float()
    val_noise = torch.randn(val_clean.shape,
                            generator=torch.Generator().manual_seed(cfg.seed)) * val_sigma
    val_noisy = val_clean + val_noise

    model = DnCnn(depth=cfg.depth, width=cfg.width)
    schedule = PlateauSchedule(patience=cfg.patience)
    optimizer = torch.optim.Adam(model.parameters(), lr=schedule.lr)
    criterion = nn.MSELoss()
    result = TrainResult(model=model, affine=affine)
    best_state = {k: v.clone() for k, v in model.state_dict().items()}

    count = train_clean.shape[0]
    for epoch in range(cfg.epochs):
        start = time.perf_counter()
        model.train()
        order = torch.randperm(count, generator=torch.Generator().manual_seed(
            cfg.seed * 100003 + epoch))
        epoch_loss = 0.0
        for begin in range(0, count, cfg.batch_size):
            idx = order[begin:begin + cfg.batch_size]
            clean = train_clean[idx]
            sigma = torch.from_numpy(
                rng.uniform(lo, hi, size=(len(idx), 1, 1, 1))).float()
            noise = torch.randn(clean.shape) * sigma
            optimizer.zero_grad()
            loss = criterion(model(clean + noise), noise)
            if not torch.isfinite(loss):
                raise TrainingError(f"non-finite training loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(idx)
        epoch_loss /= count

        model.eval()
        with torch.no_grad():
            val_loss = 0.0
            for begin in range(0, val_clean.shape[0], 64):
                sl = slice(begin, begin + 64)
                val_loss += float(criterion(model(val_noisy[sl]), val_noise[sl])) \
                    * val_noisy[sl].shape[0]
            val_loss /= val_clean.shape[0]
        if not math.isfinite(val_loss):
            raise TrainingError(f"non-finite validation loss at epoch {epoch}")

        if val_loss < result.best_val_loss:
            result.best_val_loss = val_loss
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
        lr = schedule.step(val_loss)
        for group in optimizer.param_groups:
            group["lr"] = lr
        result.history.append((epoch, epoch_loss, val_loss, lr))
        log(f"epoch {epoch:3d}  train {epoch_loss:.3e}  val {val_loss:.3e}  "
            f"lr {lr:.0e}  {time.perf_counter() - start:.0f}s")

    model.load_state_dict(best_state)
    model.eval()

    with torch.no_grad():
        noisy_mse = float(torch.mean((val_noisy - val_clean) ** 2))
        denoised = val_noisy - model(val_noisy)
        denoised_mse = float(torch.mean((denoised - val_clean) ** 2))
    result.val_psnr_noisy = _psnr(noisy_mse)
    result.val_psnr_denoised = _psnr(denoised_mse)
    # parity fixture: a realistically noisy channel-scale image (mid-range std)
    mid_sigma = 0.5 * (lo + hi) / affine.scale
    result.fixture_input = (val_images[0]
                            + mid_sigma * rng.standard_normal(val_images[0].shape)
                            ).astype(np.float32)
    return result
