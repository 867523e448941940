"""Residual denoising CNN: conv+ReLU, hidden conv+BN+ReLU blocks, linear conv."""

import torch
from torch import nn


class DnCnn(nn.Module):
    """Predicts the noise in its input; denoised = input - output.

    Hidden convolutions carry no bias (batch-norm's shift replaces it);
    the first and last layers keep theirs.
    """

    def __init__(self, depth=20, width=64):
        super().__init__()
        if depth < 2:
            raise ValueError(f"depth must be >= 2, got {depth}")
        self.depth = depth
        self.width = width
        layers = [nn.Conv2d(1, width, 3, padding=1), nn.ReLU(inplace=True)]
        for _ in range(depth - 2):
            layers += [nn.Conv2d(width, width, 3, padding=1, bias=False),
                       nn.BatchNorm2d(width), nn.ReLU(inplace=True)]
        layers.append(nn.Conv2d(width, 1, 3, padding=1))
        self.body = nn.Sequential(*layers)

    def forward(self, x):
        return self.body(x)

    @torch.no_grad()
    def residual(self, image):
        """Single-image eval-mode forward; image is a 2D tensor or array."""
        was_training = self.training
        self.eval()
        x = torch.as_tensor(image, dtype=torch.float32)[None, None]
        out = self.body(x)[0, 0]
        if was_training:
            self.train()
        return out
