"""Dropping a trained CNN into the AMP recursion.

The learned denoiser knows what beamspace channels look like, so it beats
the analytic soft threshold once its weights are available.  Weights come
from the companion trainer package:

    beamspace generate --count 2000 --seed 1000 --out train.bchd
    beamspace generate --count 400  --seed 2000 --out val.bchd
    dncnn-trainer train --train train.bchd --val val.bchd --depth 8 \
        --noise-max 0.025 --epochs 8 --out artifacts/dncnn_desk8.dncw \
        --fixture artifacts/dncnn_desk8.dnpf

This demo uses the committed desk-scale weights when present.
"""

import pathlib
import sys

import numpy as np

from beamspace import (DnCnnDenoiser, SoftThresholdDenoiser, load_weights, measure,
                       measurement_count, nmse_db, run, sample_paths,
                       sample_selection_network, snr_to_sigma, synthesize_channel,
                       vectorize)

weights_path = pathlib.Path(__file__).resolve().parent.parent / "artifacts" / "dncnn_desk8.dncw"
if not weights_path.exists():
    sys.exit(f"no weights at {weights_path}; train them first (see module docstring)")

weights = load_weights(weights_path)
print(f"loaded {weights.num_layers}-layer network, input affine "
      f"({weights.scale:.3e}, {weights.offset:.3f})\n")

m = n = 64
rng = np.random.default_rng(11)
h = vectorize(synthesize_channel(sample_paths(rng, 4), m, n))
op = sample_selection_network(measurement_count(0.1, m * n), m, n, rng)
r = measure(op, h, snr_to_sigma(10.0), rng)

for denoiser in (SoftThresholdDenoiser(), DnCnnDenoiser(weights, m, n)):
    h_hat, traj = run(r, op, denoiser, layers=10, rng=np.random.default_rng(5), truth=h)
    curve = "  ".join(f"{nmse_db(rec.nmse_truth):6.1f}" for rec in traj.records)
    print(f"{denoiser.name:6s} NMSE by layer (dB): {curve}")
