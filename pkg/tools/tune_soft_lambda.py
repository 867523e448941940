"""Grid-tune the soft-threshold multiplier and pin the recovery floor.

Selection oracle: mean final-layer NMSE at SNR 10 dB, delta 0.1 over a
fixed-seed Monte-Carlo run.  The winning lambda becomes
``beamspace.denoisers.DEFAULT_SOFT_LAMBDA``; the measured mean NMSE at
SNR 20 dB, delta 0.1 under that lambda becomes the regression bound in
tests/test_acceptance.py.  Rerun with ``python tools/tune_soft_lambda.py``.
"""

import numpy as np

from beamspace.bench import ExperimentConfig, run_sweep

GRID = np.round(np.arange(1.6, 3.01, 0.1), 2)
TRIALS = 100
SEED = 2024


def final_nmse_db(lam, snr_db):
    cfg = ExperimentConfig(deltas=(0.1,), snr_dbs=(snr_db,), denoisers=("soft",),
                           layers=10, trials=TRIALS, seed=SEED, soft_lambda=lam)
    result = run_sweep(cfg)
    return result.lookup(0.1, snr_db, "soft", 10).nmse_db_mean


def main():
    print(f"tuning grid at SNR 10 dB, delta 0.1, {TRIALS} trials, seed {SEED}")
    scores = {}
    for lam in GRID:
        scores[lam] = final_nmse_db(lam, 10.0)
        print(f"  lambda {lam:4.2f}: {scores[lam]:8.3f} dB")
    best = min(scores, key=scores.get)
    print(f"selected lambda = {best}")
    floor = final_nmse_db(best, 20.0)
    print(f"mean NMSE at SNR 20 dB, delta 0.1, lambda {best}: {floor:.3f} dB")
    print("pin the acceptance regression bound slightly above this value")


if __name__ == "__main__":
    main()
