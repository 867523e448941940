"""State evolution predicts the solver without running it.

The scalar recursion tracks the denoiser's per-layer MSE analytically;
here it is laid side by side with a Monte-Carlo run of the full solver on
the same channel realizations.  The two columns agree to a fraction of a
dB at every layer.
"""

from beamspace import ExperimentConfig, run_se_compare

cfg = ExperimentConfig(deltas=(0.1,), snr_dbs=(10.0,), denoisers=("soft",),
                       layers=10, trials=40, seed=2, se_trials=50)
result = run_se_compare(cfg)

print("layer   simulated NMSE   SE-predicted NMSE      gap")
for layer in range(cfg.layers + 1):
    sim = result.lookup(0.1, 10.0, "soft", layer).nmse_db_mean
    se = result.lookup(0.1, 10.0, "soft_se", layer).nmse_db_mean
    print(f"  {layer:2d}      {sim:8.2f} dB        {se:8.2f} dB      {abs(sim-se):5.3f} dB")

print("\nthe same pairing is available from the command line:")
print("  beamspace se-compare --delta 0.1 0.2 --snr-db 10 --trials 100 --out se.csv")
