"""Desk-scale scaling-law checks for the erased model.

Fits log-log slopes of the removed-edge count, the degree correlation, and
the clustering coefficients across three decades of graph size, and compares
them with the predicted exponents at gamma = 1.5:

    removed edges   ~ n^(2 - gamma)                    = n^0.5
    |correlation|   ~ n^(1/gamma - 1)                  = n^(-1/3)
    multigraph C    ~ n^(4/gamma - 3)                  = n^(-1/3)
    erased C        ~ n^((-3g^2 + 6g - 4) / (2g))      = n^(-0.583)

Sizes stop at 1e5 here so the script finishes in well under a minute; the
acceptance suite runs the same experiment with the 1e6 tier included.
"""

from nullmodels.experiments import ExperimentConfig, run_scaling

GAMMA = 1.5
SIZES = [1000, 10_000, 100_000]

targets = {
    "erased_edges": ("ecm", 2 - GAMMA),
    "pearson_ecm": ("ecm", 1 / GAMMA - 1),
    "clustering_cm": ("cm", 4 / GAMMA - 3),
    "clustering_ecm": ("ecm", (-3 * GAMMA**2 + 6 * GAMMA - 4) / (2 * GAMMA)),
}

for stat, (model, target) in targets.items():
    cfg = ExperimentConfig(model=model, gamma=GAMMA, sizes=SIZES, replicas=60,
                           statistic=stat, seed=7)
    res = run_scaling(cfg)
    print(f"{stat:16s} slope {res.slope:+.3f} +- {res.slope_stderr:.3f}   "
          f"theory {target:+.3f}   medians {[f'{m:.3g}' for m in res.medians]}")
    if stat == "pearson_ecm":
        print(f"{'':16s} negative fraction per size: {res.sign_fraction}")
