"""
Downlink sum rate of hybrid and full-digital precoders
======================================================

A small Monte-Carlo run of the full pipeline: users dropped in a 1 km cell,
two pilot rounds, analog beams from either orthogonal DFT beams (OBS-HP) or
rotated non-orthogonal beams (NOAS-HP), and an MMSE digital stage.  The same
experiment is available from the command line as ``adma sumrate-cdf``.
"""

import numpy as np

from adma.harness import ExperimentConfig, run_sumrate_cdf

for K, spread in ((4, 1.0), (8, 1.0), (8, 3.0)):
    cfg = ExperimentConfig(num_antennas=64, num_users=K, angular_spread_deg=spread, trials=100, seed=1)
    table = run_sumrate_cdf(cfg)
    print(f"K={K}, spread {spread:g} deg")
    for method in cfg.methods:
        rates = table.values(method, "sum_rate")
        p10, p50, p90 = np.percentile(rates, [10, 50, 90])
        print(f"  {method:8s} median {p50:6.2f} bps/Hz  (10%: {p10:6.2f}, 90%: {p90:6.2f})")
