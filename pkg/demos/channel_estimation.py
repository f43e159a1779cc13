"""
Two-round uplink channel estimation with K RF chains
====================================================

Round one connects the K RF chains to the first K antennas and uses a
zero-padded FFT of those samples to guess each user's strongest beam and a
fractional rotation.  Round two points one rotated beam at each user and reads
off its gain.  Beam cycling would need M/K rounds for the same job.
"""

import numpy as np

from adma.channel_model import ArrayConfig, draw_user
from adma.hybrid_estimation import beam_cycling_rounds, estimate_channels, nmse

rng = np.random.default_rng(11)
M, K = 64, 8
cfg = ArrayConfig(M)


def draw(num_paths, spread_deg):
    return np.stack([draw_user(rng, cfg, num_paths, rng.uniform(0, np.pi), np.deg2rad(spread_deg)).h
                     for _ in range(K)], axis=1)


for label, P, spread in (("single path", 1, 0.0), ("1 deg spread", 20, 1.0), ("3 deg spread", 20, 3.0)):
    obs, noas = [], []
    for _ in range(100):
        H = draw(P, spread)
        seed = int(rng.integers(2**32))
        est_obs, _, _ = estimate_channels(H, 1, 25.0, np.random.default_rng(seed))
        est_noas, _, training = estimate_channels(H, 4, 25.0, np.random.default_rng(seed))
        obs.append(np.mean(nmse(est_obs.H_hat, H)))
        noas.append(np.mean(nmse(est_noas.H_hat, H)))
    print(f"{label:13s} OBS {10 * np.log10(np.median(obs)):6.2f} dB   NOAS {10 * np.log10(np.median(noas)):6.2f} dB")

print(f"pilot rounds used: {training.rounds}, beam cycling needs {beam_cycling_rounds(M, K)}")
