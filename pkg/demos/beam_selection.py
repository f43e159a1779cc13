"""
Picking beams for an orthogonal-beam hybrid precoder
====================================================

With only as many RF chains as users, the base station has to choose which
DFT beams to feed.  The selection keeps every user's strongest beam and fills
the remaining chains with the beams carrying the most total energy.
"""

import numpy as np

from adma.angle_domain import beam_transform
from adma.beam_selection import sig_beam_sel
from adma.channel_model import ArrayConfig, draw_user

rng = np.random.default_rng(3)
cfg = ArrayConfig(64)
angles = np.deg2rad([40, 75, 110, 140])
users = [draw_user(rng, cfg, 20, a, np.deg2rad(3)) for a in angles]
G = np.stack([beam_transform(u.h).g for u in users])

for rf in (4, 6, 8, 64):
    res = sig_beam_sel(G, threshold=0.5, rf_chains=rf)
    print(f"{rf:2d} RF chains -> beams {res.selected}")

res = sig_beam_sel(G, threshold=0.5, rf_chains=4)
print("strongest beam per user:", list(res.imsb))
print("significant beams per user:", res.per_user)

# fewer chains than users cannot serve everyone
try:
    sig_beam_sel(G, 0.5, rf_chains=3)
except ValueError as exc:
    print("rejected:", exc)
