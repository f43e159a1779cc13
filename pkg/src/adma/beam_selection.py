"""Significant beam selection under an RF-chain budget."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angle_domain import significant_beams

__all__ = ["SelectionResult", "sig_beam_sel"]


@dataclass(frozen=True)
class SelectionResult:
    selected: list
    imsb: list
    union: list
    per_user: list

    @property
    def Q(self) -> int:
        return len(self.union)


def sig_beam_sel(G, threshold: float = 0.5, rf_chains: int | None = None) -> SelectionResult:
    """Select at most ``rf_chains`` beams from a ``K x M`` beam-domain matrix.

    Every user contributes the beams whose magnitude exceeds
    ``threshold * |g_k| / sqrt(M)``.  If the union does not fit the budget,
    each user's strongest beam (IMSB) is kept and the remaining RF chains go
    to the other union members in descending order of beam norm across users.
    Ties resolve to the lowest index.

    Raises
    ------
    ValueError
        If ``rf_chains < K``.
    """
    G = np.atleast_2d(np.asarray(G))
    K, M = G.shape
    if rf_chains is None:
        rf_chains = K
    if rf_chains < K:
        raise ValueError(f"need at least K={K} RF chains, got {rf_chains}")

    sig = significant_beams(G, threshold)
    mags = np.abs(G)
    imsb = [int(np.argmax(row)) for row in mags]
    union = sig.union
    if len(union) <= rf_chains:
        return SelectionResult(sorted(union), imsb, union, sig.per_user)

    norms = np.linalg.norm(G[:, union], axis=0)
    order = [union[i] for i in np.argsort(-norms, kind="stable")]
    keep = set(imsb)
    # Fill up to the budget; colliding IMSBs leave extra room.
    rest = [i for i in order if i not in keep][: rf_chains - len(keep)]
    return SelectionResult(sorted(keep.union(rest)), imsb, union, sig.per_user)
