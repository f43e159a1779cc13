"""Independent slow re-implementations used as test oracles."""
import math

import numpy as np


def sig_beam_sel_loops(G, gamma, rf_chains):
    """Line-by-line significant beam selection with plain Python loops."""
    K, M = len(G), len(G[0])
    if rf_chains < K:
        raise ValueError("not enough RF chains")
    per_user, imax = [], []
    for k in range(K):
        row = [abs(complex(x)) for x in G[k]]
        gmax = max(row)
        norm = math.sqrt(sum(x * x for x in row))
        sel = []
        first_max = None
        for m in range(M):
            if row[m] > gamma * norm / math.sqrt(M):
                sel.append(m)
            if row[m] == gmax and first_max is None:
                first_max = m
        per_user.append(sel)
        imax.append(first_max)
    union = sorted({m for s in per_user for m in s})
    if len(union) <= rf_chains:
        return union, imax
    def col_norm(m):
        return math.sqrt(sum(abs(complex(G[k][m])) ** 2 for k in range(K)))
    ordered = sorted(union, key=lambda m: (-col_norm(m), m))
    keep = []
    for m in imax:
        if m not in keep:
            keep.append(m)
    rest = [m for m in ordered if m not in keep]
    chosen = keep + rest[: rf_chains - len(keep)]
    return sorted(chosen), imax


def geometric_sum_loops(M, phi):
    return sum(complex(math.cos(2 * math.pi * m * phi), math.sin(2 * math.pi * m * phi)) for m in range(M))


def rotated_dft_slice(h, V, v):
    """``F O(v/(VM)) h`` formed from explicit matrices."""
    M = len(h)
    n = np.arange(M)
    F = np.exp(-2j * np.pi * np.outer(n, n) / M) / np.sqrt(M)
    O = np.diag(np.exp(-2j * np.pi * n * v / (V * M)))
    return F @ O @ h
