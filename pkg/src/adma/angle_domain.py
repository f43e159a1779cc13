"""DFT beamspace tools: beam transforms, zero-padded oversampling and rotations.

Conventions
-----------
``F[n, m] = exp(-j 2 pi n m / M) / sqrt(M)`` so ``g = F h`` is ``fft(h)/sqrt(M)``.
A spatial tone ``exp(-j 2 pi m f)`` with ``f = k0/M`` peaks at beam index
``(M - k0) mod M``; in general beam ``n`` looks at frequency ``-n/M``.

The rotation ``O(psi) = diag(exp(-j 2 pi m psi))`` shifts the beam grid by
``psi`` so that the stride-``V`` slice at offset ``v`` of the ``VM``-point
zero-padded transform is exactly ``F O(v/(VM)) h``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "BeamDomainChannel",
    "SignificantBeams",
    "CompactDecomposition",
    "dft_matrix",
    "beam_transform",
    "oversampled_transform",
    "decimate",
    "rotation_phases",
    "rotation_matrix",
    "steering_inner_product",
    "correlation",
    "compact_decompose",
    "significant_indices",
    "significant_beams",
    "beam_frequency",
]


@dataclass(frozen=True)
class BeamDomainChannel:
    g: np.ndarray
    oversampling: int = 1
    source_user: int | None = None

    @property
    def num_antennas(self) -> int:
        return len(self.g) // self.oversampling

    def slice(self, v: int) -> np.ndarray:
        """Beam response on the grid rotated by ``v/(VM)``."""
        return decimate(self.g, self.oversampling, v)


@dataclass(frozen=True)
class SignificantBeams:
    per_user: list
    union: list

    @property
    def Q(self) -> int:
        return len(self.union)


@dataclass(frozen=True)
class CompactDecomposition:
    """Few-beam expansion ``h ~ A_tilde @ alpha_tilde`` over a window of beams."""

    window: tuple[int, int]
    indices: np.ndarray
    steering: np.ndarray
    weights: np.ndarray
    error: float

    @property
    def size(self) -> int:
        return len(self.indices)

    def reconstruct(self) -> np.ndarray:
        return self.steering @ self.weights


@lru_cache(maxsize=32)
def _dft_cached(M: int) -> np.ndarray:
    n = np.arange(M)
    F = np.exp(-2j * np.pi * np.outer(n, n) / M) / np.sqrt(M)
    F.setflags(write=False)
    return F


def dft_matrix(M: int) -> np.ndarray:
    """Unitary ``M x M`` DFT matrix (read-only, cached per size)."""
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    return _dft_cached(int(M))


def beam_frequency(index, M: int, offset=0.0):
    """Spatial frequency (in ``[-0.5, 0.5)``) that beam ``index`` rotated by ``offset`` points at."""
    f = -(np.asarray(index) / M + offset)
    return (f + 0.5) % 1.0 - 0.5


def beam_transform(h, source_user: int | None = None) -> BeamDomainChannel:
    h = np.asarray(h, dtype=complex)
    return BeamDomainChannel(np.fft.fft(h) / np.sqrt(len(h)), 1, source_user)


def oversampled_transform(h, V: int, source_user: int | None = None) -> BeamDomainChannel:
    """``sqrt(V) F_{VM} [h; 0]``: the ``VM``-point transform of ``h`` padded with zeros."""
    if int(V) != V or V < 1:
        raise ValueError(f"oversampling V must be a positive integer, got {V}")
    h = np.asarray(h, dtype=complex)
    M = len(h)
    return BeamDomainChannel(np.fft.fft(h, int(V) * M) / np.sqrt(M), int(V), source_user)


def decimate(g_os: np.ndarray, V: int, v: int) -> np.ndarray:
    if not 0 <= v < V:
        raise ValueError(f"offset v must be in [0, {V}), got {v}")
    return np.asarray(g_os)[v::V]


def rotation_phases(M: int, psi: float) -> np.ndarray:
    """Diagonal of ``O(psi)``."""
    return np.exp(-2j * np.pi * np.arange(M) * psi)


def rotation_matrix(M: int, psi: float) -> np.ndarray:
    return np.diag(rotation_phases(M, psi))


def steering_inner_product(M: int, phi):
    """Closed form of ``sum_{m<M} exp(j 2 pi m phi)``.

    Uses ``exp(j pi (M-1) eps) sin(pi M eps) / sin(pi eps)`` with ``eps`` the
    distance of ``phi`` to the nearest integer; the integer limit is ``M``.
    Accepts scalar or array ``phi``.
    """
    phi = np.asarray(phi, dtype=float)
    eps = phi - np.round(phi)
    small = np.abs(eps) < 1e-9
    safe = np.where(small, 0.5, eps)
    ratio = np.sin(np.pi * M * safe) / np.sin(np.pi * safe)
    out = np.where(small, M * np.exp(1j * np.pi * (M - 1) * eps), np.exp(1j * np.pi * (M - 1) * eps) * ratio)
    return complex(out) if out.ndim == 0 else out


def correlation(h_k, h_n) -> complex:
    """Normalized inner product ``(h_k/|h_k|)^H (h_n/|h_n|)``."""
    h_k = np.asarray(h_k, dtype=complex)
    h_n = np.asarray(h_n, dtype=complex)
    if h_k.shape != h_n.shape:
        raise ValueError("channel vectors must have equal length")
    nk, nn = np.linalg.norm(h_k), np.linalg.norm(h_n)
    if nk == 0 or nn == 0:
        raise ValueError("correlation is undefined for a zero vector")
    return complex(np.vdot(h_k, h_n) / (nk * nn))


def compact_decompose(h, window: tuple[int, int]) -> CompactDecomposition:
    """Expand ``h`` over the beams ``k1..k2`` (wrapping modulo ``M``).

    ``A_tilde`` holds the steering vectors the window's beams point at and
    ``alpha_tilde`` the matching beam-domain entries of ``F h`` divided by
    ``sqrt(M)``.  The reconstruction is the orthogonal projection of ``h`` on
    those beams; ``error`` is ``|h - A_tilde alpha_tilde| / |h|``.
    """
    h = np.asarray(h, dtype=complex)
    M = len(h)
    k1, k2 = (int(k) for k in window)
    if not (0 <= k1 < M and 0 <= k2 < M):
        raise ValueError(f"window {window} outside [0, {M - 1}]")
    width = (k2 - k1) % M + 1
    indices = (k1 + np.arange(width)) % M
    if len(indices) == 0:
        raise ValueError("empty window")

    m = np.arange(M)[:, None]
    steering = np.exp(-2j * np.pi * m * beam_frequency(indices, M)[None, :])
    weights = beam_transform(h).g[indices] / np.sqrt(M)
    norm = np.linalg.norm(h)
    error = np.linalg.norm(h - steering @ weights) / norm if norm > 0 else 0.0
    return CompactDecomposition((k1, k2), indices, steering, weights, float(error))


def significant_indices(g, threshold: float) -> list[int]:
    """Indices ``m`` with ``|g[m]| > threshold * |g| / sqrt(M)``."""
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    g = np.asarray(g)
    level = threshold * np.linalg.norm(g) / np.sqrt(len(g))
    return np.flatnonzero(np.abs(g) > level).tolist()


def significant_beams(G, threshold: float) -> SignificantBeams:
    """Per-user significant sets for a ``K x M`` beam-domain matrix and their union."""
    G = np.atleast_2d(G)
    per_user = [significant_indices(row, threshold) for row in G]
    union = sorted(set().union(*per_user)) if per_user else []
    return SignificantBeams(per_user, union)
