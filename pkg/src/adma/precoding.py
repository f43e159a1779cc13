"""Downlink precoders: OBS / NOAS hybrid, full-digital MMSE and MRT.

The downlink channel is ``H.T`` (``K x M``) by TDD reciprocity, where ``H``
stacks the uplink channels as columns.  Every composite precoder ``P_DL``
(``M x K``) is scaled to ``trace(P_DL^H P_DL) = rho_dl``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angle_domain import (
    beam_frequency,
    dft_matrix,
    oversampled_transform,
    rotation_phases,
    steering_inner_product,
)

__all__ = [
    "HybridPrecoder",
    "RefinedBeam",
    "obs_analog",
    "refine_angle",
    "peak_to_beam",
    "noas_analog",
    "effective_channel",
    "effective_channel_closed_form",
    "analog_gram_closed_form",
    "normalize_power",
    "mmse_digital",
    "mrt_precoder",
    "fd_mmse_precoder",
    "sum_rate",
    "user_rates",
]


@dataclass(frozen=True)
class HybridPrecoder:
    analog: np.ndarray
    digital: np.ndarray

    @property
    def composite(self) -> np.ndarray:
        return self.analog @ self.digital

    @property
    def num_rf_chains(self) -> int:
        return self.analog.shape[1]


@dataclass(frozen=True)
class RefinedBeam:
    """Beam ``index`` on the ``M``-grid rotated by ``offset`` (multiple of ``1/(VM)``)."""

    index: int
    offset: float
    gain: complex
    oversampling: int
    num_antennas: int

    @property
    def frequency(self) -> float:
        return float(beam_frequency(self.index, self.num_antennas, self.offset))


def obs_analog(indices, M: int) -> np.ndarray:
    """``M x Q`` analog matrix whose columns are the selected DFT rows (transposed)."""
    indices = np.asarray(indices, dtype=int)
    if np.any(indices < 0) or np.any(indices >= M):
        raise ValueError("beam index outside [0, M-1]")
    return dft_matrix(M)[indices, :].T.copy()


def peak_to_beam(g_os: np.ndarray, M: int, V: int) -> RefinedBeam:
    """Map the peak of a ``VM``-point spectrum to (beam index, refining offset).

    Entry ``l = v + n V`` belongs to beam ``n`` rotated by ``v/(VM)``; offsets
    above ``1/(2M)`` are folded onto the next beam so that
    ``|offset| <= 1/(2M)``.
    """
    l = int(np.argmax(np.abs(g_os)))
    n, v = divmod(l, V)
    if 2 * v > V:
        v -= V
        n = (n + 1) % M
    return RefinedBeam(int(n), v / (V * M), complex(g_os[l]), int(V), int(M))


def refine_angle(h, V: int) -> RefinedBeam:
    h = np.asarray(h, dtype=complex)
    return peak_to_beam(oversampled_transform(h, V).g, len(h), V)


def noas_analog(beams, M: int | None = None) -> np.ndarray:
    """``M x K`` analog matrix; column ``k`` is ``O(psi_k) f_{i_k}^T``."""
    beams = list(beams)
    if M is None:
        M = beams[0].num_antennas
    m = np.arange(M)
    cols = [
        np.exp(-2j * np.pi * m * b.index / M) * rotation_phases(M, b.offset) / np.sqrt(M)
        for b in beams
    ]
    return np.stack(cols, axis=1)


def analog_gram_closed_form(beams, M: int | None = None) -> np.ndarray:
    """``B^H B`` for a NOAS analog matrix via the geometric-sum closed form."""
    beams = list(beams)
    if M is None:
        M = beams[0].num_antennas
    # Column k of B is conj(a(f_k)) / sqrt(M) with f_k the beam's look frequency.
    f = np.array([-(b.index / M + b.offset) for b in beams])
    return steering_inner_product(M, f[None, :] - f[:, None]) / M


def effective_channel(H, B) -> np.ndarray:
    """Downlink channel through the analog stage, ``H^T B`` (``K x Q``)."""
    return np.asarray(H).T @ np.asarray(B)


def effective_channel_closed_form(users, beams, M: int | None = None) -> np.ndarray:
    """``H^T B_no`` from path parameters without forming any ``M``-vectors.

    Entry ``(k, q)`` is ``sum_p w_{k,p} S(-(f_{k,p} + i_q/M + psi_q)) / sqrt(M)``
    where ``S`` is :func:`steering_inner_product` and ``w`` the path weights.
    """
    beams = list(beams)
    if M is None:
        M = beams[0].num_antennas
    look = np.array([b.index / M + b.offset for b in beams])
    out = np.empty((len(users), len(beams)), dtype=complex)
    for k, u in enumerate(users):
        phi = -(u.spatial_frequencies[:, None] + look[None, :])
        out[k] = u.path_weights @ steering_inner_product(M, phi) / np.sqrt(M)
    return out


def normalize_power(P_dl, rho_dl: float, analog=None):
    """Scale so that the composite (``analog @ P`` if given) has trace power ``rho_dl``."""
    P_dl = np.asarray(P_dl)
    comp = P_dl if analog is None else np.asarray(analog) @ P_dl
    power = np.real(np.vdot(comp, comp))
    if power == 0:
        return P_dl
    return P_dl * np.sqrt(rho_dl / power)


def mmse_digital(G_eff, rho_dl: float, num_users: int | None = None, *, analog=None, noise_power: float = 1.0):
    """Regularized-inverse precoder for the ``K x Q`` effective downlink channel.

    ``P = G^H (G G^H + (K noise/rho) I)^-1``, then rescaled so the composite
    ``analog @ P`` meets the power budget.  With ``noise_power = 1`` the
    channel is taken as already normalized by the receiver noise.
    """
    G = np.asarray(G_eff, dtype=complex)
    if not np.all(np.isfinite(G)):
        raise ValueError("effective channel contains non-finite entries")
    if not rho_dl > 0 or not np.isfinite(rho_dl):
        raise ValueError("rho_dl must be positive and finite")
    K = G.shape[0] if num_users is None else num_users
    reg = K * noise_power / rho_dl
    P = G.conj().T @ np.linalg.inv(G @ G.conj().T + reg * np.eye(G.shape[0]))
    return normalize_power(P, rho_dl, analog)


def mrt_precoder(H, rho_dl: float) -> np.ndarray:
    return normalize_power(np.conj(H), rho_dl)


def fd_mmse_precoder(H, rho_dl: float, num_users: int | None = None, noise_power: float = 1.0) -> np.ndarray:
    return mmse_digital(np.asarray(H).T, rho_dl, num_users, noise_power=noise_power)


def user_rates(H, P_dl, noise_power) -> np.ndarray:
    """Per-user rate ``log2(1 + SINR_k)`` treating interference as noise."""
    R = np.abs(np.asarray(H).T @ np.asarray(P_dl)) ** 2
    signal = np.diag(R)
    interference = R.sum(axis=1) - signal
    noise = np.broadcast_to(np.asarray(noise_power, dtype=float), signal.shape)
    if np.any(noise <= 0):
        raise ValueError("noise_power must be > 0")
    return np.log2(1.0 + signal / (interference + noise))


def sum_rate(H, P_dl, noise_power) -> float:
    """Sum rate in bps/Hz over the ``K`` users."""
    return float(user_rates(H, P_dl, noise_power).sum())
