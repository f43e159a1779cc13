"""Two-round uplink channel estimation with ``K`` RF chains.

Round one wires the RF chains to the first ``K`` antennas and locates each
user's strongest beam from a zero-padded transform of those few samples.
Round two points one receive beam per user at that direction and reads off
the beam-domain gain.  The channel is rebuilt from the one-beam model
``h_k ~ O*(psi_k) f_{i_k}^H g_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angle_domain import dft_matrix
from .precoding import RefinedBeam, noas_analog, peak_to_beam

__all__ = [
    "TrainingObservation",
    "ChannelEstimate",
    "UplinkTraining",
    "pilot_matrix",
    "selection_combiner",
    "ul_observe",
    "stage1_spectrum",
    "stage1_imsb",
    "build_stage2_combiner",
    "stage2_estimate",
    "estimate_channels",
    "nmse",
    "beam_cycling_rounds",
]


@dataclass(frozen=True)
class TrainingObservation:
    pilot: np.ndarray
    received: np.ndarray
    combiner: np.ndarray
    noise_var: float
    combined: np.ndarray


@dataclass(frozen=True)
class ChannelEstimate:
    beams: list
    gains: np.ndarray
    H_hat: np.ndarray


def pilot_matrix(K: int) -> np.ndarray:
    """``K x K`` unitary pilot block (the DFT matrix)."""
    return np.array(dft_matrix(K))


def selection_combiner(K: int, M: int) -> np.ndarray:
    """``E0 = [I_K, 0]``: RF chain ``k`` wired to antenna ``k``."""
    if K > M:
        raise ValueError("cannot wire more RF chains than antennas")
    return np.eye(K, M, dtype=complex)


def noise_variance(H, ul_snr_db) -> float:
    """Per-antenna noise variance for an average received pilot power ``mean|H|^2``."""
    if ul_snr_db is None or np.isposinf(ul_snr_db):
        return 0.0
    return float(np.mean(np.abs(H) ** 2) / 10.0 ** (ul_snr_db / 10.0))


def ul_observe(H, X, E, ul_snr_db=None, rng: np.random.Generator | None = None, *, noise_var=None) -> TrainingObservation:
    """One pilot round: ``H_bar = E (H X + N) X^H``.

    ``N`` is i.i.d. ``CN(0, noise_var)`` at every antenna.  Unless given,
    ``noise_var`` follows from ``ul_snr_db`` (``None`` or ``inf`` means noiseless).
    """
    H = np.asarray(H, dtype=complex)
    X = np.asarray(X, dtype=complex)
    E = np.asarray(E, dtype=complex)
    if X.shape[0] != X.shape[1] or not np.allclose(X @ X.conj().T, np.eye(len(X)), atol=1e-10):
        raise ValueError("pilot matrix must be unitary")
    if E.shape[1] != H.shape[0]:
        raise ValueError("combiner width must equal the number of antennas")
    if noise_var is None:
        noise_var = noise_variance(H, ul_snr_db)

    Y = H @ X
    if noise_var > 0:
        if rng is None:
            raise ValueError("a random generator is required for noisy observations")
        N = np.sqrt(noise_var / 2) * (rng.standard_normal(Y.shape) + 1j * rng.standard_normal(Y.shape))
        Y = Y + N
    return TrainingObservation(X, Y, E, float(noise_var), E @ Y @ X.conj().T)


class UplinkTraining:
    """Pilot rounds against a fixed channel; counts how many rounds were spent.

    The noise level is fixed at construction from the true channel so both
    rounds see the same per-antenna noise.
    """

    def __init__(self, H, ul_snr_db=None, rng: np.random.Generator | None = None, pilot=None):
        self.H = np.asarray(H, dtype=complex)
        self.pilot = pilot_matrix(self.H.shape[1]) if pilot is None else np.asarray(pilot)
        self.noise_var = noise_variance(self.H, ul_snr_db)
        self.rng = rng
        self.rounds = 0
        self.history: list[TrainingObservation] = []

    def observe(self, E) -> np.ndarray:
        obs = ul_observe(self.H, self.pilot, E, rng=self.rng, noise_var=self.noise_var)
        self.rounds += 1
        self.history.append(obs)
        return obs.combined


def stage1_spectrum(h_partial, M: int, V: int = 1) -> np.ndarray:
    """``sqrt(V) F_{VM} [E0 h; 0]`` for the first ``K`` antenna samples."""
    h_partial = np.asarray(h_partial, dtype=complex)
    if len(h_partial) > M:
        raise ValueError("more samples than antennas")
    return np.fft.fft(h_partial, int(V) * M) / np.sqrt(M)


def stage1_imsb(h_partial, M: int, V: int = 1) -> RefinedBeam:
    """Strongest beam (and refining offset) of the partial-sample spectrum."""
    return peak_to_beam(stage1_spectrum(h_partial, M, V), M, V)


def build_stage2_combiner(beams, M: int | None = None) -> np.ndarray:
    """``K x M`` receive beamformer; row ``k`` is ``(O(psi_k) f_{i_k}^T)^T``."""
    return noas_analog(beams, M).T


def stage2_estimate(H_bar, beams) -> ChannelEstimate:
    """Keep each user's own RF-chain output and rebuild ``h_k`` from one beam."""
    beams = list(beams)
    H_bar = np.asarray(H_bar)
    gains = np.diag(H_bar).copy()
    E1 = build_stage2_combiner(beams)
    H_hat = E1.T.conj() * gains[None, :]
    return ChannelEstimate(beams, gains, H_hat)


def estimate_channels(H, V: int = 1, ul_snr_db=None, rng=None, training: UplinkTraining | None = None):
    """Run both pilot rounds on ``H`` (``M x K``).

    Returns ``(estimate, H_bar, training)`` where ``H_bar = E1 H`` (+ noise)
    is the beam-domain channel seen through the stage-two combiner.
    """
    H = np.asarray(H, dtype=complex)
    M, K = H.shape
    if training is None:
        training = UplinkTraining(H, ul_snr_db, rng)
    H0 = training.observe(selection_combiner(K, M))
    beams = [stage1_imsb(H0[:, k], M, V) for k in range(K)]
    H1 = training.observe(build_stage2_combiner(beams, M))
    return stage2_estimate(H1, beams), H1, training


def nmse(H_hat, H) -> np.ndarray:
    """Per-user ``|h_hat_k - h_k|^2 / |h_k|^2``."""
    H_hat = np.asarray(H_hat)
    H = np.asarray(H)
    if H_hat.shape != H.shape:
        raise ValueError("estimate and channel shapes differ")
    if H.ndim == 1:
        H, H_hat = H[:, None], H_hat[:, None]
    power = np.sum(np.abs(H) ** 2, axis=0)
    if np.any(power == 0):
        raise ValueError("true channel has a zero column")
    return np.sum(np.abs(H_hat - H) ** 2, axis=0) / power


def beam_cycling_rounds(M: int, K: int) -> int:
    """Pilot rounds needed to sweep all ``M`` beams with ``K`` RF chains."""
    return math.ceil(M / K)
