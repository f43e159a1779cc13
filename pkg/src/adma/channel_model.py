"""Uplink channel synthesis for a ULA base station serving single-antenna users.

Each user sees ``P`` i.i.d. paths whose arrival angles sit inside a narrow
window ``[theta_k - spread/2, theta_k + spread/2]``.  Large-scale effects
(path loss and bulk log-normal shadowing) are applied separately by
:func:`apply_link_budget` so that the small-scale model keeps unit variance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArrayConfig",
    "UserChannel",
    "LinkBudget",
    "steering_vector",
    "steering_matrix",
    "draw_user",
    "draw_position",
    "path_loss_db",
    "apply_link_budget",
]


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array geometry.

    Parameters
    ----------
    num_antennas : int
        Number of elements ``M``.
    d_over_lambda : float
        Element spacing in wavelengths, ``0 < D/lambda <= 0.5``.
    """

    num_antennas: int
    d_over_lambda: float = 0.5

    def __post_init__(self):
        if int(self.num_antennas) != self.num_antennas or self.num_antennas < 1:
            raise ValueError(f"num_antennas must be a positive integer, got {self.num_antennas}")
        if not 0.0 < self.d_over_lambda <= 0.5:
            raise ValueError(f"d_over_lambda must lie in (0, 0.5], got {self.d_over_lambda}")


@dataclass(frozen=True)
class UserChannel:
    """Multipath parameters of one user and the assembled channel vector."""

    aoas: np.ndarray
    gains: np.ndarray
    center_angle: float
    angular_spread: float
    h: np.ndarray
    config: ArrayConfig = field(repr=False)

    @property
    def num_paths(self) -> int:
        return len(self.aoas)

    @property
    def path_weights(self) -> np.ndarray:
        """Gains scaled by ``1/sqrt(P)``, i.e. the vector multiplying the steering matrix."""
        return self.gains / np.sqrt(self.num_paths)

    @property
    def spatial_frequencies(self) -> np.ndarray:
        return self.config.d_over_lambda * np.cos(self.aoas)

    def steering(self) -> np.ndarray:
        return steering_matrix(self.config, self.aoas)


@dataclass(frozen=True)
class LinkBudget:
    """Large-scale link parameters (units as in the field names)."""

    carrier_freq_mhz: float = 3700.0
    distance_m: float = 500.0
    shadowing_sigma_db: float = 4.0
    dl_power_dbm: float = 50.0
    ul_snr_db: float = 25.0
    user_noise_dbm: float = -92.0

    def __post_init__(self):
        if self.carrier_freq_mhz <= 0 or self.distance_m <= 0:
            raise ValueError("carrier frequency and distance must be positive")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be non-negative")


def _check_angles(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > np.pi) or np.any(~np.isfinite(theta)):
        raise ValueError("angles of arrival must lie in [0, pi]")
    return theta


def steering_vector(cfg: ArrayConfig, theta: float) -> np.ndarray:
    """Array response ``exp(-j 2 pi m (D/lambda) cos(theta))`` for ``m = 0..M-1``."""
    theta = _check_angles(theta)
    if theta.ndim != 0:
        raise ValueError("steering_vector takes a scalar angle; use steering_matrix")
    m = np.arange(cfg.num_antennas)
    return np.exp(-2j * np.pi * m * cfg.d_over_lambda * np.cos(float(theta)))


def steering_matrix(cfg: ArrayConfig, thetas) -> np.ndarray:
    """Stack of steering vectors, one column per angle (shape ``M x len(thetas)``)."""
    thetas = np.atleast_1d(_check_angles(thetas))
    m = np.arange(cfg.num_antennas)[:, None]
    return np.exp(-2j * np.pi * m * cfg.d_over_lambda * np.cos(thetas)[None, :])


def draw_user(
    rng: np.random.Generator,
    cfg: ArrayConfig,
    num_paths: int,
    center_angle: float,
    angular_spread: float,
    gain_variance: float = 1.0,
) -> UserChannel:
    """Draw one user's paths and assemble ``h = sum_p a(theta_p) alpha_p / sqrt(P)``.

    AOAs are uniform over the spread window (clipped to ``[0, pi]``) and path
    gains are i.i.d. ``CN(0, gain_variance)``.
    """
    if num_paths < 1:
        raise ValueError("num_paths must be >= 1")
    if angular_spread < 0:
        raise ValueError("angular_spread must be >= 0")
    if gain_variance <= 0:
        raise ValueError("gain_variance must be > 0")

    offsets = angular_spread * (rng.random(num_paths) - 0.5)
    aoas = np.clip(center_angle + offsets, 0.0, np.pi)
    gains = np.sqrt(gain_variance / 2) * (
        rng.standard_normal(num_paths) + 1j * rng.standard_normal(num_paths)
    )
    h = steering_matrix(cfg, aoas) @ gains / np.sqrt(num_paths)
    return UserChannel(
        aoas=aoas,
        gains=gains,
        center_angle=float(center_angle),
        angular_spread=float(angular_spread),
        h=h,
        config=cfg,
    )


def draw_position(
    rng: np.random.Generator, radius_m: float = 1000.0, min_distance_m: float = 35.0
) -> tuple[float, float]:
    """Uniform position in a semicircular cell; returns ``(distance, angle)``.

    The angle doubles as the user's center AOA, uniform on ``(0, pi)``.
    """
    if not 0 < min_distance_m < radius_m:
        raise ValueError("need 0 < min_distance_m < radius_m")
    r = np.sqrt(rng.uniform(min_distance_m**2, radius_m**2))
    angle = rng.uniform(0.0, np.pi)
    return float(r), float(angle)


def path_loss_db(distance_m, carrier_freq_mhz):
    """Urban-micro path loss ``-35.4 + 26 log10(d) + 20 log10(fc)``; d in m, fc in MHz."""
    d = np.asarray(distance_m, dtype=float)
    fc = np.asarray(carrier_freq_mhz, dtype=float)
    if np.any(d <= 0) or np.any(fc <= 0):
        raise ValueError("distance and carrier frequency must be positive")
    out = -35.4 + 26.0 * np.log10(d) + 20.0 * np.log10(fc)
    return float(out) if out.ndim == 0 else out


def apply_link_budget(rng: np.random.Generator, h: np.ndarray, budget: LinkBudget) -> np.ndarray:
    # One shadowing draw per user, common to all of its paths.
    shadow_db = rng.normal(0.0, budget.shadowing_sigma_db)
    loss_db = path_loss_db(budget.distance_m, budget.carrier_freq_mhz) + shadow_db
    return np.asarray(h) * 10.0 ** (-loss_db / 20.0)
