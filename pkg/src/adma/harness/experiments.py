"""Monte-Carlo experiments: sum-rate CDFs, NMSE sweeps and the correlation-decay study.

Every trial draws from its own generator seeded by ``(seed, trial, stream...)``
so results do not depend on the worker count or on execution order.
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..angle_domain import beam_transform, correlation
from ..beam_selection import sig_beam_sel
from ..channel_model import (
    ArrayConfig,
    LinkBudget,
    apply_link_budget,
    draw_position,
    draw_user,
)
from ..hybrid_estimation import (
    UplinkTraining,
    estimate_channels,
    nmse,
    pilot_matrix,
    selection_combiner,
    stage1_imsb,
    stage1_spectrum,
    ul_observe,
)
from ..precoding import (
    fd_mmse_precoder,
    mmse_digital,
    mrt_precoder,
    noas_analog,
    obs_analog,
    user_rates,
)
from .config import ExperimentConfig

__all__ = [
    "ResultTable",
    "CSV_COLUMNS",
    "trial_rng",
    "draw_channels",
    "sumrate_trial",
    "run_sumrate_cdf",
    "run_nmse_sweep",
    "run_lemma1_study",
    "imsb_hit_rate",
    "write_csv",
    "read_csv",
]

CSV_COLUMNS = ("experiment", "trial", "method", "metric", "value")

# stream tags for trial_rng
_USERS, _NOISE = 0, 1


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def add(self, experiment: str, trial: int, method: str, metric: str, value: float):
        value = float(value)
        if not np.isfinite(value):
            raise ValueError(f"non-finite {metric} for {method} in trial {trial}")
        self.rows.append((experiment, int(trial), method, metric, value))

    def extend(self, other: "ResultTable"):
        self.rows.extend(other.rows)

    def values(self, method: str, metric: str) -> np.ndarray:
        return np.array([r[4] for r in self.rows if r[2] == method and r[3] == metric])

    def median(self, method: str, metric: str) -> float:
        return float(np.median(self.values(method, metric)))

    def keys(self) -> list:
        seen = {}
        for r in self.rows:
            seen.setdefault((r[2], r[3]), None)
        return list(seen)

    def summary(self, percentiles=(10, 50, 90)) -> dict:
        """Percentiles of every (method, metric) pair."""
        return {
            key: dict(zip(percentiles, np.percentile(self.values(*key), percentiles)))
            for key in self.keys()
        }

    def __len__(self):
        return len(self.rows)


def trial_rng(seed: int, trial: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, *stream)))


def _run_trials(fn, cfg: ExperimentConfig) -> list:
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(fn, range(cfg.trials)))
    return [fn(t) for t in range(cfg.trials)]


def draw_channels(cfg: ExperimentConfig, trial: int, *, link_budget: bool = True, num_antennas=None):
    """Draw the ``K`` users of one trial; returns ``(H, users)`` with ``H`` of shape ``M x K``.

    With ``link_budget=False`` the users keep unit-variance small-scale fading.
    """
    arr = ArrayConfig(num_antennas or cfg.num_antennas, cfg.d_over_lambda)
    users, cols = [], []
    for k in range(cfg.num_users):
        rng = trial_rng(cfg.seed, trial, _USERS, k)
        distance, center = draw_position(rng, cfg.cell_radius_m, cfg.min_distance_m)
        user = draw_user(rng, arr, cfg.num_paths, center, cfg.angular_spread)
        h = user.h
        if link_budget:
            budget = LinkBudget(
                carrier_freq_mhz=cfg.carrier_freq_mhz,
                distance_m=distance,
                shadowing_sigma_db=cfg.shadowing_db,
                dl_power_dbm=cfg.dl_power_dbm,
                ul_snr_db=cfg.ul_snr_db[0],
                user_noise_dbm=cfg.user_noise_dbm,
            )
            h = apply_link_budget(rng, h, budget)
        users.append(user)
        cols.append(h)
    return np.stack(cols, axis=1), users


def _hybrid_effective_channel(H_ul, cfg: ExperimentConfig, method: str, rng):
    """Two pilot rounds for one hybrid method; returns ``(B, H_bar^T, rounds)``.

    ``H_ul`` is the power-controlled uplink channel (unit mean per-antenna power
    per user).
    """
    M, K = H_ul.shape
    training = UplinkTraining(H_ul, cfg.ul_snr_db[0], rng)
    H0 = training.observe(selection_combiner(K, M))
    if method == "OBS-HP":
        G0 = np.stack([stage1_spectrum(H0[:, k], M, 1) for k in range(K)])
        selected = sig_beam_sel(G0, cfg.threshold, cfg.rf_chains).selected
        B = obs_analog(selected, M)
    else:
        beams = [stage1_imsb(H0[:, k], M, cfg.oversampling) for k in range(K)]
        B = noas_analog(beams, M)
    H_bar = training.observe(B.T)
    return B, H_bar.T, training.rounds


def sumrate_trial(cfg: ExperimentConfig, trial: int) -> dict:
    """Sum rate (bps/Hz) of every enabled method on one channel draw.

    Uplink pilots are power-controlled so each user reaches the configured UL
    SNR; the BS undoes the known pilot scaling.  Full-digital methods train
    all ``M`` antennas in one round, hybrid methods use two rounds of ``K``
    RF chains.
    """
    H, _ = draw_channels(cfg, trial)
    M, K = H.shape
    scale = 1.0 / np.sqrt(np.mean(np.abs(H) ** 2, axis=0))
    H_ul = H * scale
    rho, noise = cfg.dl_power_w, cfg.user_noise_w
    out = {}

    if {"MRT", "FD-MMSE"} & set(cfg.methods):
        obs = ul_observe(H_ul, pilot_matrix(K), np.eye(M), cfg.ul_snr_db[0], trial_rng(cfg.seed, trial, _NOISE, 0))
        H_fd = obs.combined / scale
        if "MRT" in cfg.methods:
            out["MRT"] = {"sum_rate": user_rates(H, mrt_precoder(H_fd, rho), noise).sum()}
        if "FD-MMSE" in cfg.methods:
            P = fd_mmse_precoder(H_fd, rho, K, noise)
            out["FD-MMSE"] = {"sum_rate": user_rates(H, P, noise).sum()}

    for method in ("OBS-HP", "NOAS-HP"):
        if method not in cfg.methods:
            continue
        # same noise realization for both hybrid methods
        rng = trial_rng(cfg.seed, trial, _NOISE, 1)
        B, G_eff, rounds = _hybrid_effective_channel(H_ul, cfg, method, rng)
        G_eff = G_eff / scale[:, None]
        P = mmse_digital(G_eff, rho, K, analog=B, noise_power=noise)
        out[method] = {"sum_rate": user_rates(H, B @ P, noise).sum(), "pilot_rounds": rounds}
    return {m: out[m] for m in cfg.methods}


def run_sumrate_cdf(cfg: ExperimentConfig) -> ResultTable:
    """Per-trial sum rates plus the empirical CDF of each method.

    CDF rows carry metric ``sum_rate_cdf``: the ``trial`` column holds the rank
    ``r`` and ``value`` the sum rate at cumulative probability ``(r+1)/trials``.
    """
    table = ResultTable()

    def one(t):
        try:
            return sumrate_trial(cfg, t)
        except Exception as exc:
            raise RuntimeError(f"sum-rate trial {t} failed: {exc}") from exc

    results = _run_trials(one, cfg)
    for t, res in enumerate(results):
        for method, metrics in res.items():
            for metric, value in metrics.items():
                table.add("sumrate-cdf", t, method, metric, value)
    for method in cfg.methods:
        for rank, value in enumerate(np.sort(table.values(method, "sum_rate"))):
            table.add("sumrate-cdf", rank, method, "sum_rate_cdf", value)
    return table


def nmse_metric(snr_db: float) -> str:
    return f"nmse@{snr_db:g}dB"


def nmse_trial(cfg: ExperimentConfig, trial: int) -> dict:
    """Mean per-user NMSE for OBS (``V=1``) and NOAS (``V=oversampling``) at each SNR.

    Channels are unit-variance (no large-scale loss); both methods and all SNR
    points share the channel draw, and both methods share the noise draw.
    """
    H, _ = draw_channels(cfg, trial, link_budget=False)
    out = {"OBS": {}, "NOAS": {}}
    for i, snr in enumerate(cfg.ul_snr_db):
        for method, V in (("OBS", 1), ("NOAS", cfg.oversampling)):
            rng = trial_rng(cfg.seed, trial, _NOISE, i)
            est, _, _ = estimate_channels(H, V, snr, rng)
            out[method][nmse_metric(snr)] = float(np.mean(nmse(est.H_hat, H)))
    return out


def run_nmse_sweep(cfg: ExperimentConfig) -> ResultTable:
    table = ResultTable()

    def one(t):
        try:
            return nmse_trial(cfg, t)
        except Exception as exc:
            raise RuntimeError(f"NMSE trial {t} failed: {exc}") from exc

    for t, res in enumerate(_run_trials(one, cfg)):
        for method, metrics in res.items():
            for metric, value in metrics.items():
                table.add("nmse-sweep", t, method, metric, value)
    return table


def lemma1_trial(cfg: ExperimentConfig, trial: int) -> dict:
    """``|gamma|`` between two users at every array size in ``cfg.antenna_list``.

    The paths (angles and gains) are drawn once and reused for every ``M``.
    """
    out = {}
    for M in cfg.antenna_list:
        arr = ArrayConfig(M, cfg.d_over_lambda)
        hs = []
        for k in range(2):
            rng = trial_rng(cfg.seed, trial, _USERS, k)
            center = rng.uniform(0.0, np.pi)
            hs.append(draw_user(rng, arr, cfg.num_paths, center, cfg.angular_spread).h)
        out[f"M={M}"] = abs(correlation(hs[0], hs[1]))
    return out


def run_lemma1_study(cfg: ExperimentConfig) -> ResultTable:
    if len(cfg.antenna_list) < 2:
        raise ValueError("the correlation study needs at least two array sizes")
    table = ResultTable()
    for t, res in enumerate(_run_trials(lambda t: lemma1_trial(cfg, t), cfg)):
        for method, value in res.items():
            table.add("lemma1", t, method, "abs_gamma", value)
    return table


def imsb_hit_rate(cfg: ExperimentConfig, tolerance: int = 1) -> float:
    """Fraction of users whose stage-1 beam lies within ``tolerance`` beams of the true IMSB.

    Uses the first UL SNR of ``cfg``, ``V = 1`` and unit-variance channels; the
    distance between beam indices is circular.
    """
    M, K = cfg.num_antennas, cfg.num_users

    def one(t):
        H, _ = draw_channels(cfg, t, link_budget=False)
        H0 = UplinkTraining(H, cfg.ul_snr_db[0], trial_rng(cfg.seed, t, _NOISE, 0)).observe(selection_combiner(K, M))
        hits = 0
        for k in range(K):
            est = stage1_imsb(H0[:, k], M, 1).index
            true = int(np.argmax(np.abs(beam_transform(H[:, k]).g)))
            hits += min((est - true) % M, (true - est) % M) <= tolerance
        return hits

    return sum(_run_trials(one, cfg)) / (K * cfg.trials)


def write_csv(table: ResultTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for exp, trial, method, metric, value in table.rows:
            writer.writerow((exp, trial, method, metric, repr(value)))


def read_csv(path) -> ResultTable:
    table = ResultTable()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        for exp, trial, method, metric, value in reader:
            table.add(exp, int(trial), method, metric, float(value))
    return table
