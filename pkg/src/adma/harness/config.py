"""Experiment configuration and its INI-style text format."""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["ConfigError", "ExperimentConfig", "METHODS", "load_config", "write_config", "db_to_linear", "dbm_to_watts"]

METHODS = ("MRT", "FD-MMSE", "OBS-HP", "NOAS-HP")
SECTION = "experiment"
REQUIRED = ("num_antennas", "num_users", "trials", "seed")


class ConfigError(ValueError):
    pass


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


@dataclass
class ExperimentConfig:
    """Monte-Carlo scenario.  dB/dBm fields are converted to linear once, here."""

    num_antennas: int = 64
    num_users: int = 4
    num_paths: int = 20
    angular_spread_deg: float = 1.0
    oversampling: int = 4
    threshold: float = 0.5
    rf_chains: int | None = None
    d_over_lambda: float = 0.5
    carrier_freq_mhz: float = 3700.0
    cell_radius_m: float = 1000.0
    min_distance_m: float = 35.0
    shadowing_db: float = 4.0
    dl_power_dbm: float = 50.0
    user_noise_dbm: float = -92.0
    ul_snr_db: tuple = (25.0,)
    trials: int = 500
    seed: int = 0
    methods: tuple = METHODS
    antenna_list: tuple = (16, 64, 256, 1024)
    workers: int = 1

    dl_power_w: float = field(init=False, repr=False, compare=False)
    user_noise_w: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.ul_snr_db = tuple(float(s) for s in self.ul_snr_db)
        self.methods = tuple(self.methods)
        self.antenna_list = tuple(int(m) for m in self.antenna_list)
        if self.rf_chains is None:
            self.rf_chains = self.num_users
        self._validate()
        self.dl_power_w = dbm_to_watts(self.dl_power_dbm)
        self.user_noise_w = dbm_to_watts(self.user_noise_dbm)

    def _validate(self):
        for name in ("num_antennas", "num_users", "num_paths", "oversampling", "trials", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("threshold", "d_over_lambda", "carrier_freq_mhz", "cell_radius_m", "min_distance_m"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if self.angular_spread_deg < 0 or self.shadowing_db < 0:
            raise ConfigError("angular_spread_deg and shadowing_db must be >= 0")
        if self.d_over_lambda > 0.5:
            raise ConfigError("d_over_lambda must be <= 0.5")
        if not self.num_users <= self.rf_chains <= self.num_antennas:
            raise ConfigError("need num_users <= rf_chains <= num_antennas")
        if self.min_distance_m >= self.cell_radius_m:
            raise ConfigError("min_distance_m must be below cell_radius_m")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if not self.ul_snr_db:
            raise ConfigError("ul_snr_db needs at least one value")

    @property
    def angular_spread(self) -> float:
        return math.radians(self.angular_spread_deg)

    @property
    def ul_snr_linear(self) -> tuple:
        return tuple(db_to_linear(s) for s in self.ul_snr_db)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _fields():
    return [f for f in dataclasses.fields(ExperimentConfig) if f.init]


def _format(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name: str, default, text: str):
    text = text.strip()
    try:
        if isinstance(default, tuple):
            items = [t.strip() for t in text.split(",") if t.strip()]
            if name == "methods":
                return tuple(items)
            if name == "antenna_list":
                return tuple(int(t) for t in items)
            return tuple(float(t) for t in items)
        if name == "rf_chains" or isinstance(default, int):
            return int(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for '{name}': {text!r}") from exc


def load_config(path) -> ExperimentConfig:
    """Read an ``[experiment]`` section of ``key = value`` lines; unknown keys are errors."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}".splitlines()[0]) from exc
    if parser.sections() != [SECTION]:
        raise ConfigError(f"config must contain exactly one [{SECTION}] section")
    raw = dict(parser[SECTION])
    known = {f.name: f for f in _fields()}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key '{key}'")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required config key '{key}'")

    defaults = ExperimentConfig()
    kwargs = {key: _parse(key, getattr(defaults, key), text) for key, text in raw.items()}
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def write_config(cfg: ExperimentConfig, path) -> None:
    parser = configparser.ConfigParser()
    parser[SECTION] = {f.name: _format(getattr(cfg, f.name)) for f in _fields()}
    with open(Path(path), "w") as fh:
        parser.write(fh)
