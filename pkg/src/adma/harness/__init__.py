"""Experiment orchestration: configuration, Monte-Carlo runners, CSV output."""
from .config import ConfigError, ExperimentConfig, load_config, write_config
from .experiments import (
    ResultTable,
    read_csv,
    run_lemma1_study,
    run_nmse_sweep,
    run_sumrate_cdf,
    write_csv,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "write_config",
    "ResultTable",
    "read_csv",
    "run_lemma1_study",
    "run_nmse_sweep",
    "run_sumrate_cdf",
    "write_csv",
]
