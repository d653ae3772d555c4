"""Experiment runner, exports and the command-line interface."""
from .experiment import (CSV_HEADER, ConfigError, ExperimentConfig, Row, RunResult,
                         build_config, read_csv, rmse, run_experiment, sweep, to_csv,
                         write_csv)
from .export import emit_learning_curves, export_heatmap, export_oracle

__all__ = [
    "CSV_HEADER", "ConfigError", "ExperimentConfig", "Row", "RunResult", "build_config",
    "emit_learning_curves", "export_heatmap", "export_oracle", "read_csv", "rmse",
    "run_experiment", "sweep", "to_csv", "write_csv",
]
