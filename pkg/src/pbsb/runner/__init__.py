from .config import ConfigError, ExperimentConfig, build_environment, parse_config_text
from .experiment import SimulationError, run_experiment, run_single, simulate
from .report import report_document, write_report, write_round_log, write_round_logs

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SimulationError",
    "build_environment",
    "parse_config_text",
    "report_document",
    "run_experiment",
    "run_single",
    "simulate",
    "write_report",
    "write_round_log",
    "write_round_logs",
]
