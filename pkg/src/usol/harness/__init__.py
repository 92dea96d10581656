"""Experiment drivers, reports, and the command-line interface."""

from .config import ExperimentConfig, load_config
from .report import CheckRecord, ExperimentReport, FitRecord

__all__ = [
    "ExperimentConfig",
    "load_config",
    "ExperimentReport",
    "FitRecord",
    "CheckRecord",
]
