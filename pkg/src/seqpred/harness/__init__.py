"""Experiment plumbing: JSON potential specs, CLI, and the HTTP game service."""

from .specs import ConfigError, ExperimentConfig, build_phi, load_config, parse_penalty
from .runner import run_transcript

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "build_phi",
    "load_config",
    "parse_penalty",
    "run_transcript",
]
